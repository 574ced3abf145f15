#include "tourb/to_urb.hpp"

namespace tourb {

ToUrbNode::ToUrbNode(ProcessId id, const ToUrbConfig& cfg)
    : NodeBase(id, cfg.n),
      cfg_(cfg),
      fd_(id, cfg.n, cfg.fd_threshold),
      urb_(id, cfg.n, cfg.buffer_bound, cfg.wm_period),
      cs_{ConsensusSlot(0, id, cfg.n), ConsensusSlot(1, id, cfg.n),
          ConsensusSlot(2, id, cfg.n)},
      replied_(static_cast<std::size_t>(cfg.n), 0),
      replies_(static_cast<std::size_t>(cfg.n)) {}

SlotSeqView ToUrbNode::slot_view() const {
    SlotSeqView v{};
    for (int k = 0; k < 3; ++k)
        if (cs_[static_cast<std::size_t>(k)].active())
            v[static_cast<std::size_t>(k)] = cs_[static_cast<std::size_t>(k)].seq();
    return v;
}

bool ToUrbNode::try_broadcast(const std::string& payload) {
    auto num = urb_.to_broadcast(payload);
    if (!num) return false;
    TraceEvent ev;
    ev.kind = EventKind::ToBroadcast;
    ev.node = id_;
    ev.a = *num;
    ev.text = payload;
    emit(std::move(ev));
    return true;
}

void ToUrbNode::handle_sync(const Message& m) {
    Message r;
    r.kind = MsgKind::SyncAck;
    r.dst = m.src;
    r.qn = m.qn;
    r.seq = seq_now();
    r.obs = obs_s_;
    r.ready = urb_.max_ready(fd_.trusted_mask());
    outbox_.push_back(std::move(r));
}

void ToUrbNode::on_receive(const Message& m) {
    if (m.src >= 0 && m.src < n_) fd_.heard_from(m.src);
    switch (m.kind) {
        case MsgKind::UrbData:
            urb_.on_data(m, outbox_);
            break;
        case MsgKind::UrbAck:
            urb_.on_ack(m);
            break;
        case MsgKind::UrbWm:
            urb_.on_wm(m);
            break;
        case MsgKind::Sync:
            handle_sync(m);
            break;
        case MsgKind::SyncAck:
            if (querying_ && m.qn == next_query_ && m.src >= 0 && m.src < n_) {
                replied_[static_cast<std::size_t>(m.src)] = 1;
                SyncReply& r = replies_[static_cast<std::size_t>(m.src)];
                r.seq = m.seq;
                r.obs = m.obs;
                r.ready = m.ready;
                r.ready.resize(static_cast<std::size_t>(n_), 0);
            }
            break;
        case MsgKind::Beacon:
            break;
        default:
            // consensus traffic, admitted only for the two live rounds above
            // obs_s; a decision for an already passed round still gets an ack
            // so its sender can quiesce
            if (m.cseq > obs_s_ && m.cseq <= obs_s_ + 2) {
                cs_[static_cast<std::size_t>(mod3(m.cseq))].on_message(m, outbox_);
            } else if (m.kind == MsgKind::ConsDec && m.cseq <= obs_s_) {
                Message r;
                r.kind = MsgKind::ConsDecAck;
                r.dst = m.src;
                r.cseq = m.cseq;
                outbox_.push_back(std::move(r));
            }
            break;
    }
}

void ToUrbNode::send_sync_batch() {
    for (ProcessId j = 0; j < n_; ++j) {
        Message m;
        m.kind = MsgKind::Sync;
        m.dst = j;
        m.qn = next_query_;
        outbox_.push_back(std::move(m));
    }
}

bool ToUrbNode::all_trusted_replied() const {
    for (ProcessId j = 0; j < n_; ++j)
        if (fd_.trusts(j) && !replied_[static_cast<std::size_t>(j)]) return false;
    return true;
}

void ToUrbNode::start_iteration() {
    if (needs_stale_cleanup(obs_s_, slot_view())) {
        for (auto& s : cs_) s.recycle();
    }
    ++next_query_;
    std::fill(replied_.begin(), replied_.end(), 0);
    querying_ = true;
    iter_begin_ = ctx_ ? ctx_->step : 0;
    send_sync_batch();
}

unsigned ToUrbNode::pump() {
    fd_.tick();
    unsigned flags = kStepNone;
    bool overflow = false;
    if (!querying_) {
        if (next_query_ + 1 >= cfg_.max_counter) return kOverflow;
        start_iteration();
        flags |= kIterBegin;
    } else if (all_trusted_replied()) {
        overflow = finish_iteration();
        querying_ = false;
        flags |= kIterDone;
    } else {
        send_sync_batch();
    }
    std::uint64_t trusted = fd_.trusted_mask();
    urb_.pump(trusted, outbox_);
    ProcessId coord = fd_.coordinator();
    for (auto& s : cs_) s.pump(trusted, coord, outbox_);
    if (overflow) flags |= kOverflow;
    return flags;
}

bool ToUrbNode::finish_iteration() {
    // read own values directly at aggregation time: the loopback answer may
    // predate a slot that activated mid-query, and a stale own seq would make
    // the round triple look corrupt
    {
        SyncReply& mine = replies_[static_cast<std::size_t>(id_)];
        mine.seq = seq_now();
        mine.obs = obs_s_;
        mine.ready = urb_.max_ready(fd_.trusted_mask());
        replied_[static_cast<std::size_t>(id_)] = 1;
    }
    std::vector<SyncReply> xs;
    for (ProcessId j = 0; j < n_; ++j)
        if (replied_[static_cast<std::size_t>(j)])
            xs.push_back(replies_[static_cast<std::size_t>(j)]);
    Aggregate agg = aggregate_replies(xs, n_);
    last_max_seq_ = agg.max_seq;
    as_min_ = agg.as_min;
    as_max_ = agg.as_max;

    obs_s_ = reconcile_rounds(obs_s_, seq_now(), agg.max_seq);

    // a round can be visible through aggregation alone: peers report a seq
    // one ahead, yet none of its consensus traffic ever reached us (it was
    // conjured into their obs counters by corruption, or every holder of
    // the decision is gone). Join it so the starvation clock runs on it; a
    // real round decides long before the clock fires, a phantom one
    // resolves to an error and gets skipped.
    if (obs_s_ == seq_now() && agg.max_seq == obs_s_ + 1 &&
        agg.max_seq < cfg_.max_counter)
        cs_[static_cast<std::size_t>(mod3(agg.max_seq))].join(agg.max_seq);

    bool singleton = as_min_ == as_max_;
    auto keep = recycle_keep(obs_s_, seq_now(), agg.max_seq, singleton);
    for (int k = 0; k < 3; ++k) {
        auto& s = cs_[static_cast<std::size_t>(k)];
        if (!keep[static_cast<std::size_t>(k)] && s.active()) s.recycle();
    }
    for (auto& s : cs_) s.tick();

    bool overflow = false;
    std::uint64_t trusted = fd_.trusted_mask();
    urb_.tick(trusted);
    std::int64_t backlog = urb_.ell(trusted);
    bool term = urb_.all_have_terminated(trusted);
    if (singleton && exceed(term, backlog, cfg_.delta)) {
        std::int64_t s = agg.max_seq + 1;
        if (s >= cfg_.max_counter) {
            overflow = true;
        } else {
            ConsValue v;
            v.ready = agg.all_ready;
            if (cfg_.smr) {
                v.has_state = true;
                v.state = smr_;
            }
            cs_[static_cast<std::size_t>(mod3(s))].propose(s, v);
            TraceEvent ev;
            ev.kind = EventKind::Propose;
            ev.node = id_;
            ev.a = s;
            ev.b = backlog;
            ev.c = cfg_.delta;
            ev.d = term ? 1 : 0;
            ev.e = v.digest();
            emit(std::move(ev));
        }
    }

    ConsensusSlot& x = cs_[static_cast<std::size_t>(mod3(obs_s_ + 1))];
    if (obs_s_ + 1 == seq_now() && x.active() && x.seq() == obs_s_ + 1 &&
        x.result_kind() != ResultKind::None) {
        if (x.result_kind() == ResultKind::Value) {
            const ConsValue& v = x.result();
            if (cfg_.smr && v.has_state) smr_ = v.state;
            auto batch = urb_.bulk_read(v.ready, trusted);
            for (const auto& d : batch) {
                TraceEvent ev;
                ev.kind = EventKind::ToDeliver;
                ev.node = id_;
                ev.peer = d.sender;
                ev.a = d.num;
                ev.ghost = d.ghost;
                ev.text = d.payload;
                emit(std::move(ev));
                if (cfg_.smr) smr_.apply(d.payload);
                delivered_log_.push_back(d.payload);
            }
        }
        if (obs_s_ + 1 >= cfg_.max_counter - 1) overflow = true;
        else ++obs_s_;
    }
    if (next_query_ >= cfg_.max_counter - 1) overflow = true;
    return overflow;
}

SnapshotRec ToUrbNode::snapshot() const {
    SnapshotRec s;
    s.node = id_;
    s.iter_begin = iter_begin_;
    s.obs_s = obs_s_;
    s.next_query = next_query_;
    s.get_seq = seq_now();
    s.last_max_seq = last_max_seq_;
    s.allseq_min = as_min_;
    s.allseq_max = as_max_;
    std::int64_t active = 0;
    for (int k = 0; k < 3; ++k) {
        const auto& c = cs_[static_cast<std::size_t>(k)];
        SlotSnap& o = s.cs[k];
        o.active = c.active();
        o.seq = c.seq();
        if (c.result_kind() == ResultKind::Value) {
            o.result = 1;
            o.value_digest = c.result().digest();
            o.ghost = c.result().planted;
        } else if (c.result_kind() == ResultKind::Error) {
            o.result = 2;
        }
        if (o.active) ++active;
    }
    s.active_slots = active;
    s.buffered = urb_.buffered_entries();
    std::uint64_t trusted = fd_.trusted_mask();
    s.ell = urb_.ell(trusted);
    s.all_term = urb_.all_have_terminated(trusted);
    s.bulk_violations = urb_.bulk_violations();
    std::uint64_t h = fnv1a_mix(static_cast<std::uint64_t>(obs_s_), 1469598103934665603ull);
    for (const auto& c : cs_) h = fnv1a_mix(c.state_digest(), h);
    h = fnv1a_mix(urb_.state_digest(), h);
    if (cfg_.smr) h = fnv1a_mix(smr_.digest(), h);
    s.state_digest = h;
    s.smr_on = cfg_.smr;
    s.smr_counter = smr_.counter;
    s.smr_digest = smr_.digest();
    return s;
}

void ToUrbNode::corrupt(std::mt19937_64& rng, const FaultSpec& f) {
    if (f.shape != FaultShape::State && f.shape != FaultShape::Full) return;
    auto roll = [&] {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < f.intensity;
    };
    auto small = [&] {
        return static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(f.bound + 1));
    };
    if (roll()) obs_s_ = small();
    if (roll()) next_query_ = small();
    if (roll()) {
        querying_ = (rng() & 1) != 0;
        for (ProcessId j = 0; j < n_; ++j) {
            replied_[static_cast<std::size_t>(j)] = static_cast<char>(rng() & 1);
            SyncReply& r = replies_[static_cast<std::size_t>(j)];
            r.seq = small();
            r.obs = small();
            r.ready.assign(static_cast<std::size_t>(n_), 0);
            for (auto& w : r.ready) w = small();
        }
    }
    if (roll()) {
        last_max_seq_ = small();
        as_min_ = small();
        as_max_ = small();
    }
    if (roll()) fd_.corrupt(rng);
    urb_.corrupt(rng, f);
    for (auto& s : cs_) s.corrupt(rng, f);
    if (cfg_.smr && roll()) {
        smr_.counter = small();
        smr_.log.clear();
        std::uint64_t k = rng() % 3;
        for (std::uint64_t i = 0; i < k; ++i)
            smr_.log.push_back("z" + std::to_string(rng() % 9));
    }
}

void ToUrbNode::reset() {
    obs_s_ = 0;
    next_query_ = 0;
    querying_ = false;
    std::fill(replied_.begin(), replied_.end(), 0);
    for (auto& r : replies_) r = SyncReply{};
    last_max_seq_ = 0;
    as_min_ = 0;
    as_max_ = 0;
    fd_.reset();
    urb_.reset();
    for (auto& s : cs_) s.recycle();
    smr_ = SmrState{};
    delivered_log_.clear();
    iter_begin_ = 0;
    outbox_.clear();
}

}  // namespace tourb

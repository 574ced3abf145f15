#include "tourb/sim.hpp"

#include <algorithm>

namespace tourb {

ToUrbConfig node_cfg(const Scenario& sc) {
    ToUrbConfig c;
    c.n = sc.n;
    c.delta = sc.delta;
    c.max_counter = sc.max_counter;
    c.fd_threshold = sc.fd_threshold;
    c.buffer_bound = sc.buffer_bound;
    c.wm_period = sc.wm_period;
    c.smr = sc.smr;
    return c;
}

Simulator::Simulator(const Scenario& sc, NodeFactory factory)
    : sc_(sc),
      n_(sc.n),
      max_steps_(sc.max_steps ? sc.max_steps : sc.derived_max_steps()),
      ch_(static_cast<std::size_t>(sc.n) * static_cast<std::size_t>(sc.n)),
      chan_rng_(sc.seed * 0x9e3779b97f4a7c15ull + 1),
      fault_rng_(sc.seed * 0xc2b2ae3d27d4eb4full + 2),
      crashed_(static_cast<std::size_t>(sc.n), 0),
      correct_(static_cast<std::size_t>(sc.n), 1),
      prefer_recv_(static_cast<std::size_t>(sc.n), 0),
      recv_cursor_(static_cast<std::size_t>(sc.n), 0),
      wl_left_(static_cast<std::size_t>(sc.n), 0),
      wl_cd_(static_cast<std::size_t>(sc.n), 0),
      wl_sent_(static_cast<std::size_t>(sc.n), 0),
      iter_begin_step_(static_cast<std::size_t>(sc.n), -1),
      done_since_boundary_(static_cast<std::size_t>(sc.n), 0),
      last_snap_(static_cast<std::size_t>(sc.n)) {
    trace_.meta.n = sc.n;
    trace_.meta.t = sc.t;
    trace_.meta.delta = sc.delta;
    trace_.meta.buffer_bound = sc.buffer_bound;
    trace_.meta.max_counter = sc.max_counter;
    trace_.meta.seed = sc.seed;
    trace_.meta.smr = sc.smr;
    trace_.meta.light = sc.trace_level == TraceLevel::Light;
    trace_.meta.scenario_digest = sc.digest();

    for (ProcessId i = 0; i < n_; ++i) {
        std::unique_ptr<NodeBase> nd =
            factory ? factory(i, sc_)
                    : std::make_unique<ToUrbNode>(i, node_cfg(sc_));
        nd->set_ctx(&ctx_);
        nodes_.push_back(std::move(nd));
    }
    ctx_.trace = &trace_;

    for (const auto& c : sc_.crashes) {
        if (c.node >= 0 && c.node < n_) correct_[static_cast<std::size_t>(c.node)] = 0;
        last_sched_event_ = std::max(last_sched_event_, c.step);
    }
    if (sc_.fault.shape != FaultShape::None)
        last_sched_event_ = std::max(last_sched_event_, sc_.fault.step);

    std::vector<ProcessId> senders = sc_.workload_senders;
    if (senders.empty())
        for (ProcessId i = 0; i < n_; ++i) senders.push_back(i);
    std::int64_t m = static_cast<std::int64_t>(senders.size());
    for (std::size_t idx = 0; idx < senders.size(); ++idx) {
        ProcessId s = senders[idx];
        if (s < 0 || s >= n_) continue;
        std::int64_t share = sc_.workload / m +
                             (static_cast<std::int64_t>(idx) < sc_.workload % m ? 1 : 0);
        wl_left_[static_cast<std::size_t>(s)] += share;
        wl_total_left_ += share;
    }
}

void Simulator::ev(TraceEvent e) {
    if (trace_.meta.light) {
        switch (e.kind) {
            case EventKind::Send:
            case EventKind::Receive:
            case EventKind::Drop:
            case EventKind::Duplicate:
                return;
            default:
                break;
        }
    }
    e.step = step_;
    trace_.events.push_back(std::move(e));
}

static void fill_wire_fields(const Message& m, TraceEvent& e) {
    e.a = static_cast<std::int64_t>(m.kind);
    switch (m.kind) {
        case MsgKind::UrbData:
        case MsgKind::UrbAck:
            e.b = m.num;
            e.c = m.sender;
            break;
        case MsgKind::UrbWm:
            e.b = m.head;
            break;
        case MsgKind::Sync:
        case MsgKind::SyncAck:
            e.b = m.qn;
            break;
        case MsgKind::Beacon:
            break;
        default:
            e.b = m.cseq;
            e.c = m.rank;
            break;
    }
    e.ghost = m.planted;
}

Trace Simulator::run() {
    while (step_once()) {
    }
    finalize();
    return std::move(trace_);
}

void Simulator::finalize() { trace_.meta.format_version = 1; }

bool Simulator::step_once() {
    if (stopped_ || step_ >= max_steps_) return false;
    ctx_.step = step_;
    for (const auto& c : sc_.crashes)
        if (c.step == step_ && c.node >= 0 && c.node < n_ &&
            !crashed_[static_cast<std::size_t>(c.node)])
            do_crash(c.node);
    if (!fault_done_ && sc_.fault.shape != FaultShape::None &&
        sc_.fault.step == step_)
        apply_fault();
    ProcessId i = pick_node();
    if (i >= 0) node_step(i);
    if (restart_pending_) do_restart();
    ++step_;
    return !stopped_;
}

ProcessId Simulator::pick_node() {
    for (int k = 0; k < n_; ++k) {
        ProcessId i = (rr_ + k) % n_;
        if (crashed_[static_cast<std::size_t>(i)]) continue;
        if (sc_.fairness == Fairness::Adversarial && i == sc_.adv_node &&
            step_ >= sc_.adv_from && step_ < sc_.adv_from + sc_.adv_len)
            continue;
        rr_ = (i + 1) % n_;
        return i;
    }
    return -1;
}

void Simulator::do_crash(ProcessId i) {
    crashed_[static_cast<std::size_t>(i)] = 1;
    wl_total_left_ -= wl_left_[static_cast<std::size_t>(i)];
    wl_left_[static_cast<std::size_t>(i)] = 0;
    nodes_[static_cast<std::size_t>(i)]->outbox().clear();
    TraceEvent e;
    e.kind = EventKind::Crash;
    e.node = i;
    ev(std::move(e));
}

void Simulator::node_step(ProcessId i) {
    NodeBase& nd = *nodes_[static_cast<std::size_t>(i)];
    std::size_t before = trace_.events.size();
    // the drip is paced by the node's own steps, not by idle gaps: a busy
    // network would otherwise starve the workload entirely
    maybe_workload(i);
    if (prefer_recv_[static_cast<std::size_t>(i)] && do_receive(i)) {
        prefer_recv_[static_cast<std::size_t>(i)] = 0;
    } else if (!nd.outbox().empty()) {
        do_send(i);
        prefer_recv_[static_cast<std::size_t>(i)] = 1;
    } else {
        unsigned flags = nd.pump();
        handle_flags(i, flags);
        if (!restart_pending_) {
            if (!nd.outbox().empty()) {
                do_send(i);
                prefer_recv_[static_cast<std::size_t>(i)] = 1;
            } else if (do_receive(i)) {
                prefer_recv_[static_cast<std::size_t>(i)] = 0;
            }
        }
    }
    for (std::size_t k = before; k < trace_.events.size(); ++k)
        if (trace_.events[k].kind == EventKind::ToDeliver) ++deliver_count_;
}

bool Simulator::do_receive(ProcessId i) {
    for (int k = 0; k < n_; ++k) {
        ProcessId j = (recv_cursor_[static_cast<std::size_t>(i)] + k) % n_;
        Channel& c = chan(j, i);
        if (c.q.empty()) continue;
        Message m = std::move(c.q.front());
        c.q.pop_front();
        recv_cursor_[static_cast<std::size_t>(i)] = (j + 1) % n_;
        TraceEvent e;
        e.kind = EventKind::Receive;
        e.node = i;
        e.peer = j;
        fill_wire_fields(m, e);
        ev(std::move(e));
        nodes_[static_cast<std::size_t>(i)]->on_receive(m);
        return true;
    }
    return false;
}

void Simulator::do_send(ProcessId i) {
    NodeBase& nd = *nodes_[static_cast<std::size_t>(i)];
    Message m = std::move(nd.outbox().front());
    nd.outbox().pop_front();
    if (m.dst < 0 || m.dst >= n_) return;  // planted garbage address
    channel_send(i, std::move(m));
}

void Simulator::channel_send(ProcessId src, Message m) {
    ProcessId dst = m.dst;
    m.src = src;
    {
        TraceEvent e;
        e.kind = EventKind::Send;
        e.node = src;
        e.peer = dst;
        fill_wire_fields(m, e);
        ev(std::move(e));
    }
    Channel& c = chan(src, dst);
    int k = static_cast<int>(m.kind);
    bool local = src == dst;  // the loopback channel is reliable
    if (!local && sc_.loss > 0 && roll(chan_rng_, sc_.loss) &&
        c.drop_run[static_cast<std::size_t>(k)] < sc_.drop_cap) {
        ++c.drop_run[static_cast<std::size_t>(k)];
        TraceEvent e;
        e.kind = EventKind::Drop;
        e.node = src;
        e.peer = dst;
        fill_wire_fields(m, e);
        e.b = 0;
        ev(std::move(e));
        return;
    }
    c.drop_run[static_cast<std::size_t>(k)] = 0;
    bool dup = !local && sc_.dup > 0 && roll(chan_rng_, sc_.dup);
    auto insert_one = [&](Message mm) {
        if (static_cast<int>(c.q.size()) >= sc_.channel_capacity) {
            TraceEvent e;
            e.kind = EventKind::Drop;
            e.node = src;
            e.peer = dst;
            fill_wire_fields(mm, e);
            e.b = 1;
            ev(std::move(e));
            return;
        }
        std::size_t pos = c.q.size();
        if (!local && sc_.reorder > 0 && !c.q.empty() && roll(chan_rng_, sc_.reorder))
            pos = chan_rng_() % (c.q.size() + 1);
        c.q.insert(c.q.begin() + static_cast<std::ptrdiff_t>(pos), std::move(mm));
    };
    if (dup) {
        TraceEvent e;
        e.kind = EventKind::Duplicate;
        e.node = src;
        e.peer = dst;
        fill_wire_fields(m, e);
        ev(std::move(e));
        insert_one(m);
    }
    insert_one(std::move(m));
}

void Simulator::maybe_workload(ProcessId i) {
    auto ii = static_cast<std::size_t>(i);
    if (wl_left_[ii] <= 0) return;
    if (wl_cd_[ii] > 0) {
        --wl_cd_[ii];
        return;
    }
    std::string payload;
    if (sc_.smr) {
        bool app = sc_.smr_append_every > 0 &&
                   wl_sent_[ii] % sc_.smr_append_every == 0;
        payload = app ? "append:t" + std::to_string(i) + "x" +
                            std::to_string(wl_sent_[ii])
                      : "inc";
    } else {
        payload = "m" + std::to_string(i) + "." + std::to_string(wl_sent_[ii]);
    }
    if (nodes_[ii]->try_broadcast(payload)) {
        --wl_left_[ii];
        --wl_total_left_;
        ++wl_sent_[ii];
        wl_cd_[ii] = sc_.workload_gap;
    }
}

void Simulator::handle_flags(ProcessId i, unsigned flags) {
    auto ii = static_cast<std::size_t>(i);
    if (flags & kIterBegin)
        iter_begin_step_[ii] = static_cast<std::int64_t>(step_);
    if (flags & kIterDone) {
        SnapshotRec s = nodes_[ii]->snapshot();
        s.node = i;
        s.step = step_;
        s.max_inflight_qn = scan_inflight(i);
        trace_.snaps.push_back(s);
        TraceEvent e;
        e.kind = EventKind::StateSnapshot;
        e.node = i;
        e.a = static_cast<std::int64_t>(trace_.snaps.size() - 1);
        ev(std::move(e));
        last_snap_[ii] = s;
        if (iter_begin_step_[ii] > last_boundary_step_)
            done_since_boundary_[ii] = 1;
        bool all = true;
        for (ProcessId j = 0; j < n_; ++j)
            if (correct_[static_cast<std::size_t>(j)] &&
                !done_since_boundary_[static_cast<std::size_t>(j)])
                all = false;
        if (all) on_boundary();
    }
    if (flags & kOverflow) restart_pending_ = true;
}

void Simulator::on_boundary() {
    ++cycle_ord_;
    TraceEvent e;
    e.kind = EventKind::CycleBoundary;
    e.a = cycle_ord_;
    ev(std::move(e));
    last_boundary_step_ = static_cast<std::int64_t>(step_);
    std::fill(done_since_boundary_.begin(), done_since_boundary_.end(), 0);
    if (quiesced_now())
        ++quiesce_run_;
    else
        quiesce_run_ = 0;
    deliver_at_boundary_ = deliver_count_;
    if (sc_.quiesce_cycles > 0 && quiesce_run_ >= sc_.quiesce_cycles)
        stopped_ = true;
}

bool Simulator::quiesced_now() const {
    if (wl_total_left_ != 0) return false;
    if (step_ <= last_sched_event_) return false;
    if (deliver_count_ != deliver_at_boundary_) return false;
    for (ProcessId i = 0; i < n_; ++i) {
        if (crashed_[static_cast<std::size_t>(i)]) continue;
        const auto& s = last_snap_[static_cast<std::size_t>(i)];
        if (!s) return false;
        if (s->ell != 0 || !s->all_term) return false;
    }
    return true;
}

std::int64_t Simulator::scan_inflight(ProcessId i) const {
    std::int64_t mx = 0;
    for (ProcessId j = 0; j < n_; ++j) {
        const Channel& out = ch_[static_cast<std::size_t>(i * n_ + j)];
        for (const auto& m : out.q)
            if (m.kind == MsgKind::Sync) mx = std::max(mx, m.qn);
        const Channel& in = ch_[static_cast<std::size_t>(j * n_ + i)];
        for (const auto& m : in.q)
            if (m.kind == MsgKind::SyncAck) mx = std::max(mx, m.qn);
        for (const auto& m : nodes_[static_cast<std::size_t>(j)]->outbox()) {
            if (j == i && m.kind == MsgKind::Sync) mx = std::max(mx, m.qn);
            if (m.dst == i && m.kind == MsgKind::SyncAck) mx = std::max(mx, m.qn);
        }
    }
    return mx;
}

Message Simulator::make_junk(ProcessId src, ProcessId dst) {
    const FaultSpec& f = sc_.fault;
    auto small = [&] {
        return static_cast<std::int64_t>(fault_rng_() %
                                         static_cast<std::uint64_t>(f.bound + 1));
    };
    static const MsgKind kinds[] = {
        MsgKind::UrbData,    MsgKind::UrbAck,  MsgKind::UrbWm,
        MsgKind::Sync,       MsgKind::SyncAck, MsgKind::ConsReport,
        MsgKind::ConsPre,    MsgKind::ConsPreAck, MsgKind::ConsDec,
        MsgKind::ConsDecAck, MsgKind::Beacon,
    };
    Message m;
    m.kind = kinds[fault_rng_() % (sizeof(kinds) / sizeof(kinds[0]))];
    m.src = src;
    m.dst = dst;
    m.planted = true;
    m.sender = static_cast<ProcessId>(fault_rng_() % static_cast<std::uint64_t>(n_));
    m.num = small();
    m.payload = "ghost" + std::to_string(fault_rng_() % 97);
    m.head = small();
    m.tail = small();
    m.ready.assign(static_cast<std::size_t>(n_), 0);
    for (auto& w : m.ready) w = small();
    m.qn = small();
    m.seq = small();
    m.obs = small();
    m.cseq = small();
    m.rank = static_cast<int>(fault_rng_() % static_cast<std::uint64_t>(2 * n_));
    if (fault_rng_() & 1) {
        m.has_prop = true;
        m.prop.ready = m.ready;
        m.prop.planted = true;
    }
    if (fault_rng_() & 1) {
        m.lock_rank = static_cast<int>(fault_rng_() % static_cast<std::uint64_t>(n_));
        m.lock.ready = m.ready;
        m.lock.planted = true;
    }
    if (fault_rng_() & 1) {
        m.has_dec = true;
        m.dec.ready = m.ready;
        m.dec.planted = true;
    }
    return m;
}

void Simulator::apply_fault() {
    fault_done_ = true;
    const FaultSpec& f = sc_.fault;
    bool do_state = f.shape == FaultShape::State || f.shape == FaultShape::Full;
    bool do_chan = f.shape == FaultShape::Channels || f.shape == FaultShape::Full;
    if (do_state) {
        std::vector<ProcessId> targets = f.nodes;
        if (targets.empty())
            for (ProcessId i = 0; i < n_; ++i) targets.push_back(i);
        for (ProcessId i : targets) {
            if (i < 0 || i >= n_ || crashed_[static_cast<std::size_t>(i)]) continue;
            nodes_[static_cast<std::size_t>(i)]->corrupt(fault_rng_, f);
            auto& ob = nodes_[static_cast<std::size_t>(i)]->outbox();
            for (auto it = ob.begin(); it != ob.end();) {
                if (fault_rng_() % 3 == 0) it = ob.erase(it);
                else ++it;
            }
            TraceEvent e;
            e.kind = EventKind::TransientFault;
            e.node = i;
            e.text = "state";
            ev(std::move(e));
        }
    }
    if (do_chan) {
        std::int64_t deleted = 0, altered = 0, planted = 0;
        for (ProcessId a = 0; a < n_; ++a) {
            for (ProcessId b = 0; b < n_; ++b) {
                if (!roll(fault_rng_, f.intensity)) continue;
                Channel& c = chan(a, b);
                for (auto it = c.q.begin(); it != c.q.end();) {
                    if (fault_rng_() % 3 == 0) {
                        it = c.q.erase(it);
                        ++deleted;
                    } else {
                        ++it;
                    }
                }
                if (!c.q.empty() && (fault_rng_() & 1)) {
                    Message& m = c.q[fault_rng_() % c.q.size()];
                    m.num += static_cast<std::int64_t>(fault_rng_() % 5);
                    m.qn += static_cast<std::int64_t>(fault_rng_() % 5);
                    m.seq += static_cast<std::int64_t>(fault_rng_() % 5);
                    m.cseq += static_cast<std::int64_t>(fault_rng_() % 5);
                    if (m.kind == MsgKind::UrbData)
                        m.payload = "ghost" + std::to_string(fault_rng_() % 97);
                    m.planted = true;
                    ++altered;
                }
                std::uint64_t extra = fault_rng_() % 3;
                for (std::uint64_t x = 0; x < extra; ++x) {
                    if (static_cast<int>(c.q.size()) >= sc_.channel_capacity) break;
                    c.q.push_back(make_junk(a, b));
                    ++planted;
                }
            }
        }
        TraceEvent e;
        e.kind = EventKind::TransientFault;
        e.node = -1;
        e.a = deleted;
        e.b = altered;
        e.c = planted;
        e.text = "channels";
        ev(std::move(e));
    }
}

void Simulator::do_restart() {
    restart_pending_ = false;
    ++epoch_;
    TraceEvent e;
    e.kind = EventKind::GlobalRestart;
    e.a = epoch_;
    ev(std::move(e));
    for (ProcessId i = 0; i < n_; ++i) {
        if (crashed_[static_cast<std::size_t>(i)]) continue;
        nodes_[static_cast<std::size_t>(i)]->reset();
        prefer_recv_[static_cast<std::size_t>(i)] = 0;
        recv_cursor_[static_cast<std::size_t>(i)] = 0;
        iter_begin_step_[static_cast<std::size_t>(i)] = -1;
        last_snap_[static_cast<std::size_t>(i)].reset();
    }
    for (auto& c : ch_) {
        c.q.clear();
        c.drop_run.fill(0);
    }
    std::fill(done_since_boundary_.begin(), done_since_boundary_.end(), 0);
    last_boundary_step_ = static_cast<std::int64_t>(step_);
    cycle_ord_ = 0;
    quiesce_run_ = 0;
    deliver_at_boundary_ = deliver_count_;
}

CycleAccount count_async_cycles(const Trace& t, std::uint64_t from_step,
                                std::uint64_t to_step,
                                const std::vector<char>& correct) {
    int n = t.meta.n;
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> iters(
        static_cast<std::size_t>(n));
    for (const auto& s : t.snaps) {
        if (s.node < 0 || s.node >= n) continue;
        if (s.step < from_step || s.step > to_step) continue;
        if (s.iter_begin < from_step) continue;
        iters[static_cast<std::size_t>(s.node)].push_back({s.iter_begin, s.step});
    }
    CycleAccount acc;
    for (int i = 0; i < n; ++i)
        if (correct[static_cast<std::size_t>(i)] &&
            iters[static_cast<std::size_t>(i)].empty())
            acc.unbounded = true;
    std::vector<std::size_t> ptr(static_cast<std::size_t>(n), 0);
    std::int64_t last_b = static_cast<std::int64_t>(from_step) - 1;
    for (;;) {
        std::uint64_t bstep = 0;
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            if (!correct[static_cast<std::size_t>(i)]) continue;
            auto& v = iters[static_cast<std::size_t>(i)];
            std::size_t p = ptr[static_cast<std::size_t>(i)];
            while (p < v.size() && static_cast<std::int64_t>(v[p].first) <= last_b)
                ++p;
            ptr[static_cast<std::size_t>(i)] = p;
            if (p == v.size()) {
                ok = false;
                break;
            }
            bstep = std::max(bstep, v[p].second);
        }
        if (!ok) break;
        acc.boundaries.push_back(bstep);
        last_b = static_cast<std::int64_t>(bstep);
    }
    return acc;
}

std::vector<char> correct_nodes(const Trace& t) {
    std::vector<char> out(static_cast<std::size_t>(t.meta.n), 1);
    for (const auto& e : t.events)
        if (e.kind == EventKind::Crash && e.node >= 0 && e.node < t.meta.n)
            out[static_cast<std::size_t>(e.node)] = 0;
    return out;
}

}  // namespace tourb

#include "tourb/consensus.hpp"

#include <algorithm>

namespace tourb {

void ConsensusSlot::recycle() {
    active_ = false;
    seq_ = 0;
    has_prop_ = false;
    prop_ = {};
    promised_rank_ = -1;
    lock_rank_ = -1;
    lock_ = {};
    result_ = ResultKind::None;
    decided_ = {};
    rep_seen_.assign(n_, 0);
    rep_promised_.assign(n_, -1);
    rep_has_prop_.assign(n_, 0);
    rep_prop_.assign(n_, {});
    rep_lock_rank_.assign(n_, -1);
    rep_lock_.assign(n_, {});
    pre_rank_ = -1;
    pre_value_ = {};
    pre_acks_ = 0;
    dec_acks_ = 0;
    stalled_ = 0;
}

void ConsensusSlot::activate(std::int64_t seq) {
    recycle();
    active_ = true;
    seq_ = seq;
}

void ConsensusSlot::join(std::int64_t seq) {
    if (!active_) activate(seq);
}

void ConsensusSlot::propose(std::int64_t seq, const ConsValue& v) {
    if (active_ && seq_ != seq) {
        result_ = ResultKind::Error;  // slot is bound to a different round
        return;
    }
    if (!active_) activate(seq);
    if (has_prop_) return;  // idempotent within the same round
    has_prop_ = true;
    prop_ = v;
    rep_seen_[self_] = 1;
    rep_has_prop_[self_] = 1;
    rep_prop_[self_] = v;
    stalled_ = 0;
}

void ConsensusSlot::tick() {
    if (!active_ || result_ != ResultKind::None) return;
    if (++stalled_ >= kStallRounds) result_ = ResultKind::Error;
}

void ConsensusSlot::adopt(const ConsValue& v) {
    if (result_ == ResultKind::Value && !(decided_ == v)) {
        result_ = ResultKind::Error;
        return;
    }
    if (result_ == ResultKind::None) {
        result_ = ResultKind::Value;
        decided_ = v;
    }
}

void ConsensusSlot::on_message(const Message& m, Outbox& out) {
    if (m.src < 0 || m.src >= n_) return;
    // learning about a round activates the slot as a participant
    if (!active_) activate(m.cseq);
    if (m.cseq != seq_) return;  // stale round; the caller recycles eventually
    switch (m.kind) {
        case MsgKind::ConsReport: {
            rep_seen_[m.src] = 1;
            rep_promised_[m.src] = std::max(rep_promised_[m.src], m.rank);
            if (m.has_prop) {
                rep_has_prop_[m.src] = 1;
                rep_prop_[m.src] = m.prop;
            }
            if (m.lock_rank > rep_lock_rank_[m.src]) {
                rep_lock_rank_[m.src] = m.lock_rank;
                rep_lock_[m.src] = m.lock;
            }
            if (m.has_dec) adopt(m.dec);
            break;
        }
        case MsgKind::ConsPre: {
            if (m.rank < promised_rank_ || m.rank < lock_rank_) break;
            lock_rank_ = m.rank;
            lock_ = m.dec;
            promised_rank_ = std::max(promised_rank_, m.rank);
            Message ack;
            ack.kind = MsgKind::ConsPreAck;
            ack.dst = m.src;
            ack.cseq = seq_;
            ack.rank = m.rank;
            out.push_back(std::move(ack));
            break;
        }
        case MsgKind::ConsPreAck: {
            if (pre_rank_ == self_ && m.rank == self_)
                pre_acks_ |= 1ull << m.src;
            break;
        }
        case MsgKind::ConsDec: {
            adopt(m.dec);
            Message ack;
            ack.kind = MsgKind::ConsDecAck;
            ack.dst = m.src;
            ack.cseq = seq_;
            out.push_back(std::move(ack));
            break;
        }
        case MsgKind::ConsDecAck: {
            dec_acks_ |= 1ull << m.src;
            break;
        }
        default:
            break;
    }
}

void ConsensusSlot::sanitize() {
    if (!active_) return;
    // clamp rank domains so corrupted values cannot wedge the round
    promised_rank_ = std::min(promised_rank_, n_ - 1);
    lock_rank_ = std::min(lock_rank_, n_ - 1);
    if (pre_rank_ != -1 && pre_rank_ != self_) pre_rank_ = -1;
    for (ProcessId j = 0; j < n_; ++j) {
        rep_promised_[j] = std::min(rep_promised_[j], n_ - 1);
        rep_lock_rank_[j] = std::min(rep_lock_rank_[j], n_ - 1);
    }
    if (seq_ < 0) result_ = ResultKind::Error;
}

void ConsensusSlot::pump(std::uint64_t trusted, ProcessId coordinator, Outbox& out) {
    if (!active_) return;
    sanitize();
    if (result_ == ResultKind::Error) return;

    if (result_ == ResultKind::Value) {
        // decision dissemination until every trusted node acknowledged
        std::uint64_t missing = trusted & ~dec_acks_ & ~(1ull << self_);
        for (ProcessId j = 0; j < n_ && missing; ++j) {
            if (!(missing & (1ull << j))) continue;
            Message dec;
            dec.kind = MsgKind::ConsDec;
            dec.dst = j;
            dec.cseq = seq_;
            dec.has_dec = true;
            dec.dec = decided_;
            out.push_back(std::move(dec));
        }
        return;
    }

    promised_rank_ = std::max(promised_rank_, coordinator);

    // report own state: proposers broadcast so every node joins the round,
    // plain participants only need to reach the coordinator
    auto make_report = [&](ProcessId dst) {
        Message rep;
        rep.kind = MsgKind::ConsReport;
        rep.dst = dst;
        rep.cseq = seq_;
        rep.rank = promised_rank_;
        rep.has_prop = has_prop_;
        if (has_prop_) rep.prop = prop_;
        rep.lock_rank = lock_rank_;
        if (lock_rank_ >= 0) rep.lock = lock_;
        out.push_back(std::move(rep));
    };
    if (has_prop_) {
        for (ProcessId j = 0; j < n_; ++j)
            if (j != self_) make_report(j);
    } else if (coordinator != self_) {
        make_report(coordinator);
    }

    if (coordinator != self_) return;

    // coordinator duties: record the local report, then try to decide
    rep_seen_[self_] = 1;
    rep_promised_[self_] = std::max(rep_promised_[self_], promised_rank_);
    if (lock_rank_ > rep_lock_rank_[self_]) {
        rep_lock_rank_[self_] = lock_rank_;
        rep_lock_[self_] = lock_;
    }
    if (pre_rank_ != self_) {
        int seen = 0;
        for (ProcessId j = 0; j < n_; ++j)
            seen += rep_seen_[j] && rep_promised_[j] >= self_;
        if (seen < majority()) return;
        int best_rank = -1;
        ProcessId best_lock = -1;
        ProcessId best_prop = -1;
        for (ProcessId j = 0; j < n_; ++j) {
            if (!rep_seen_[j] || rep_promised_[j] < self_) continue;
            if (rep_lock_rank_[j] > best_rank) {
                best_rank = rep_lock_rank_[j];
                best_lock = j;
            }
            if (rep_has_prop_[j] && (best_prop < 0 || j < best_prop)) best_prop = j;
        }
        ConsValue cand;
        if (best_rank >= 0) cand = rep_lock_[best_lock];
        else if (best_prop >= 0) cand = rep_prop_[best_prop];
        else return;  // no proposal visible yet
        pre_rank_ = self_;
        pre_value_ = cand;
        lock_rank_ = self_;
        lock_ = cand;
        pre_acks_ = 1ull << self_;
    }
    int locks = 0;
    for (ProcessId j = 0; j < n_; ++j) locks += (pre_acks_ >> j) & 1;
    if (locks >= majority()) {
        adopt(pre_value_);
        return;
    }
    for (ProcessId j = 0; j < n_; ++j) {
        if (j == self_ || (pre_acks_ & (1ull << j))) continue;
        Message pre;
        pre.kind = MsgKind::ConsPre;
        pre.dst = j;
        pre.cseq = seq_;
        pre.rank = self_;
        pre.has_dec = true;
        pre.dec = pre_value_;
        out.push_back(std::move(pre));
    }
}

std::uint64_t ConsensusSlot::state_digest() const {
    std::uint64_t h = fnv1a_mix(active_ ? 1 : 0, 0x434fu);
    if (!active_) return h;
    h = fnv1a_mix(static_cast<std::uint64_t>(seq_), h);
    h = fnv1a_mix(static_cast<std::uint64_t>(result_), h);
    h = fnv1a_mix(has_prop_ ? prop_.digest() : 0, h);
    h = fnv1a_mix(static_cast<std::uint64_t>(lock_rank_ + 1), h);
    h = fnv1a_mix(lock_rank_ >= 0 ? lock_.digest() : 0, h);
    h = fnv1a_mix(result_ == ResultKind::Value ? decided_.digest() : 0, h);
    h = fnv1a_mix(pre_acks_, h);
    h = fnv1a_mix(dec_acks_, h);
    return h;
}

void ConsensusSlot::corrupt(std::mt19937_64& rng, const FaultSpec& f) {
    auto roll = [&] { return (rng() % 1000) < std::uint64_t(f.intensity * 1000); };
    auto small = [&] { return static_cast<std::int64_t>(rng() % (f.bound + 1)); };
    auto junk_value = [&] {
        ConsValue v;
        v.ready.assign(n_, 0);
        for (auto& x : v.ready) x = small();
        v.planted = true;
        return v;
    };
    if (!roll()) return;
    activate(small());
    if (rng() % 2) {
        has_prop_ = true;
        prop_ = junk_value();
        rep_seen_[self_] = 1;
        rep_has_prop_[self_] = 1;
        rep_prop_[self_] = prop_;
    }
    if (rng() % 2) {
        promised_rank_ = int(rng() % (2 * n_));
        lock_rank_ = int(rng() % (2 * n_));
        lock_ = junk_value();
    }
    if (rng() % 3 == 0) {
        result_ = ResultKind::Value;
        decided_ = junk_value();
        dec_acks_ = rng();
    }
}

}  // namespace tourb

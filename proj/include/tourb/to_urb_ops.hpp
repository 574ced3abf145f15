#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "tourb/types.hpp"

// Pure round bookkeeping for the total-order layer: everything here is a
// function of plain values so it can be tested against hand-worked cases.

namespace tourb {

// sequence number of each consensus slot, nullopt when the slot is inactive
using SlotSeqView = std::array<std::optional<std::int64_t>, 3>;

inline std::int64_t mod3(std::int64_t v) { return ((v % 3) + 3) % 3; }

inline std::vector<std::int64_t> act_cs(const SlotSeqView& cs) {
    std::vector<std::int64_t> out;
    for (const auto& s : cs)
        if (s) out.push_back(*s);
    std::sort(out.begin(), out.end());
    return out;
}

// highest round this node has evidence of, counting delivered rounds (obs_s)
// and any live slot
inline std::int64_t current_seq(std::int64_t obs_s, const SlotSeqView& cs) {
    std::int64_t m = obs_s;
    for (const auto& s : cs)
        if (s && *s > m) m = *s;
    return m;
}

// true when the slot array cannot have been produced by a clean run: a slot
// holding a round that does not map to its index, live rounds more than one
// apart, or every live round already at or below obs_s
inline bool needs_stale_cleanup(std::int64_t obs_s, const SlotSeqView& cs) {
    for (int k = 0; k < 3; ++k)
        if (cs[k] && mod3(*cs[k]) != k) return true;
    auto act = act_cs(cs);
    if (act.empty()) return false;
    if (obs_s > act.back()) return true;
    if (act.back() - act.front() > 1) return true;
    return false;
}

// obs_s is coherent when the triple (obs_s, seq, max_seq) is one of the
// shapes a clean execution can produce; otherwise jump to the largest
inline std::int64_t reconcile_rounds(std::int64_t obs_s, std::int64_t seq,
                                     std::int64_t max_seq) {
    bool ok = (obs_s + 1 == seq && seq == max_seq) ||
              (obs_s == seq && seq == max_seq) ||
              (obs_s == seq && seq == max_seq - 1);
    if (ok) return obs_s;
    return std::max(obs_s, std::max(seq, max_seq));
}

// which slot indices must survive recycling after a query round
inline std::array<bool, 3> recycle_keep(std::int64_t obs_s, std::int64_t seq,
                                        std::int64_t max_seq,
                                        bool all_agree_on_seq) {
    std::array<bool, 3> keep{false, false, false};
    if (obs_s < seq) keep[mod3(obs_s)] = true;
    keep[mod3(seq)] = true;
    if (all_agree_on_seq) keep[mod3(max_seq + 1)] = true;
    return keep;
}

// backlog gate for starting a new round: enough undelivered traffic, or the
// senders are done and something is still pending
inline bool exceed(bool all_terminated, std::int64_t ell, std::int64_t delta) {
    return (all_terminated && ell > 0) || ell >= delta;
}

struct SyncReply {
    std::int64_t seq = 0;
    std::int64_t obs = 0;
    ReadyVector ready;
};

struct Aggregate {
    ReadyVector all_ready;     // entrywise min of the reported ready vectors
    std::int64_t max_seq = 0;  // max reported seq
    std::int64_t as_min = 0;   // min over all reported seq and obs values
    std::int64_t as_max = 0;   // max over the same set
};

inline Aggregate aggregate_replies(const std::vector<SyncReply>& replies, int n) {
    Aggregate a;
    a.all_ready.assign(static_cast<std::size_t>(n), 0);
    if (replies.empty()) return a;
    a.all_ready = replies.front().ready;
    a.all_ready.resize(static_cast<std::size_t>(n), 0);
    a.max_seq = replies.front().seq;
    a.as_min = std::min(replies.front().seq, replies.front().obs);
    a.as_max = std::max(replies.front().seq, replies.front().obs);
    for (std::size_t i = 1; i < replies.size(); ++i) {
        const SyncReply& r = replies[i];
        ReadyVector rv = r.ready;
        rv.resize(static_cast<std::size_t>(n), 0);
        a.all_ready = entrywise_min(a.all_ready, rv);
        a.max_seq = std::max(a.max_seq, r.seq);
        a.as_min = std::min(a.as_min, std::min(r.seq, r.obs));
        a.as_max = std::max(a.as_max, std::max(r.seq, r.obs));
    }
    return a;
}

}  // namespace tourb

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tourb/fifo_urb.hpp"
#include "tourb/messages.hpp"
#include "tourb/scenario.hpp"

namespace tourb {

enum class ResultKind : std::uint8_t { None, Value, Error };

// One recyclable consensus slot. The protocol is coordinator-based with
// ranked locks, i.e. single-decree Paxos shaped around the failure
// detector: the coordinator is the lowest trusted id and its id is the
// ballot rank.
//
// Every participant continuously reports its proposal/lock state together
// with the highest coordinator rank it has promised to (proposers broadcast
// the report so the round becomes visible everywhere, plain participants
// report to their current coordinator only). A coordinator that holds
// reports promised to its own rank from a majority picks a candidate: the
// highest-ranked reported lock, else the proposal of the lowest-id
// proposer. It then locks the candidate at a majority via pre/pre-ack and
// decides. Participants refuse to pre-ack a rank below their promise, which
// is what makes a decision stable across coordinator failover: any newer
// coordinator's report sample intersects the decided lock majority.
// Decisions are disseminated until every trusted node acknowledged them.
//
// result() stays None until a decision is known and turns Error on internal
// contradictions (conflicting decisions, a proposal for a different round).
// The caller recycles the slot to reuse it.
//
// A round can also starve: nobody holds a proposal or lock for it (it was
// conjured by a corrupted peer, or its sole proposer died before the
// proposal spread), so no coordinator ever finds a candidate. The engine
// ticks active slots once per completed query round; a round still
// undecided after kStallRounds of those resolves to Error locally, which
// is safe because such a round delivered nothing anywhere. Rounds that can
// decide do so orders of magnitude faster, even across coordinator
// failover, so the limit only fires on genuinely dead rounds.
class ConsensusSlot {
public:
    ConsensusSlot(int index, ProcessId self, int n)
        : index_(index), self_(self), n_(n) {
        recycle();
    }

    void propose(std::int64_t seq, const ConsValue& v);
    // participate in a round known only indirectly (peers report it in
    // query replies but none of its consensus traffic reached us), so the
    // starvation clock covers it
    void join(std::int64_t seq);
    void recycle();

    bool active() const { return active_; }
    std::int64_t seq() const { return seq_; }
    ResultKind result_kind() const { return result_; }
    const ConsValue& result() const { return decided_; }
    bool proposed() const { return has_prop_; }

    void on_message(const Message& m, Outbox& out);
    void pump(std::uint64_t trusted, ProcessId coordinator, Outbox& out);

    static constexpr int kStallRounds = 32;
    void tick();

    std::uint64_t state_digest() const;
    void corrupt(std::mt19937_64& rng, const FaultSpec& f);

private:
    void activate(std::int64_t seq);
    void adopt(const ConsValue& v);
    void sanitize();
    int majority() const { return n_ / 2 + 1; }

    int index_;
    ProcessId self_;
    int n_;

    bool active_ = false;
    std::int64_t seq_ = 0;
    bool has_prop_ = false;
    ConsValue prop_;
    int promised_rank_ = -1;  // highest coordinator rank reported to
    int lock_rank_ = -1;
    ConsValue lock_;
    ResultKind result_ = ResultKind::None;
    ConsValue decided_;
    // coordinator bookkeeping
    std::vector<char> rep_seen_;
    std::vector<int> rep_promised_;
    std::vector<char> rep_has_prop_;
    std::vector<ConsValue> rep_prop_;
    std::vector<int> rep_lock_rank_;
    std::vector<ConsValue> rep_lock_;
    int pre_rank_ = -1;  // set once the candidate is pinned (== self)
    ConsValue pre_value_;
    std::uint64_t pre_acks_ = 0;
    std::uint64_t dec_acks_ = 0;
    int stalled_ = 0;  // completed query rounds without a decision
};

}  // namespace tourb

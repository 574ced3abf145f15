#pragma once

#include <array>
#include <vector>

#include "tourb/consensus.hpp"
#include "tourb/detector.hpp"
#include "tourb/fifo_urb.hpp"
#include "tourb/node.hpp"
#include "tourb/smr.hpp"
#include "tourb/to_urb_ops.hpp"

namespace tourb {

struct ToUrbConfig {
    int n = 3;
    std::int64_t delta = 5;
    std::int64_t max_counter = 1 << 16;
    int fd_threshold = 16;
    std::int64_t buffer_bound = 64;
    int wm_period = 2;
    bool smr = false;
};

// One replica of the total-order broadcast stack: failure detector, the
// buffering broadcast layer, three consensus slots, and the query loop that
// ties them together. When cfg.smr is set, decided batches also drive a
// replicated state machine.
class ToUrbNode : public NodeBase {
public:
    ToUrbNode(ProcessId id, const ToUrbConfig& cfg);

    void on_receive(const Message& m) override;
    unsigned pump() override;
    SnapshotRec snapshot() const override;
    void corrupt(std::mt19937_64& rng, const FaultSpec& f) override;
    void reset() override;
    bool try_broadcast(const std::string& payload) override;

    std::int64_t obs_s() const { return obs_s_; }
    std::int64_t next_query() const { return next_query_; }
    std::int64_t seq_now() const { return current_seq(obs_s_, slot_view()); }
    const FifoUrb& urb() const { return urb_; }
    FailureDetector& detector() { return fd_; }
    const SmrState& smr_state() const { return smr_; }
    const std::vector<std::string>& delivered_log() const { return delivered_log_; }

    // exposed for protocol-level tests
    SlotSeqView slot_view() const;
    void handle_sync(const Message& m);

private:
    void start_iteration();
    bool finish_iteration();  // true when obs_s would overflow
    void send_sync_batch();
    bool all_trusted_replied() const;

    ToUrbConfig cfg_;
    FailureDetector fd_;
    FifoUrb urb_;
    std::array<ConsensusSlot, 3> cs_;

    std::int64_t obs_s_ = 0;
    std::int64_t next_query_ = 0;
    bool querying_ = false;
    std::vector<char> replied_;
    std::vector<SyncReply> replies_;

    // last aggregate, kept for snapshots
    std::int64_t last_max_seq_ = 0;
    std::int64_t as_min_ = 0;
    std::int64_t as_max_ = 0;

    SmrState smr_;
    std::vector<std::string> delivered_log_;
    std::uint64_t iter_begin_ = 0;
    int beacon_cd_ = 1;
};

}  // namespace tourb

#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "tourb/node.hpp"
#include "tourb/scenario.hpp"
#include "tourb/to_urb.hpp"
#include "tourb/trace.hpp"

namespace tourb {

struct Channel {
    std::deque<Message> q;
    std::array<int, 16> drop_run{};  // consecutive losses per message kind
};

ToUrbConfig node_cfg(const Scenario& sc);

// lets tests plug their own node type into the same network
using NodeFactory =
    std::function<std::unique_ptr<NodeBase>(ProcessId, const Scenario&)>;

// Deterministic interleaving network. Each step gives one node one action:
// receive one message or send one queued message; a node with nothing queued
// first advances its protocol (pump), which may queue messages. Channels are
// lossy/duplicating/reordering FIFO queues of bounded capacity with a forced
// delivery cap on consecutive same-kind losses. A node's channel to itself
// models local memory and is reliable.
//
// The scheduler is round-robin over live nodes, with an optional window
// during which one node is starved. Crashes are permanent halts. A transient
// fault event corrupts node state and channel contents through each module's
// own corrupt hook, drawn from an RNG stream independent of the channel
// noise stream. When any node reports counter exhaustion the whole system is
// reset in place (nodes wiped, channels flushed) and an epoch marker is
// recorded.
//
// The run stops at max_steps, or earlier once the workload is done and
// nothing new was delivered and every live node reports an empty backlog for
// quiesce_cycles consecutive cycle boundaries.
class Simulator {
public:
    explicit Simulator(const Scenario& sc, NodeFactory factory = {});

    Trace run();
    bool step_once();
    void finalize();

    const Trace& trace() const { return trace_; }
    NodeBase& node(ProcessId i) { return *nodes_[static_cast<std::size_t>(i)]; }
    const Channel& channel(ProcessId a, ProcessId b) const {
        return ch_[static_cast<std::size_t>(a * n_ + b)];
    }
    std::uint64_t now() const { return step_; }
    std::int64_t epochs() const { return epoch_ + 1; }
    bool crashed(ProcessId i) const { return crashed_[static_cast<std::size_t>(i)] != 0; }

private:
    Channel& chan(ProcessId a, ProcessId b) {
        return ch_[static_cast<std::size_t>(a * n_ + b)];
    }
    ProcessId pick_node();
    void node_step(ProcessId i);
    bool do_receive(ProcessId i);
    void do_send(ProcessId i);
    void channel_send(ProcessId src, Message m);
    void maybe_workload(ProcessId i);
    void handle_flags(ProcessId i, unsigned flags);
    void on_boundary();
    bool quiesced_now() const;
    void apply_fault();
    void do_restart();
    void do_crash(ProcessId i);
    std::int64_t scan_inflight(ProcessId i) const;
    Message make_junk(ProcessId src, ProcessId dst);
    void ev(TraceEvent e);
    bool roll(std::mt19937_64& rng, double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
    }

    Scenario sc_;
    int n_;
    std::uint64_t max_steps_;
    std::vector<std::unique_ptr<NodeBase>> nodes_;
    std::vector<Channel> ch_;
    std::mt19937_64 chan_rng_;
    std::mt19937_64 fault_rng_;
    Trace trace_;
    EmitCtx ctx_;
    std::uint64_t step_ = 0;
    bool stopped_ = false;
    bool fault_done_ = false;
    std::uint64_t last_sched_event_ = 0;

    std::vector<char> crashed_;
    std::vector<char> correct_;
    int rr_ = 0;
    std::vector<char> prefer_recv_;
    std::vector<int> recv_cursor_;

    std::vector<std::int64_t> wl_left_;
    std::vector<std::int64_t> wl_cd_;
    std::vector<std::int64_t> wl_sent_;
    std::int64_t wl_total_left_ = 0;

    std::int64_t epoch_ = 0;
    std::int64_t cycle_ord_ = 0;
    std::int64_t last_boundary_step_ = -1;
    std::vector<std::int64_t> iter_begin_step_;
    std::vector<char> done_since_boundary_;
    bool restart_pending_ = false;

    std::int64_t deliver_count_ = 0;
    std::int64_t deliver_at_boundary_ = 0;
    std::int64_t quiesce_run_ = 0;
    std::vector<std::optional<SnapshotRec>> last_snap_;
};

struct CycleAccount {
    // steps at which every correct node had finished an iteration begun
    // after the previous boundary
    std::vector<std::uint64_t> boundaries;
    bool unbounded = false;  // some correct node never completed an iteration
};

// recomputes cycle boundaries inside [from_step, to_step] from the snapshot
// stream; `correct` flags the nodes that never crash
CycleAccount count_async_cycles(const Trace& t, std::uint64_t from_step,
                                std::uint64_t to_step,
                                const std::vector<char>& correct);

std::vector<char> correct_nodes(const Trace& t);

}  // namespace tourb

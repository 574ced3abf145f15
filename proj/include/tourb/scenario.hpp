#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tourb/types.hpp"

namespace tourb {

enum class Fairness { Fair, Adversarial };
enum class FaultShape { None, State, Channels, Full };
enum class TraceLevel { Full, Light };

struct CrashAt {
    ProcessId node = -1;
    std::uint64_t step = 0;
};

struct FaultSpec {
    FaultShape shape = FaultShape::None;
    std::uint64_t step = 0;
    std::vector<ProcessId> nodes;  // empty = every node
    double intensity = 0.8;        // probability each state group is mutated
    std::int64_t bound = 48;       // planted counters/numbers stay in [0, bound]
};

struct Scenario {
    int n = 3;
    int t = 1;
    std::int64_t delta = 5;          // flush threshold
    int channel_capacity = 32;
    std::int64_t max_counter = 1 << 16;
    std::uint64_t seed = 1;
    Fairness fairness = Fairness::Fair;
    ProcessId adv_node = -1;         // starved node in adversarial mode
    std::uint64_t adv_from = 0;
    std::uint64_t adv_len = 0;
    double loss = 0.0;
    double dup = 0.0;
    double reorder = 0.0;
    int drop_cap = 4;                // forced delivery after this many losses
    int fd_threshold = 16;           // silent pumps before suspicion
    std::int64_t buffer_bound = 64;  // per-sender buffer window (B)
    int wm_period = 2;               // pumps between watermark gossip rounds
    std::uint64_t max_steps = 0;     // 0 = derived from workload
    std::int64_t workload = 0;       // total broadcast invocations
    std::int64_t workload_gap = 8;   // pumps between broadcasts per sender
    std::vector<ProcessId> workload_senders;  // empty = all nodes
    bool smr = false;
    std::int64_t smr_append_every = 0;  // every k-th command is an append
    std::vector<CrashAt> crashes;
    FaultSpec fault;
    TraceLevel trace_level = TraceLevel::Full;
    std::int64_t quiesce_cycles = 4;  // settled cycles before the run stops

    std::uint64_t derived_max_steps() const;
    std::string to_text() const;  // canonical form; digest() hashes this
    std::uint64_t digest() const { return fnv1a(to_text()); }
    // returns error text on malformed or inconsistent input
    static std::optional<Scenario> parse(const std::string& text, std::string* err);
    std::optional<std::string> validate() const;  // error text, or nullopt if ok
};

}  // namespace tourb

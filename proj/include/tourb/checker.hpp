#pragma once

#include <string>
#include <vector>

#include "tourb/sim.hpp"
#include "tourb/trace.hpp"

namespace tourb {

struct PropCount {
    std::int64_t full = 0;    // violations anywhere in the epoch
    std::int64_t suffix = 0;  // violations at or after the stabilization step
    std::string detail;       // first offending instance
};

// Verdicts for one epoch (a restart starts a new epoch). Structural
// violations (inconsistent counters, duplicate or unfounded deliveries,
// conflicting decisions, out-of-bound buffers) define the stabilization
// step: the earliest step after the last one of them. Convergence is the
// ordinal of the first cycle boundary at or past that step. Liveness
// properties (completion, uniformity) are only judged in the trace's final
// epoch since earlier epochs are cut short by the restart itself.
struct EpochReport {
    int index = 0;
    bool final_epoch = false;
    std::uint64_t from_step = 0;
    std::uint64_t to_step = 0;

    std::uint64_t stab_step = 0;
    bool stabilized = false;
    std::int64_t convergence_cycles = -1;
    std::int64_t cycles = 0;
    bool cycles_unbounded = false;

    PropCount validity;       // delivered payloads were really broadcast
    PropCount integrity;      // no node delivers the same message twice
    PropCount total_order;    // full: delivery logs form a prefix chain;
                              // suffix: order inversions between node pairs
    PropCount completion;     // broadcasts reach every correct node
    PropCount uniformity;     // anything delivered anywhere reaches every
                              // correct node
    PropCount fifo_order;     // per-sender numbers delivered in send order
    PropCount agreement;      // at most one decided value per round
    PropCount cons_validity;  // every decided value was proposed
    PropCount consistency;    // per-snapshot structural invariants
    PropCount bounded;        // buffer entries and live slots within limits

    PropCount smr_agreement;  // replica state digests agree per round

    std::int64_t ghost_deliveries = 0;  // corruption-born, exempt but counted
    bool standstill = false;            // trailing cycles: agreement predicate
                                        // held and state digests were frozen
    std::uint64_t standstill_from = 0;
    std::int64_t standstill_cycles = 0;

    bool suffix_ok() const;
    bool clean() const;  // stabilized from the first step, zero violations
};

struct CheckReport {
    bool pass = false;  // every epoch converged and stayed clean afterwards
    std::vector<EpochReport> epochs;

    std::string render() const;
};

CheckReport check_trace(const Trace& t);

}  // namespace tourb

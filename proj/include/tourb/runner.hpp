#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tourb/checker.hpp"
#include "tourb/scenario.hpp"
#include "tourb/sim.hpp"

namespace tourb {

struct RunOutcome {
    Trace trace;
    CheckReport report;
    std::uint64_t steps = 0;
    bool hit_step_limit = false;  // ran out of budget before quiescing
};

RunOutcome run_scenario(const Scenario& sc);

struct SweepOutcome {
    int runs = 0;
    int passed = 0;
    std::int64_t max_convergence = -1;  // worst first-epoch convergence, cycles
    std::int64_t total_ghosts = 0;
    int truncated = 0;  // runs that hit the step budget
    std::vector<std::uint64_t> failed_seeds;

    bool pass() const { return passed == runs; }
    std::string render() const;
};

SweepOutcome sweep(const Scenario& base, std::uint64_t seed_from,
                   std::uint64_t seed_to);

}  // namespace tourb

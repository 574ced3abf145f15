#include "tourb/runner.hpp"

#include <algorithm>
#include <sstream>

namespace tourb {

RunOutcome run_scenario(const Scenario& sc) {
    RunOutcome out;
    Simulator sim(sc);
    out.trace = sim.run();
    out.steps = sim.now();
    std::uint64_t budget = sc.max_steps ? sc.max_steps : sc.derived_max_steps();
    out.hit_step_limit = out.steps >= budget;
    out.report = check_trace(out.trace);
    return out;
}

SweepOutcome sweep(const Scenario& base, std::uint64_t seed_from,
                   std::uint64_t seed_to) {
    SweepOutcome agg;
    for (std::uint64_t seed = seed_from; seed <= seed_to; ++seed) {
        Scenario sc = base;
        sc.seed = seed;
        RunOutcome out = run_scenario(sc);
        ++agg.runs;
        if (out.report.pass) ++agg.passed;
        else agg.failed_seeds.push_back(seed);
        if (out.hit_step_limit) ++agg.truncated;
        if (!out.report.epochs.empty()) {
            const EpochReport& first = out.report.epochs.front();
            agg.max_convergence =
                std::max(agg.max_convergence, first.convergence_cycles);
        }
        for (const auto& ep : out.report.epochs)
            agg.total_ghosts += ep.ghost_deliveries;
    }
    return agg;
}

std::string SweepOutcome::render() const {
    std::ostringstream os;
    os << "runs " << runs << " passed " << passed << " truncated " << truncated
       << " max-convergence-cycles " << max_convergence << " ghosts "
       << total_ghosts << "\n";
    if (!failed_seeds.empty()) {
        os << "failed-seeds";
        for (auto s : failed_seeds) os << " " << s;
        os << "\n";
    }
    return os.str();
}

}  // namespace tourb

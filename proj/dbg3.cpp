#include <cstdio>
#include <cstdlib>
#include "tourb/runner.hpp"
using namespace tourb;

int main(int argc, char** argv) {
    Scenario sc;
    sc.n = 3;
    sc.workload = argc > 1 ? std::atoll(argv[1]) : 40;
    sc.workload_gap = argc > 2 ? std::atoll(argv[2]) : 25;
    sc.max_counter = argc > 3 ? std::atoll(argv[3]) : 64;
    sc.quiesce_cycles = 2;
    sc.seed = argc > 4 ? std::atoll(argv[4]) : 3;
    if (argc > 5) sc.max_steps = std::atoll(argv[5]);
    RunOutcome out = run_scenario(sc);
    int restarts = 0;
    std::uint64_t first_restart = 0, last_bcast = 0;
    int dl_after = 0;
    for (const auto& e : out.trace.events) {
        if (e.kind == EventKind::GlobalRestart) {
            if (!restarts) first_restart = e.step;
            ++restarts;
        }
        if (e.kind == EventKind::ToBroadcast) last_bcast = e.step;
    }
    for (const auto& e : out.trace.events)
        if (e.kind == EventKind::ToDeliver && restarts && e.step > first_restart)
            ++dl_after;
    std::printf(
        "steps=%llu limit=%d restarts=%d first=%llu last_bcast=%llu dl_after=%d "
        "epochs=%zu pass=%d\n",
        (unsigned long long)out.steps, (int)out.hit_step_limit, restarts,
        (unsigned long long)first_restart, (unsigned long long)last_bcast,
        dl_after, out.report.epochs.size(), (int)out.report.pass);
    return 0;
}

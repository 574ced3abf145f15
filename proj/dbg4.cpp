#include <chrono>
#include <cstdio>
#include <cstdlib>
#include "tourb/runner.hpp"
using namespace tourb;

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 7;
    Scenario sc;
    sc.n = n;
    sc.t = (n - 1) / 2;
    sc.loss = 0.10;
    sc.dup = 0.05;
    sc.reorder = 0.25;
    sc.workload = 500;
    sc.workload_gap = 6;
    sc.seed = 1;
    sc.trace_level = TraceLevel::Light;
    for (int k = 0; k < sc.t; ++k)
        sc.crashes.push_back({(ProcessId)(n - 1 - k), 2000 + 1700 * (std::uint64_t)k});
    auto t0 = std::chrono::steady_clock::now();
    RunOutcome out = run_scenario(sc);
    double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("n=%d steps=%llu limit=%d epochs=%zu pass=%d secs=%.2f\n", n,
                (unsigned long long)out.steps, (int)out.hit_step_limit,
                out.report.epochs.size(), (int)out.report.pass, el);
    if (!out.report.epochs.empty()) {
        const EpochReport& ep = out.report.epochs[0];
        std::printf(
            "  val=%lld int=%lld to=%lld comp=%lld uni=%lld ghosts=%lld "
            "stab=%d conv=%lld cycles=%lld\n",
            (long long)ep.validity.full, (long long)ep.integrity.full,
            (long long)ep.total_order.full, (long long)ep.completion.full,
            (long long)ep.uniformity.full, (long long)ep.ghost_deliveries,
            (int)ep.stabilized, (long long)ep.convergence_cycles,
            (long long)ep.cycles);
    }
    return 0;
}

#include <cstdio>
#include <cstdlib>
#include <vector>
#include <string>
#include "tourb/runner.hpp"
using namespace tourb;

int main(int argc, char** argv) {
    Scenario sc;
    sc.n = argc > 1 ? std::atoi(argv[1]) : 3;
    sc.t = (sc.n - 1) / 2;
    sc.loss = 0.10;
    sc.dup = 0.05;
    sc.reorder = 0.25;
    sc.workload = 500;
    sc.workload_gap = 6;
    sc.seed = argc > 2 ? std::atoll(argv[2]) : 2;
    sc.trace_level = TraceLevel::Light;
    for (int k = 0; k < sc.t; ++k)
        sc.crashes.push_back({(ProcessId)(sc.n - 1 - k), 2000 + 1700 * (std::uint64_t)k});
    RunOutcome out = run_scenario(sc);
    std::printf("steps=%llu limit=%d pass=%d\n", (unsigned long long)out.steps,
                (int)out.hit_step_limit, (int)out.report.pass);
    const auto& ep = out.report.epochs.front();
    auto pr = [](const char* nm, const PropCount& p) {
        if (p.full || p.suffix)
            std::printf("  %s: full=%lld suffix=%lld  %s\n", nm, (long long)p.full,
                        (long long)p.suffix, p.detail.c_str());
    };
    pr("validity", ep.validity); pr("integrity", ep.integrity);
    pr("total_order", ep.total_order); pr("completion", ep.completion);
    pr("uniformity", ep.uniformity); pr("fifo_order", ep.fifo_order);
    pr("consistency", ep.consistency); pr("bounded", ep.bounded);
    std::printf("ghosts=%lld\n", (long long)ep.ghost_deliveries);

    // delivery logs per node, find first divergence between each pair
    struct D { std::uint64_t step; int sender; long long num; };
    std::vector<std::vector<D>> logs(sc.n);
    for (const auto& e : out.trace.events)
        if (e.kind == EventKind::ToDeliver && e.node >= 0 && e.node < sc.n)
            logs[e.node].push_back({e.step, (int)e.peer, (long long)e.a});
    for (int i = 0; i < sc.n; ++i)
        std::printf("node %d delivered %zu\n", i, logs[i].size());
    for (int x = 0; x < sc.n; ++x)
        for (int y = x + 1; y < sc.n; ++y) {
            std::size_t m = std::min(logs[x].size(), logs[y].size());
            std::size_t k = 0;
            while (k < m && logs[x][k].sender == logs[y][k].sender &&
                   logs[x][k].num == logs[y][k].num)
                ++k;
            if (k < m) {
                std::printf("nodes %d/%d diverge at index %zu:\n", x, y, k);
                for (std::size_t j = (k > 3 ? k - 3 : 0); j < std::min(m, k + 4); ++j)
                    std::printf("  [%zu] node%d (%d,%lld)@%llu   node%d (%d,%lld)@%llu\n",
                                j, x, logs[x][j].sender, logs[x][j].num,
                                (unsigned long long)logs[x][j].step, y,
                                logs[y][j].sender, logs[y][j].num,
                                (unsigned long long)logs[y][j].step);
            } else if (logs[x].size() != logs[y].size()) {
                std::printf("nodes %d/%d: prefix ok, lengths %zu vs %zu; next at longer:\n",
                            x, y, logs[x].size(), logs[y].size());
                const auto& L = logs[x].size() > logs[y].size() ? logs[x] : logs[y];
                for (std::size_t j = m; j < std::min(L.size(), m + 3); ++j)
                    std::printf("  [%zu] (%d,%lld)@%llu\n", j, L[j].sender, L[j].num,
                                (unsigned long long)L[j].step);
            }
        }
    return 0;
}

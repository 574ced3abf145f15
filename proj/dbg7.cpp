#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>
#include "tourb/runner.hpp"
using namespace tourb;

int main(int argc, char** argv) {
    Scenario sc;
    sc.n = argc > 1 ? std::atoi(argv[1]) : 3;
    sc.t = (sc.n - 1) / 2;
    sc.workload = argc > 2 ? std::atoll(argv[2]) : 24;
    sc.workload_gap = 6;
    sc.seed = argc > 3 ? std::atoll(argv[3]) : 1;
    sc.trace_level = TraceLevel::Light;
    sc.fault.shape = FaultShape::Full;
    sc.fault.step = 0;
    sc.fault.intensity = 0.9;
    RunOutcome out = run_scenario(sc);
    std::printf("steps=%llu pass=%d stab=%llu\n", (unsigned long long)out.steps,
                (int)out.report.pass,
                (unsigned long long)out.report.epochs[0].stab_step);
    struct Info {
        long long bstep = -1;
        int bnode = -1;
        std::map<int, unsigned long long> dl;
        bool ghost = false;
    };
    std::map<std::pair<int, long long>, Info> msgs;
    for (const auto& e : out.trace.events) {
        if (e.kind == EventKind::ToBroadcast) {
            auto& in = msgs[{e.node, e.a}];
            in.bstep = (long long)e.step;
            in.bnode = e.node;
        } else if (e.kind == EventKind::ToDeliver) {
            auto& in = msgs[{(int)e.peer, e.a}];
            if (e.ghost) {
                in.ghost = true;
                continue;
            }
            if (!in.dl.count(e.node)) in.dl[e.node] = e.step;
        }
    }
    for (const auto& [id, in] : msgs) {
        bool missing = false;
        for (int i = 0; i < sc.n; ++i)
            if (!in.dl.count(i)) missing = true;
        if (!missing || in.dl.empty()) continue;
        std::printf("msg(%d,%lld) bstep=%lld%s:", id.first,
                    (long long)id.second, in.bstep,
                    in.ghost ? " GHOSTED" : "");
        for (int i = 0; i < sc.n; ++i) {
            if (in.dl.count(i))
                std::printf(" n%d@%llu", i, in.dl.at(i));
            else
                std::printf(" n%d@MISS", i);
        }
        std::printf("\n");
    }
    return 0;
}

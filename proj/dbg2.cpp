#include <cstdio>
#include <map>
#include "tourb/runner.hpp"
using namespace tourb;

int main() {
    Scenario sc;
    sc.n = 3;
    sc.workload = 9;
    sc.workload_gap = 3;
    sc.seed = 5;
    RunOutcome out = run_scenario(sc);
    const SnapshotRec* last[3] = {nullptr, nullptr, nullptr};
    for (const auto& s : out.trace.snaps)
        if (s.node >= 0 && s.node < 3) last[s.node] = &s;
    for (int i = 0; i < 3; ++i) {
        const SnapshotRec* s = last[i];
        std::printf("node %d obs=%lld get=%lld slots:", i, (long long)s->obs_s,
                    (long long)s->get_seq);
        for (int k = 0; k < 3; ++k)
            std::printf(" [%d act=%d seq=%lld res=%lld dig=%llx]", k,
                        (int)s->cs[k].active, (long long)s->cs[k].seq,
                        (long long)s->cs[k].result,
                        (unsigned long long)s->cs[k].value_digest);
        std::printf("\n");
    }
    // what consensus traffic flows in the last stretch
    std::map<int, int> sends;
    std::uint64_t cutoff = out.steps > 2000 ? out.steps - 2000 : 0;
    for (const auto& e : out.trace.events) {
        if (e.step < cutoff) continue;
        if (e.kind == EventKind::Send) sends[(int)e.a]++;
    }
    for (auto [k, c] : sends)
        std::printf("wire kind %d x%d in last 2000 steps\n", k, c);
    return 0;
}

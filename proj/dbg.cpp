#include <cstdio>
#include "tourb/runner.hpp"
using namespace tourb;

int main(int argc, char** argv) {
    Scenario sc;
    sc.n = 3;
    sc.workload = 9;
    sc.workload_gap = 3;
    sc.seed = 5;
    if (argc > 1 && argv[1][0] == 'x') {  // exhaustion variant
        sc.workload = 40;
        sc.workload_gap = 2;
        sc.max_counter = 64;
        sc.quiesce_cycles = 2;
        sc.seed = 3;
    }
    RunOutcome out = run_scenario(sc);
    std::printf("steps=%llu hit_limit=%d epochs=%zu pass=%d\n",
                (unsigned long long)out.steps, (int)out.hit_step_limit,
                out.report.epochs.size(), (int)out.report.pass);
    int dl[8] = {0};
    for (const auto& e : out.trace.events) {
        if (e.kind == EventKind::ToDeliver) ++dl[e.node];
        if (e.kind == EventKind::ToBroadcast)
            std::printf("bcast step=%llu node=%d a=%lld %s\n",
                        (unsigned long long)e.step, e.node, (long long)e.a,
                        e.text.c_str());
    }
    std::printf("deliver counts: %d %d %d\n", dl[0], dl[1], dl[2]);
    // last snapshot per node
    const SnapshotRec* last[3] = {nullptr, nullptr, nullptr};
    for (const auto& s : out.trace.snaps)
        if (s.node >= 0 && s.node < 3) last[s.node] = &s;
    for (int i = 0; i < 3; ++i) {
        const SnapshotRec* s = last[i];
        if (!s) continue;
        std::printf(
            "node %d: step=%llu obs=%lld get=%lld maxseq=%lld nq=%lld ell=%lld "
            "term=%d buffered=%lld slots=%lld\n",
            i, (unsigned long long)s->step, (long long)s->obs_s,
            (long long)s->get_seq, (long long)s->last_max_seq,
            (long long)s->next_query, (long long)s->ell, (int)s->all_term,
            (long long)s->buffered, (long long)s->active_slots);
    }
    // tail of deliveries per node
    for (int i = 0; i < 3; ++i) {
        std::printf("node %d log:", i);
        for (const auto& e : out.trace.events)
            if (e.kind == EventKind::ToDeliver && e.node == i)
                std::printf(" %s", e.text.c_str());
        std::printf("\n");
    }
    return 0;
}
// extra probe built as separate binary

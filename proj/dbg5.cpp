#include <cstdio>
#include <cstdlib>
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
    std::printf("steps=%llu limit=%d epochs=%zu pass=%d\n",
                (unsigned long long)out.steps, (int)out.hit_step_limit,
                out.report.epochs.size(), (int)out.report.pass);
    for (const auto& ep : out.report.epochs) {
        std::printf("epoch %d [%llu,%llu] stab=%d@%llu conv=%lld/%lld suffix=%d ghosts=%lld standstill=%d\n",
            ep.index, (unsigned long long)ep.from_step, (unsigned long long)ep.to_step,
            (int)ep.stabilized, (unsigned long long)ep.stab_step,
            (long long)ep.convergence_cycles, (long long)ep.cycles,
            (int)ep.suffix_ok(), (long long)ep.ghost_deliveries, (int)ep.standstill);
        auto pr = [](const char* nm, const PropCount& p) {
            if (p.full || p.suffix)
                std::printf("  %s: full=%lld suffix=%lld  %s\n", nm,
                            (long long)p.full, (long long)p.suffix, p.detail.c_str());
        };
        pr("validity", ep.validity); pr("integrity", ep.integrity);
        pr("total_order", ep.total_order); pr("completion", ep.completion);
        pr("uniformity", ep.uniformity); pr("fifo_order", ep.fifo_order);
        pr("agreement", ep.agreement); pr("cons_validity", ep.cons_validity);
        pr("consistency", ep.consistency); pr("bounded", ep.bounded);
        pr("smr_agreement", ep.smr_agreement);
    }
    std::vector<int> dl(sc.n, 0), bc(sc.n, 0);
    for (const auto& e : out.trace.events) {
        if ((e.kind == EventKind::ToDeliver || e.kind == EventKind::ToBroadcast) &&
            (e.node < 0 || e.node >= sc.n)) {
            std::printf("BAD EVENT step=%llu kind=%d node=%d peer=%d a=%lld text=%s ghost=%d\n",
                        (unsigned long long)e.step, (int)e.kind, (int)e.node,
                        (int)e.peer, (long long)e.a, e.text.c_str(), (int)e.ghost);
            continue;
        }
        if (e.kind == EventKind::ToDeliver) ++dl[e.node];
        if (e.kind == EventKind::ToBroadcast) ++bc[e.node];
    }
    std::printf("bcasts: %d %d %d  deliv: %d %d %d\n", bc[0], bc[1], bc[2],
                dl[0], dl[1], dl[2]);
    std::vector<const SnapshotRec*> last(sc.n, nullptr);
    for (const auto& s : out.trace.snaps)
        if (s.node >= 0 && s.node < sc.n) last[s.node] = &s;
    for (int i = 0; i < sc.n; ++i) {
        const SnapshotRec* s = last[i];
        if (!s) { std::printf("node %d: no snaps\n", i); continue; }
        std::printf(
            "node %d: step=%llu obs=%lld get=%lld maxseq=%lld asmin=%lld "
            "asmax=%lld nq=%lld ell=%lld term=%d buf=%lld slots=%lld bviol=%lld\n",
            i, (unsigned long long)s->step, (long long)s->obs_s,
            (long long)s->get_seq, (long long)s->last_max_seq,
            (long long)s->allseq_min, (long long)s->allseq_max,
            (long long)s->next_query, (long long)s->ell, (int)s->all_term,
            (long long)s->buffered, (long long)s->active_slots,
            (long long)s->bulk_violations);
        for (int k = 0; k < 3; ++k)
            if (s->cs[k].active)
                std::printf("   slot %d seq=%lld res=%lld\n", k,
                            (long long)s->cs[k].seq, (long long)s->cs[k].result);
    }
    return 0;
}

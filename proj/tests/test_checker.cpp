#include "doctest.h"
#include "tourb/checker.hpp"

using namespace tourb;

namespace {

// hand-built traces: two nodes, everything well-formed unless a case says so
struct TraceBuilder {
    Trace t;

    explicit TraceBuilder(int n = 2) {
        t.meta.format_version = 1;
        t.meta.n = n;
        t.meta.t = (n - 1) / 2;
        t.meta.delta = 5;
        t.meta.buffer_bound = 64;
        t.meta.max_counter = 1 << 16;
        t.meta.seed = 1;
    }

    void bc(ProcessId node, std::int64_t num, const std::string& p,
            std::uint64_t step) {
        TraceEvent e;
        e.kind = EventKind::ToBroadcast;
        e.step = step;
        e.node = node;
        e.a = num;
        e.text = p;
        t.events.push_back(std::move(e));
    }

    void dl(ProcessId node, ProcessId sender, std::int64_t num,
            const std::string& p, std::uint64_t step, bool ghost = false) {
        TraceEvent e;
        e.kind = EventKind::ToDeliver;
        e.step = step;
        e.node = node;
        e.peer = sender;
        e.a = num;
        e.text = p;
        e.ghost = ghost;
        t.events.push_back(std::move(e));
    }

    void propose(std::int64_t seq, std::uint64_t digest, std::uint64_t step) {
        TraceEvent e;
        e.kind = EventKind::Propose;
        e.step = step;
        e.node = 0;
        e.a = seq;
        e.e = digest;
        t.events.push_back(std::move(e));
    }

    void restart(std::uint64_t step) {
        TraceEvent e;
        e.kind = EventKind::GlobalRestart;
        e.step = step;
        e.a = 1;
        t.events.push_back(std::move(e));
    }

    SnapshotRec& snap(ProcessId node, std::uint64_t begin, std::uint64_t step,
                      std::int64_t z) {
        SnapshotRec s;
        s.node = node;
        s.step = step;
        s.iter_begin = begin;
        s.obs_s = z;
        s.next_query = static_cast<std::int64_t>(step);
        s.get_seq = z;
        s.last_max_seq = z;
        s.allseq_min = z;
        s.allseq_max = z;
        s.ell = 0;
        s.all_term = true;
        s.state_digest = 0xd00d + static_cast<std::uint64_t>(node);
        t.snaps.push_back(s);
        return t.snaps.back();
    }

    // two settled iterations per node, enough for two cycle boundaries
    void settled_tail(std::int64_t z) {
        snap(0, 8, 10, z);
        snap(1, 9, 11, z);
        snap(0, 18, 20, z);
        snap(1, 19, 21, z);
    }
};

}  // namespace

TEST_CASE("a well-formed trace passes clean") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.dl(0, 0, 1, "a", 5);
    b.dl(1, 0, 1, "a", 6);
    b.settled_tail(1);
    CheckReport r = check_trace(b.t);
    CHECK(r.pass);
    REQUIRE(r.epochs.size() == 1);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.clean());
    CHECK(ep.suffix_ok());
    CHECK(ep.stabilized);
    CHECK(ep.stab_step == 0);
    CHECK(ep.convergence_cycles == 1);
    CHECK(ep.cycles == 2);
    CHECK(ep.standstill);
    CHECK(ep.standstill_cycles == 2);
}

TEST_CASE("re-delivery is an integrity violation that fixes the stab point") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.dl(0, 0, 1, "a", 5);
    b.dl(1, 0, 1, "a", 6);
    b.dl(1, 0, 1, "a", 15);  // again
    b.settled_tail(1);
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.integrity.full == 1);
    CHECK(ep.integrity.suffix == 0);
    CHECK(ep.stab_step == 16);
    CHECK(ep.convergence_cycles == 2);  // only the second boundary is past it
    CHECK_FALSE(ep.clean());
    CHECK(ep.suffix_ok());
    CHECK(r.pass);
}

TEST_CASE("delivering something never broadcast violates validity") {
    TraceBuilder b;
    b.dl(0, 1, 7, "phantom", 5);
    b.dl(1, 1, 7, "phantom", 6);
    b.settled_tail(0);
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.validity.full == 2);
    CHECK(ep.uniformity.full == 0);  // it did reach everyone
    CHECK_FALSE(ep.clean());
}

TEST_CASE("ghost deliveries are exempt from validity but counted") {
    TraceBuilder b;
    b.dl(0, 1, 7, "", 5, true);
    b.dl(1, 1, 7, "", 6, true);
    b.settled_tail(0);
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.validity.full == 0);
    CHECK(ep.uniformity.full == 0);
    CHECK(ep.ghost_deliveries == 2);
    CHECK_FALSE(ep.clean());
    CHECK(ep.suffix_ok());
}

TEST_CASE("a payload mismatch against the broadcast violates validity") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.dl(0, 0, 1, "a", 5);
    b.dl(1, 0, 1, "tampered", 6);
    b.settled_tail(1);
    CheckReport r = check_trace(b.t);
    CHECK(r.epochs[0].validity.full == 1);
}

TEST_CASE("an order conflict after stabilization fails the run") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.bc(1, 1, "b", 2);
    b.dl(0, 0, 1, "a", 5);
    b.dl(0, 1, 1, "b", 6);
    b.dl(1, 1, 1, "b", 5);
    b.dl(1, 0, 1, "a", 6);
    b.settled_tail(2);
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.total_order.full >= 1);
    CHECK(ep.total_order.suffix == 1);
    CHECK_FALSE(ep.suffix_ok());
    CHECK_FALSE(r.pass);
}

TEST_CASE("missing a correct broadcast in the final epoch violates completion") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.dl(0, 0, 1, "a", 5);  // node 1 never gets it
    b.settled_tail(1);
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.completion.full == 1);
    CHECK(ep.uniformity.full == 1);
    CHECK_FALSE(r.pass);
}

TEST_CASE("stream order inversions violate the session guarantee") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.bc(0, 2, "b", 2);
    b.dl(0, 0, 2, "b", 5);
    b.dl(0, 0, 1, "a", 6);  // stream 0 went backwards
    b.dl(1, 0, 2, "b", 5);
    b.dl(1, 0, 1, "a", 6);
    b.settled_tail(2);
    CheckReport r = check_trace(b.t);
    CHECK(r.epochs[0].fifo_order.full == 2);
}

TEST_CASE("snapshot counters out of shape are a consistency violation") {
    TraceBuilder b;
    b.settled_tail(1);
    SnapshotRec& s = b.snap(0, 28, 30, 1);
    s.get_seq = 3;  // recomputing from the slots gives 1
    b.snap(1, 29, 31, 1);
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.consistency.full >= 1);
    CHECK(ep.stab_step == 31);
    CHECK_FALSE(ep.clean());
}

TEST_CASE("buffer overruns violate boundedness") {
    TraceBuilder b;
    b.settled_tail(0);
    SnapshotRec& s = b.snap(0, 28, 30, 0);
    s.buffered = 2 * 64 + 1;  // n * bound is the limit
    b.snap(1, 29, 31, 0);
    CheckReport r = check_trace(b.t);
    CHECK(r.epochs[0].bounded.full == 1);
}

TEST_CASE("two decided values for one round violate agreement") {
    TraceBuilder b;
    b.propose(4, 111, 3);
    b.propose(4, 222, 3);
    b.settled_tail(1);
    SnapshotRec& s0 = b.snap(0, 28, 30, 3);
    s0.get_seq = 4;
    s0.cs[1] = {true, 4, 1, 111, false};
    s0.active_slots = 1;
    SnapshotRec& s1 = b.snap(1, 29, 31, 3);
    s1.get_seq = 4;
    s1.cs[1] = {true, 4, 1, 222, false};
    s1.active_slots = 1;
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.agreement.full == 1);
    CHECK(ep.cons_validity.full == 0);  // both values were proposed
}

TEST_CASE("deciding an unproposed value violates consensus validity") {
    TraceBuilder b;
    b.settled_tail(1);
    SnapshotRec& s = b.snap(0, 28, 30, 3);
    s.get_seq = 4;
    s.cs[1] = {true, 4, 1, 333, false};
    s.active_slots = 1;
    CheckReport r = check_trace(b.t);
    CHECK(r.epochs[0].cons_validity.full == 1);

    TraceBuilder g;
    g.settled_tail(1);
    SnapshotRec& gs = g.snap(0, 28, 30, 3);
    gs.get_seq = 4;
    gs.cs[1] = {true, 4, 1, 333, true};  // planted decision, exempt
    gs.active_slots = 1;
    CHECK(check_trace(g.t).epochs[0].cons_validity.full == 0);
}

TEST_CASE("a restart splits the trace into separately judged epochs") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);  // never delivered, but epoch 0 is not final
    b.snap(0, 8, 10, 0);
    b.snap(1, 9, 11, 0);
    b.snap(0, 18, 20, 0);
    b.snap(1, 19, 21, 0);
    b.restart(50);
    b.bc(0, 1, "b", 60);
    b.dl(0, 0, 1, "b", 70);
    b.dl(1, 0, 1, "b", 71);
    b.snap(0, 88, 90, 1);
    b.snap(1, 89, 91, 1);
    b.snap(0, 98, 100, 1);
    b.snap(1, 99, 101, 1);
    CheckReport r = check_trace(b.t);
    REQUIRE(r.epochs.size() == 2);
    CHECK_FALSE(r.epochs[0].final_epoch);
    CHECK(r.epochs[1].final_epoch);
    CHECK(r.epochs[0].to_step == 50);
    CHECK(r.epochs[1].from_step == 51);
    CHECK(r.epochs[0].completion.full == 0);  // liveness deferred to the end
    CHECK(r.epochs[1].completion.full == 0);
    CHECK(r.pass);
}

TEST_CASE("a correct node that never completes an iteration is unbounded") {
    TraceBuilder b;
    b.bc(0, 1, "a", 1);
    b.dl(0, 0, 1, "a", 5);
    b.dl(1, 0, 1, "a", 6);
    b.snap(0, 8, 10, 1);
    b.snap(0, 18, 20, 1);  // node 1 never snapshots
    CheckReport r = check_trace(b.t);
    const EpochReport& ep = r.epochs[0];
    CHECK(ep.cycles_unbounded);
    CHECK_FALSE(ep.stabilized);
    CHECK_FALSE(r.pass);
}

TEST_CASE("the report renders with counts and details") {
    TraceBuilder b;
    b.settled_tail(0);
    b.dl(0, 1, 7, "phantom", 50);  // after the last boundary: never stabilizes
    CheckReport r = check_trace(b.t);
    std::string out = r.render();
    CHECK(out.find("tourb-report-1") == 0);
    CHECK(out.find("pass 0") != std::string::npos);
    CHECK(out.find("validity 1 0") != std::string::npos);
    CHECK(out.find("delivered unsent") != std::string::npos);
}

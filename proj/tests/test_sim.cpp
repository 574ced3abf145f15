#include <map>
#include <set>

#include "doctest.h"
#include "tourb/sim.hpp"

using namespace tourb;

namespace {

Scenario base_scn() {
    Scenario sc;
    sc.n = 3;
    sc.t = 1;
    sc.workload = 6;
    sc.workload_gap = 4;
    sc.seed = 11;
    return sc;
}

std::vector<std::string> deliveries_at(const Trace& t, ProcessId node) {
    std::vector<std::string> out;
    for (const auto& e : t.events)
        if (e.kind == EventKind::ToDeliver && e.node == node)
            out.push_back(std::to_string(e.peer) + ":" + std::to_string(e.a) +
                          ":" + e.text);
    return out;
}

}  // namespace

TEST_CASE("same seed same trace, different seed different trace") {
    Scenario sc = base_scn();
    sc.loss = 0.1;
    sc.dup = 0.05;
    sc.reorder = 0.2;
    Trace a = Simulator(sc).run();
    Trace b = Simulator(sc).run();
    CHECK(a.digest() == b.digest());
    sc.seed = 12;
    Trace c = Simulator(sc).run();
    CHECK(a.digest() != c.digest());
}

TEST_CASE("the loopback channel never loses or duplicates") {
    Scenario sc = base_scn();
    sc.loss = 0.3;
    sc.dup = 0.2;
    sc.max_steps = 20000;
    Trace t = Simulator(sc).run();
    for (const auto& e : t.events) {
        if (e.kind == EventKind::Drop || e.kind == EventKind::Duplicate)
            CHECK(e.node != e.peer);
    }
}

TEST_CASE("consecutive losses per channel and kind respect the cap") {
    Scenario sc = base_scn();
    sc.loss = 0.9;
    sc.drop_cap = 3;
    sc.workload = 2;
    sc.max_steps = 30000;
    Trace t = Simulator(sc).run();
    // a lost send emits its loss drop right after the send event, so pairing
    // adjacent events reconstructs which attempts the channel accepted
    std::map<std::tuple<int, int, std::int64_t>, int> run;
    bool any_cross_receive = false;
    const auto& evs = t.events;
    for (std::size_t k = 0; k < evs.size(); ++k) {
        const TraceEvent& e = evs[k];
        if (e.kind == EventKind::Receive && e.node != e.peer)
            any_cross_receive = true;
        if (e.kind != EventKind::Send || e.node == e.peer) continue;
        bool lost = k + 1 < evs.size() && evs[k + 1].kind == EventKind::Drop &&
                    evs[k + 1].b == 0 && evs[k + 1].node == e.node &&
                    evs[k + 1].peer == e.peer;
        int& r = run[{e.node, e.peer, e.a}];
        if (lost) {
            ++r;
            CHECK(r <= sc.drop_cap);
        } else {
            r = 0;
        }
    }
    CHECK(any_cross_receive);
}

TEST_CASE("channels drop the newest message at capacity") {
    Scenario sc = base_scn();
    sc.channel_capacity = 2;
    sc.workload = 4;
    sc.max_steps = 4000;
    Simulator sim(sc);
    bool saw_capacity_drop = false;
    while (sim.step_once()) {
        for (ProcessId a = 0; a < sc.n; ++a)
            for (ProcessId b = 0; b < sc.n; ++b)
                REQUIRE(sim.channel(a, b).q.size() <= 2);
    }
    sim.finalize();
    for (const auto& e : sim.trace().events)
        if (e.kind == EventKind::Drop && e.b == 1) saw_capacity_drop = true;
    CHECK(saw_capacity_drop);
}

TEST_CASE("a crashed node goes silent") {
    Scenario sc = base_scn();
    sc.crashes.push_back({2, 300});
    Trace t = Simulator(sc).run();
    bool crash_seen = false;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::Crash) {
            CHECK(e.node == 2);
            CHECK(e.step == 300);
            crash_seen = true;
            continue;
        }
        if (e.step > 300) CHECK(e.node != 2);
    }
    CHECK(crash_seen);
    auto correct = correct_nodes(t);
    CHECK(correct == std::vector<char>{1, 1, 0});
    // survivors still deliver the full workload of senders 0 and 1
    CHECK(deliveries_at(t, 0) == deliveries_at(t, 1));
    CHECK(!deliveries_at(t, 0).empty());
}

TEST_CASE("adversarial fairness starves the chosen node for the window") {
    Scenario sc = base_scn();
    sc.fairness = Fairness::Adversarial;
    sc.adv_node = 1;
    sc.adv_from = 0;
    sc.adv_len = 400;
    sc.max_steps = 6000;
    Trace t = Simulator(sc).run();
    bool node1_later = false;
    for (const auto& e : t.events) {
        if (e.node != 1) continue;
        CHECK(e.step >= 400);
        if (e.step >= 400) node1_later = true;
    }
    CHECK(node1_later);  // it wakes up once the window closes
}

TEST_CASE("recomputed cycle boundaries match the online markers") {
    Scenario sc = base_scn();
    Trace t = Simulator(sc).run();
    std::vector<std::uint64_t> online;
    std::uint64_t last_step = 0;
    for (const auto& e : t.events) {
        if (e.kind == EventKind::CycleBoundary) online.push_back(e.step);
        last_step = std::max(last_step, e.step);
    }
    REQUIRE(!online.empty());
    auto acc = count_async_cycles(t, 0, last_step, std::vector<char>(3, 1));
    CHECK_FALSE(acc.unbounded);
    CHECK(acc.boundaries == online);
}

TEST_CASE("a light trace records the same run without wire noise") {
    Scenario sc = base_scn();
    sc.loss = 0.1;
    Trace full = Simulator(sc).run();
    sc.trace_level = TraceLevel::Light;
    Trace light = Simulator(sc).run();
    CHECK(light.meta.light);
    std::size_t wire = 0;
    for (const auto& e : light.events) {
        if (e.kind == EventKind::Send || e.kind == EventKind::Receive ||
            e.kind == EventKind::Drop || e.kind == EventKind::Duplicate)
            ++wire;
    }
    CHECK(wire == 0);
    CHECK(light.events.size() < full.events.size());
    CHECK(light.snaps.size() == full.snaps.size());
    for (ProcessId i = 0; i < 3; ++i)
        CHECK(deliveries_at(light, i) == deliveries_at(full, i));
}

TEST_CASE("the whole configured workload is broadcast exactly once") {
    Scenario sc = base_scn();
    sc.workload = 7;
    sc.workload_senders = {0, 2};
    Trace t = Simulator(sc).run();
    std::map<int, int> per_node;
    std::set<std::string> payloads;
    for (const auto& e : t.events)
        if (e.kind == EventKind::ToBroadcast) {
            ++per_node[e.node];
            CHECK(payloads.insert(e.text).second);
        }
    CHECK(per_node[0] == 4);  // remainder goes to the earlier sender
    CHECK(per_node[2] == 3);
    CHECK(per_node.count(1) == 0);
}

TEST_CASE("transient channel faults are recorded in the trace") {
    Scenario sc = base_scn();
    sc.fault.shape = FaultShape::Channels;
    sc.fault.step = 200;
    sc.fault.intensity = 1.0;
    sc.fault.bound = 8;
    sc.max_steps = 20000;
    Trace t = Simulator(sc).run();
    bool summary = false;
    for (const auto& e : t.events)
        if (e.kind == EventKind::TransientFault && e.node == -1) {
            CHECK(e.text == "channels");
            CHECK(e.step == 200);
            summary = true;
        }
    CHECK(summary);
}

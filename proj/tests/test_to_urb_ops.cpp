#include "doctest.h"
#include "tourb/to_urb_ops.hpp"

using namespace tourb;

namespace {
SlotSeqView slots(std::optional<std::int64_t> a, std::optional<std::int64_t> b,
                  std::optional<std::int64_t> c) {
    return {a, b, c};
}
}  // namespace

TEST_CASE("active slot listing and the current round") {
    CHECK(act_cs(slots({}, {}, {})).empty());
    auto v = act_cs(slots(3, {}, 4));
    REQUIRE(v.size() == 2);
    CHECK(v[0] == 3);
    CHECK(v[1] == 4);

    CHECK(current_seq(7, slots({}, {}, {})) == 7);
    CHECK(current_seq(4, slots(3, {}, 5)) == 5);
    CHECK(current_seq(9, slots(3, {}, 5)) == 9);
}

TEST_CASE("stale slot detection") {
    // clean shapes
    CHECK_FALSE(needs_stale_cleanup(0, slots({}, {}, {})));
    CHECK_FALSE(needs_stale_cleanup(4, slots({}, {}, 5)));     // 5 mod 3 == 2
    CHECK_FALSE(needs_stale_cleanup(4, slots(3, 4, {})));      // span 1, obs within
    // slot index disagrees with its round
    CHECK(needs_stale_cleanup(0, slots(1, {}, {})));           // 1 mod 3 != 0
    CHECK(needs_stale_cleanup(0, slots({}, {}, 4)));           // 4 mod 3 != 2
    // every live round already passed
    CHECK(needs_stale_cleanup(6, slots(3, 4, {})));
    // live rounds more than one apart
    CHECK(needs_stale_cleanup(3, slots(3, 7, {})));
}

TEST_CASE("round reconciliation keeps clean shapes and jumps otherwise") {
    CHECK(reconcile_rounds(4, 5, 5) == 4);  // decided round pending delivery
    CHECK(reconcile_rounds(4, 4, 5) == 4);  // proposal seen elsewhere
    CHECK(reconcile_rounds(4, 4, 4) == 4);  // settled
    CHECK(reconcile_rounds(2, 7, 7) == 7);  // gap: adopt the largest
    CHECK(reconcile_rounds(9, 3, 5) == 9);
    CHECK(reconcile_rounds(2, 3, 9) == 9);
}

TEST_CASE("recycling keeps only the slots the run still needs") {
    // settled and everyone agrees: keep current and the next round's slot
    auto k = recycle_keep(4, 4, 4, true);
    CHECK(k[4 % 3]);
    CHECK(k[5 % 3]);
    CHECK_FALSE(k[(4 + 2) % 3]);
    // disagreement: only the current round survives
    k = recycle_keep(4, 4, 4, false);
    CHECK(k[4 % 3]);
    CHECK_FALSE(k[5 % 3]);
    CHECK_FALSE(k[0]);
}

TEST_CASE("recycle keep set, delivery pending case spelled out") {
    // obs 4, seq 5, max 5, all agree: keep 4 mod 3 = 1, 5 mod 3 = 2, 6 mod 3 = 0
    auto k = recycle_keep(4, 5, 5, true);
    CHECK(k[1]);
    CHECK(k[2]);
    CHECK(k[0]);  // the slot for round 6 stays available
}

TEST_CASE("flush gate") {
    CHECK_FALSE(exceed(false, 2, 5));
    CHECK(exceed(false, 5, 5));
    CHECK(exceed(false, 9, 5));
    CHECK(exceed(true, 1, 5));   // senders done, something pending
    CHECK_FALSE(exceed(true, 0, 5));
    CHECK_FALSE(exceed(false, 0, 1));
}

TEST_CASE("aggregation over query replies") {
    std::vector<SyncReply> xs;
    xs.push_back({4, 4, {3, 5}});
    xs.push_back({4, 4, {4, 2}});
    Aggregate a = aggregate_replies(xs, 2);
    CHECK(a.all_ready == ReadyVector{3, 2});
    CHECK(a.max_seq == 4);
    CHECK(a.as_min == 4);
    CHECK(a.as_max == 4);

    xs.push_back({6, 5, {9, 9}});
    a = aggregate_replies(xs, 2);
    CHECK(a.all_ready == ReadyVector{3, 2});
    CHECK(a.max_seq == 6);
    CHECK(a.as_min == 4);
    CHECK(a.as_max == 6);

    // replies shorter than n are padded with zeros
    xs.clear();
    xs.push_back({1, 1, {7}});
    a = aggregate_replies(xs, 3);
    CHECK(a.all_ready == ReadyVector{7, 0, 0});

    a = aggregate_replies({}, 3);
    CHECK(a.all_ready == ReadyVector{0, 0, 0});
    CHECK(a.max_seq == 0);
}

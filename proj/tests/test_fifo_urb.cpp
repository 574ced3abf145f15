#include "doctest.h"
#include "tourb/fifo_urb.hpp"

using namespace tourb;

namespace {

constexpr std::uint64_t kAll3 = 0b111;

Message data(ProcessId sender, std::int64_t num, const std::string& payload) {
    Message m;
    m.kind = MsgKind::UrbData;
    m.sender = sender;
    m.num = num;
    m.payload = payload;
    return m;
}

Message ack(ProcessId from, ProcessId sender, std::int64_t num) {
    Message m;
    m.kind = MsgKind::UrbAck;
    m.src = from;
    m.sender = sender;
    m.num = num;
    return m;
}

Message wm(ProcessId from, std::int64_t head, ReadyVector ready) {
    Message m;
    m.kind = MsgKind::UrbWm;
    m.src = from;
    m.head = head;
    m.ready = std::move(ready);
    return m;
}

int count_kind(const Outbox& out, MsgKind k) {
    int c = 0;
    for (const auto& m : out)
        if (m.kind == k) ++c;
    return c;
}

}  // namespace

TEST_CASE("fresh state") {
    FifoUrb u(0, 3, 8, 2);
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 0, 0});
    CHECK(u.min_ready(kAll3) == ReadyVector{1, 1, 1});
    CHECK(u.ell(kAll3) == 0);
    CHECK(u.all_have_terminated(kAll3));
    CHECK(u.next_send() == 1);
    CHECK(u.buffered_entries() == 0);
}

TEST_CASE("numbering and backpressure") {
    FifoUrb u(0, 3, 4, 2);
    CHECK(u.to_broadcast("a") == 1);
    CHECK(u.to_broadcast("b") == 2);
    CHECK(u.to_broadcast("c") == 3);
    CHECK(u.to_broadcast("d") == 4);
    CHECK_FALSE(u.to_broadcast("e").has_value());  // window full, nothing delivered
    CHECK(u.next_send() == 5);
    CHECK_FALSE(u.all_have_terminated(kAll3));
}

TEST_CASE("data is acknowledged to everyone, duplicates re-acknowledged") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);
    CHECK(count_kind(out, MsgKind::UrbAck) == 2);  // to 1 and 2
    u.on_data(data(1, 1, "x"), out);
    CHECK(count_kind(out, MsgKind::UrbAck) == 4);
    CHECK(u.buffered_entries() == 1);
    // duplicate with a different payload does not overwrite the first copy
    u.on_data(data(1, 1, "y"), out);
    std::uint64_t before = u.state_digest();
    u.on_data(data(1, 1, "y"), out);
    CHECK(u.state_digest() == before);
}

TEST_CASE("acks from every trusted node make an entry ready") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);  // acks now {0, 1}: holder plus sender
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 0, 0});
    u.on_ack(ack(2, 1, 1));
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 1, 0});
    CHECK(u.ell(kAll3) == 1);
    // with node 2 distrusted the entry was already ready before its ack
    CHECK(u.max_ready(0b011) == ReadyVector{0, 1, 0});
}

TEST_CASE("gossiped watermarks cover entries whose acks were lost") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);
    u.on_data(data(1, 2, "y"), out);
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 0, 0});
    // the sender itself reports both entries stable
    u.on_wm(wm(1, 2, {0, 2, 0}));
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 2, 0});
    // readiness needs the payload: number 3 is covered but not held
    u.on_wm(wm(1, 3, {0, 3, 0}));
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 2, 0});
}

TEST_CASE("ready scan stops at gaps") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);
    u.on_data(data(1, 3, "z"), out);
    u.on_wm(wm(1, 3, {0, 3, 0}));
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 1, 0});  // 2 is missing
    u.on_data(data(1, 2, "y"), out);
    CHECK(u.max_ready(kAll3) == ReadyVector{0, 3, 0});
}

TEST_CASE("bulk read delivers in number-then-sender order and advances") {
    FifoUrb u(2, 3, 8, 2);
    Outbox out;
    u.on_data(data(0, 1, "a0"), out);
    u.on_data(data(1, 1, "b1"), out);
    u.on_data(data(1, 2, "b2"), out);
    u.on_ack(ack(1, 0, 1));
    u.on_ack(ack(0, 1, 1));
    u.on_ack(ack(0, 1, 2));
    CHECK(u.max_ready(kAll3) == ReadyVector{1, 2, 0});
    auto got = u.bulk_read({1, 2, 0}, kAll3);
    REQUIRE(got.size() == 3);
    CHECK(got[0].sender == 0);
    CHECK(got[0].num == 1);
    CHECK(got[0].payload == "a0");
    CHECK(got[1].sender == 1);
    CHECK(got[1].num == 1);
    CHECK(got[2].sender == 1);
    CHECK(got[2].num == 2);
    CHECK(u.delivered(0) == 1);
    CHECK(u.delivered(1) == 2);
    CHECK(u.buffered_entries() == 0);
    // same bound again: nothing new, no violation
    CHECK(u.bulk_read({1, 2, 0}, kAll3).empty());
    CHECK(u.bulk_violations() == 0);
}

TEST_CASE("bulk read past the local view counts a violation") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);
    auto got = u.bulk_read({0, 3, 0}, kAll3);
    CHECK(got.size() == 1);  // only the held payload
    CHECK(u.delivered(1) == 3);
    CHECK(u.bulk_violations() == 1);
    // late original arrives below the watermark: rejected, no re-delivery
    u.on_data(data(1, 2, "y"), out);
    CHECK(u.buffered_entries() == 0);
}

TEST_CASE("sender watermark snaps a corrupt delivered count down") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);
    u.bulk_read({0, 1, 0}, kAll3);
    CHECK(u.delivered(1) == 1);
    // sender says its stream never reached 1: trust it
    u.on_wm(wm(1, 0, {0, 0, 0}));
    CHECK(u.delivered(1) == 0);
    u.on_data(data(1, 1, "x"), out);
    CHECK(u.buffered_entries() == 1);
}

TEST_CASE("pump gossips watermarks on its period") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.pump(kAll3, out);  // first pump always gossips
    CHECK(count_kind(out, MsgKind::UrbWm) == 2);
    out.clear();
    u.pump(kAll3, out);
    CHECK(count_kind(out, MsgKind::UrbWm) == 0);
    u.pump(kAll3, out);
    CHECK(count_kind(out, MsgKind::UrbWm) == 2);
}

TEST_CASE("pump retransmits unstable entries to trusted holdouts") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.to_broadcast("a");
    u.pump(kAll3, out);
    // both peers owe an ack, and the refresh lap pushes the entry too
    int data_msgs = count_kind(out, MsgKind::UrbData);
    CHECK(data_msgs == 4);
    out.clear();
    u.on_ack(ack(1, 0, 1));
    u.pump(kAll3, out);  // off the watermark cadence: holdouts only
    data_msgs = 0;
    for (const auto& m : out)
        if (m.kind == MsgKind::UrbData) {
            ++data_msgs;
            CHECK(m.dst == 2);
        }
    CHECK(data_msgs == 1);
    out.clear();
    u.on_ack(ack(2, 0, 1));
    CHECK(u.all_have_terminated(kAll3));
    u.pump(kAll3, out);
    // fully acked silences the holdout loop; only the refresh lap remains
    CHECK(count_kind(out, MsgKind::UrbData) == 2);
}

TEST_CASE("the refresh lap stops once the entry is delivered") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.to_broadcast("a");
    u.on_ack(ack(1, 0, 1));
    u.on_ack(ack(2, 0, 1));
    ReadyVector all{1, 0, 0};
    u.bulk_read(all, kAll3);
    u.pump(kAll3, out);
    u.pump(kAll3, out);
    u.pump(kAll3, out);  // covers both cadence phases
    CHECK(count_kind(out, MsgKind::UrbData) == 0);
}

TEST_CASE("an author copy replaces a held replica, a relayed copy does not") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    Message d = data(1, 1, "real");
    d.planted = true;  // stands in for a fault-written byte pattern
    d.src = 2;
    u.on_data(d, out);
    Message relay = data(1, 1, "relayed");
    relay.src = 2;
    u.on_data(relay, out);
    ReadyVector all{0, 1, 0};
    std::vector<Delivery> got = u.bulk_read(all, kAll3);
    REQUIRE(got.size() == 1);
    CHECK(got[0].payload == "real");
    CHECK(got[0].ghost);

    FifoUrb v(0, 3, 8, 2);
    v.on_data(d, out);
    Message owner = data(1, 1, "owner");
    owner.src = 1;
    v.on_data(owner, out);
    got = v.bulk_read(all, kAll3);
    REQUIRE(got.size() == 1);
    CHECK(got[0].payload == "owner");
    CHECK(!got[0].ghost);
}

TEST_CASE("evidence of own numbers in flight fills the gap with planted blanks") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    // an ack for own number 5 arrives out of nowhere
    u.on_ack(ack(1, 0, 5));
    CHECK(u.next_send() == 6);
    u.pump(kAll3, out);
    CHECK(u.buffered_entries() == 5);
    bool planted_seen = false;
    for (const auto& m : out)
        if (m.kind == MsgKind::UrbData && m.planted) planted_seen = true;
    CHECK(planted_seen);
    // the planted blanks become deliverable once acknowledged
    for (std::int64_t x = 1; x <= 5; ++x) {
        u.on_ack(ack(1, 0, x));
        u.on_ack(ack(2, 0, x));
    }
    CHECK(u.max_ready(kAll3) == ReadyVector{5, 0, 0});
    auto got = u.bulk_read({5, 0, 0}, kAll3);
    CHECK(got.size() == 5);
    for (const auto& d : got) CHECK(d.ghost);
}

TEST_CASE("window rejects data far ahead") {
    FifoUrb u(0, 3, 4, 2);
    Outbox out;
    u.on_data(data(1, 9, "x"), out);
    CHECK(u.buffered_entries() == 0);
    CHECK(count_kind(out, MsgKind::UrbAck) == 0);  // no ack for rejected data
    u.on_data(data(1, -2, "x"), out);
    CHECK(u.buffered_entries() == 0);
}

TEST_CASE("reset restores the fresh state") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.to_broadcast("a");
    u.on_data(data(1, 1, "x"), out);
    std::uint64_t fresh = FifoUrb(0, 3, 8, 2).state_digest();
    CHECK(u.state_digest() != fresh);
    u.reset();
    CHECK(u.state_digest() == fresh);
}

TEST_CASE("authoring skips past a delivered mark that outran the numbering") {
    FifoUrb u(0, 3, 8, 2);
    u.bulk_read({7, 0, 0}, kAll3);  // a decided bound can outrun the local view
    CHECK(u.delivered(0) == 7);
    // a number at or below the mark would be erased before its first send
    CHECK(u.to_broadcast("a") == 8);
}

TEST_CASE("a foreign entry wedged at the frontier is eventually discarded") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);  // never becomes ready: no third ack, no gossip
    for (int r = 0; r < FifoUrb::kStuckRounds - 1; ++r) u.tick(kAll3);
    CHECK(u.buffered_entries() == 1);
    u.tick(kAll3);
    CHECK(u.buffered_entries() == 0);
    CHECK(u.delivered(1) == 1);  // skipped over, not delivered
}

TEST_CASE("a stream stuck behind an unheld gap jumps to its next held entry") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 5, "z"), out);
    for (int r = 0; r < FifoUrb::kStuckRounds; ++r) u.tick(kAll3);
    CHECK(u.delivered(1) == 4);
    CHECK(u.buffered_entries() == 1);  // the held entry itself survives
}

TEST_CASE("a blocker that becomes ready is delivered, not discarded") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.on_data(data(1, 1, "x"), out);
    for (int r = 0; r < FifoUrb::kStuckRounds - 1; ++r) u.tick(kAll3);
    u.on_ack(ack(2, 1, 1));  // readiness moves the frontier, resetting the probe
    for (int r = 0; r < 2 * FifoUrb::kStuckRounds; ++r) u.tick(kAll3);
    CHECK(u.buffered_entries() == 1);
    auto got = u.bulk_read({0, 1, 0}, kAll3);
    REQUIRE(got.size() == 1);
    CHECK(got[0].payload == "x");
}

TEST_CASE("the own stream is left to retransmission, never healed over") {
    FifoUrb u(0, 3, 8, 2);
    Outbox out;
    u.to_broadcast("a");  // unacknowledged: looks exactly like a wedged blocker
    for (int r = 0; r < 3 * FifoUrb::kStuckRounds; ++r) u.tick(kAll3);
    CHECK(u.buffered_entries() == 1);
    CHECK(u.delivered(0) == 0);
}

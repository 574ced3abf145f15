#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tourb/types.hpp"

namespace tourb {

enum class EventKind : std::uint8_t {
    ToBroadcast,          // node broadcast a payload: a=num, text=payload
    ToDeliver,            // total-order delivery:  peer=sender, a=num, text=payload
    FifoDeliverInternal,  // broadcast layer handed a message up (same fields)
    Send,                 // node=src, peer=dst, a=msg kind, b/c/d=kind fields
    Receive,              // node=dst, peer=src, a=msg kind, b/c/d=kind fields
    Drop,                 // node=src, peer=dst, a=msg kind, b=0 loss / 1 capacity
    Duplicate,            // node=src, peer=dst, a=msg kind
    Crash,                // node halts
    TransientFault,       // node corrupted (node=-1: channels), text=summary
    StateSnapshot,        // a=index into Trace::snaps
    CycleBoundary,        // a=cycle ordinal within epoch, node unused
    Propose,              // a=seq, b=ell, c=delta, d=all_have_terminated, e=value digest
    GlobalRestart,        // a=epoch ordinal just started
};

const char* event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from(const std::string& name);

struct TraceEvent {
    std::uint64_t step = 0;
    EventKind kind = EventKind::ToBroadcast;
    ProcessId node = -1;
    ProcessId peer = -1;
    std::int64_t a = 0, b = 0, c = 0, d = 0;
    std::uint64_t e = 0;
    bool ghost = false;  // content originated in injected corruption
    std::string text;    // payload token; never contains spaces
};

struct SlotSnap {
    bool active = false;
    std::int64_t seq = 0;
    int result = 0;  // 0 undecided, 1 value, 2 error
    std::uint64_t value_digest = 0;
    bool ghost = false;  // decided value traces back to injected corruption
};

// Per-node state summary, emitted at the end of every protocol iteration.
struct SnapshotRec {
    ProcessId node = -1;
    std::uint64_t step = 0;
    std::uint64_t iter_begin = 0;
    std::int64_t obs_s = 0;
    std::int64_t next_query = 0;
    std::int64_t get_seq = 0;
    std::int64_t last_max_seq = 0;
    std::int64_t allseq_min = 0;
    std::int64_t allseq_max = 0;
    SlotSnap cs[3];
    std::int64_t max_inflight_qn = 0;  // query numbers in transit from/to node
    std::int64_t buffered = 0;         // broadcast-layer buffer entries held
    std::int64_t active_slots = 0;
    std::int64_t ell = 0;              // ready-but-undelivered message count
    bool all_term = false;
    std::int64_t bulk_violations = 0;
    std::uint64_t state_digest = 0;    // protocol state excluding next_query
    bool smr_on = false;
    std::int64_t smr_counter = 0;
    std::uint64_t smr_digest = 0;
};

struct TraceMeta {
    int format_version = 1;
    int n = 0;
    int t = 0;
    std::int64_t delta = 0;
    std::int64_t buffer_bound = 0;
    std::int64_t max_counter = 0;
    std::uint64_t seed = 0;
    bool smr = false;
    bool light = false;  // send/receive/drop/duplicate events omitted
    std::uint64_t scenario_digest = 0;
};

struct Trace {
    TraceMeta meta;
    std::vector<TraceEvent> events;
    std::vector<SnapshotRec> snaps;

    std::string serialize() const;
    std::uint64_t digest() const { return fnv1a(serialize()); }
    // returns error text on malformed input
    static std::optional<Trace> parse(const std::string& text, std::string* err);
};

}  // namespace tourb

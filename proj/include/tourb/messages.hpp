#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tourb/smr.hpp"
#include "tourb/types.hpp"

namespace tourb {

enum class MsgKind : std::uint8_t {
    UrbData,     // broadcast payload: sender, num, payload
    UrbAck,      // acknowledgement:   sender, num (acker = src)
    UrbWm,       // watermark gossip:  head/tail of own stream + ready vector
    Sync,        // query:             qn
    SyncAck,     // reply:             qn, seq (=getSeq), obs (=obsS), ready (=maxReady)
    ConsReport,  // consensus slot report: cseq + optional proposal/lock/decision
    ConsPre,     // coordinator candidate: cseq, rank, value
    ConsPreAck,  // lock acknowledgement: cseq, rank
    ConsDec,     // decision dissemination: cseq, value
    ConsDecAck,  // decision acknowledgement: cseq
    Beacon,      // failure-detector heartbeat
};

const char* msg_kind_name(MsgKind k);

// Value moved through the consensus layer. Algorithm rounds agree on a
// ready vector (the delivery bound); in replicated-state-machine mode the
// value also carries the proposer's automaton state.
struct ConsValue {
    ReadyVector ready;
    bool has_state = false;
    SmrState state;
    bool planted = false;  // provenance: originated in injected corruption

    bool operator==(const ConsValue&) const = default;

    std::uint64_t digest() const {
        std::uint64_t h = digest_ready(ready);
        if (has_state) h = fnv1a_mix(state.digest(), h);
        return h;
    }
};

struct Message {
    MsgKind kind = MsgKind::Beacon;
    ProcessId src = -1;
    ProcessId dst = -1;
    bool planted = false;

    // URB fields
    ProcessId sender = -1;      // stream owner (UrbData/UrbAck)
    std::int64_t num = 0;       // message number within the stream
    std::string payload;        // UrbData only
    std::int64_t head = 0;      // UrbWm: highest number assigned by src
    std::int64_t tail = 0;      // UrbWm: lowest own number src still buffers
    ReadyVector ready;          // UrbWm: src's ready watermarks; SyncAck: maxReady

    // query fields
    std::int64_t qn = 0;        // Sync/SyncAck
    std::int64_t seq = 0;       // SyncAck: getSeq at the replier
    std::int64_t obs = 0;       // SyncAck: obsS at the replier

    // consensus fields
    std::int64_t cseq = 0;      // round number the slot is bound to
    int rank = -1;              // ConsPre/ConsPreAck: coordinator rank
    bool has_prop = false;      // ConsReport: src proposed
    ConsValue prop;             //   its proposal
    int lock_rank = -1;         // ConsReport: -1 = no lock held
    ConsValue lock;             //   locked value
    bool has_dec = false;       // ConsReport/ConsDec: decision attached
    ConsValue dec;              //   decided value

    std::string render() const;  // compact one-line summary for traces
};

}  // namespace tourb

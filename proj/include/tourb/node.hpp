#pragma once

#include <random>

#include "tourb/fifo_urb.hpp"
#include "tourb/messages.hpp"
#include "tourb/scenario.hpp"
#include "tourb/trace.hpp"

namespace tourb {

// sink the simulator wires into every node before each step
struct EmitCtx {
    Trace* trace = nullptr;
    std::uint64_t step = 0;
};

// pump() result bits
enum StepFlags : unsigned {
    kStepNone = 0,
    kIterBegin = 1,  // a new protocol iteration started at this pump
    kIterDone = 2,   // an iteration finished; the simulator snapshots state
    kOverflow = 4,   // a counter hit max_counter; global restart requested
};

class NodeBase {
public:
    NodeBase(ProcessId id, int n) : id_(id), n_(n) {}
    virtual ~NodeBase() = default;

    ProcessId id() const { return id_; }
    Outbox& outbox() { return outbox_; }
    void set_ctx(EmitCtx* c) { ctx_ = c; }

    virtual void on_receive(const Message& m) = 0;
    virtual unsigned pump() = 0;
    virtual SnapshotRec snapshot() const = 0;
    virtual void corrupt(std::mt19937_64& rng, const FaultSpec& f) = 0;
    virtual void reset() = 0;
    // application entry; returns false under backpressure
    virtual bool try_broadcast(const std::string&) { return true; }

protected:
    void emit(TraceEvent ev) {
        if (!ctx_ || !ctx_->trace) return;
        ev.step = ctx_->step;
        ctx_->trace->events.push_back(std::move(ev));
    }

    ProcessId id_;
    int n_;
    Outbox outbox_;
    EmitCtx* ctx_ = nullptr;
};

}  // namespace tourb

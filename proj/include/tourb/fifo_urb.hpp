#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tourb/messages.hpp"
#include "tourb/scenario.hpp"
#include "tourb/types.hpp"

namespace tourb {

using Outbox = std::deque<Message>;

struct Delivery {
    ProcessId sender = -1;
    std::int64_t num = 0;
    std::string payload;
    bool ghost = false;
};

// FIFO uniform reliable broadcast with bounded per-sender buffers.
//
// Every node keeps, per sender stream: a delivered watermark, and a window
// of at most `buffer_bound` entries above it. An entry is ready once all
// trusted nodes acknowledged it, or once some trusted node gossips a ready
// watermark covering it (acks imply the acker stored the payload, so a
// covered entry held locally is safe to deliver). Senders retransmit their
// own unstable entries and gossip watermarks; receivers acknowledge every
// data message to everyone, which doubles as ack retransmission.
//
// Recovery from corrupted state leans on three rules: entries outside the
// per-stream window are discarded, a sender fills gaps in its own stream
// with explicitly planted empty messages so receivers never stall on a
// number that no one can retransmit, and a receiver snaps its delivered
// watermark down when the sender's gossiped high bound contradicts it.
class FifoUrb {
public:
    FifoUrb(ProcessId self, int n, std::int64_t buffer_bound, int wm_period)
        : self_(self), n_(n), bound_(buffer_bound), wm_period_(wm_period) {
        reset();
    }

    // assigns and buffers the next message number; nullopt under backpressure
    std::optional<std::int64_t> to_broadcast(const std::string& payload);

    void on_data(const Message& m, Outbox& out);
    void on_ack(const Message& m);
    void on_wm(const Message& m);

    // once per protocol pump: sanitation, watermark gossip, retransmission
    void pump(std::uint64_t trusted, Outbox& out);

    // once per completed query round. A foreign stream whose frontier sits on
    // the same blocker for this many rounds while later entries keep waiting
    // behind it can never be unblocked by retransmission: the owner erased
    // the number, died holding it, or a corrupted acknowledgement set is
    // suppressing resends. The blocker is skipped (and a wedged buffered
    // entry dropped) so the stream can drain. Healthy blockers resolve in a
    // round or two, and idle streams are left alone.
    static constexpr int kStuckRounds = 12;
    void tick(std::uint64_t trusted);

    ReadyVector max_ready(std::uint64_t trusted) const;
    ReadyVector min_ready(std::uint64_t trusted) const;
    std::int64_t ell(std::uint64_t trusted) const;
    bool all_have_terminated(std::uint64_t trusted) const;

    // deliver every buffered payload with number <= bound on its stream, in
    // (number, sender) order, and advance the delivered watermarks to bound
    std::vector<Delivery> bulk_read(const ReadyVector& bound, std::uint64_t trusted);

    std::int64_t next_send() const { return next_send_; }
    std::int64_t delivered(ProcessId k) const { return delivered_[k]; }
    std::int64_t buffered_entries() const;
    std::int64_t bulk_violations() const { return bulk_viol_; }
    std::uint64_t state_digest() const;

    void corrupt(std::mt19937_64& rng, const FaultSpec& f);
    void reset();

private:
    struct Entry {
        bool has_payload = false;
        std::string payload;
        std::uint64_t acks = 0;
        bool planted = false;
    };

    bool entry_ready(ProcessId k, std::int64_t num, const Entry& e,
                     std::uint64_t trusted) const;
    std::int64_t gossip_stable(ProcessId k, std::uint64_t trusted) const;
    void sanitize();

    struct StallProbe {
        std::int64_t w = -1;    // frontier when last observed
        std::int64_t key = -1;  // first buffered number above it
        int held = -1;
        int rounds = 0;
    };

    ProcessId self_;
    int n_;
    std::int64_t bound_;
    int wm_period_;
    int wm_countdown_ = 1;
    std::int64_t refresh_num_ = 0;  // rotating cursor of the refresh lap
    std::int64_t next_send_ = 1;
    std::int64_t bulk_viol_ = 0;
    std::vector<std::int64_t> delivered_;
    std::vector<std::map<std::int64_t, Entry>> buf_;
    std::vector<std::int64_t> peer_head_;     // per peer: its own-stream high
    std::vector<ReadyVector> peer_wm_;        // per peer: its ready watermarks
    std::vector<StallProbe> stall_;           // per stream, foreign only
};

}  // namespace tourb

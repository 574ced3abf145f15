#include "tourb/fifo_urb.hpp"

#include <algorithm>

namespace tourb {

void FifoUrb::reset() {
    next_send_ = 1;
    bulk_viol_ = 0;
    wm_countdown_ = 1;
    delivered_.assign(n_, 0);
    buf_.assign(n_, {});
    peer_head_.assign(n_, 0);
    peer_wm_.assign(n_, ReadyVector(n_, 0));
    stall_.assign(n_, {});
}

std::optional<std::int64_t> FifoUrb::to_broadcast(const std::string& payload) {
    // authoring can run before the first pump gets to sanitize, so restore
    // the numbering invariant here: a number at or below the own delivered
    // mark would be erased before it was ever transmitted
    if (next_send_ <= delivered_[self_]) next_send_ = delivered_[self_] + 1;
    if (next_send_ > delivered_[self_] + bound_) return std::nullopt;
    std::int64_t num = next_send_++;
    // a fresh number means a fresh entry: leftover acks under a recycled key
    // are lies that would suppress retransmission of the new payload
    Entry& e = buf_[self_][num];
    e = {};
    e.has_payload = true;
    e.payload = payload;
    e.acks = 1ull << self_;
    return num;  // first transmission happens on the next pump
}

void FifoUrb::on_data(const Message& m, Outbox& out) {
    ProcessId s = m.sender;
    if (s < 0 || s >= n_ || m.num < 1) return;
    if (m.num > delivered_[s] + bound_) return;  // outside window: no ack yet
    if (s == self_ && m.num >= next_send_) next_send_ = m.num + 1;
    if (m.num > delivered_[s]) {
        Entry& e = buf_[s][m.num];
        if (!e.has_payload) {
            e.has_payload = true;
            e.payload = m.payload;
            e.planted = e.planted || m.planted;
        } else if (m.src == s) {
            // the author's own copy supersedes whatever is held under this
            // number: a fault can write a different byte pattern into the
            // slot, and the ack it earns suppresses every retransmission
            // that would have fixed it
            e.payload = m.payload;
            e.planted = m.planted;
        }
        // holding the data vouches for us and for the sender
        e.acks |= (1ull << self_) | (1ull << s);
    }
    // acknowledge to everyone, re-acking duplicates; this is how lost acks
    // eventually reach every bookkeeper
    for (ProcessId j = 0; j < n_; ++j) {
        if (j == self_) continue;
        Message ack;
        ack.kind = MsgKind::UrbAck;
        ack.dst = j;
        ack.sender = s;
        ack.num = m.num;
        out.push_back(std::move(ack));
    }
}

void FifoUrb::on_ack(const Message& m) {
    ProcessId s = m.sender;
    if (s < 0 || s >= n_ || m.num < 1 || m.src < 0 || m.src >= n_) return;
    if (s == self_ && m.num >= next_send_) next_send_ = m.num + 1;
    if (m.num <= delivered_[s] || m.num > delivered_[s] + bound_) return;
    buf_[s][m.num].acks |= 1ull << m.src;  // placeholder entry until data lands
}

void FifoUrb::on_wm(const Message& m) {
    ProcessId j = m.src;
    if (j < 0 || j >= n_ || j == self_) return;
    peer_head_[j] = std::max<std::int64_t>(0, m.head);
    peer_wm_[j] = m.ready;
    peer_wm_[j].resize(n_, 0);
    for (auto& v : peer_wm_[j]) v = std::max<std::int64_t>(0, v);
    // the sender is authoritative for its own stream: nothing above its head
    // exists, and a delivered watermark above it is corruption
    delivered_[j] = std::min(delivered_[j], peer_head_[j]);
    auto& stream = buf_[j];
    for (auto it = stream.upper_bound(peer_head_[j]); it != stream.end();) {
        if (!it->second.has_payload) it = stream.erase(it);
        else ++it;
    }
}

std::int64_t FifoUrb::gossip_stable(ProcessId k, std::uint64_t trusted) const {
    std::int64_t best = 0;
    for (ProcessId j = 0; j < n_; ++j) {
        if (j == self_ || !(trusted & (1ull << j))) continue;
        if (peer_wm_[j][k] > best) best = peer_wm_[j][k];
    }
    return best;
}

bool FifoUrb::entry_ready(ProcessId k, std::int64_t num, const Entry& e,
                          std::uint64_t trusted) const {
    if (!e.has_payload) return false;
    if ((e.acks & trusted) == trusted) return true;
    return gossip_stable(k, trusted) >= num;
}

ReadyVector FifoUrb::max_ready(std::uint64_t trusted) const {
    ReadyVector out(n_, 0);
    for (ProcessId k = 0; k < n_; ++k) {
        std::int64_t w = delivered_[k];
        const auto& stream = buf_[k];
        for (auto it = stream.upper_bound(w); it != stream.end(); ++it) {
            if (it->first != w + 1) break;
            if (!entry_ready(k, it->first, it->second, trusted)) break;
            w = it->first;
        }
        out[k] = w;
    }
    return out;
}

ReadyVector FifoUrb::min_ready(std::uint64_t trusted) const {
    ReadyVector mr = max_ready(trusted);
    ReadyVector out(n_, 0);
    for (ProcessId k = 0; k < n_; ++k)
        out[k] = std::min(delivered_[k], mr[k]) + 1;
    return out;
}

std::int64_t FifoUrb::ell(std::uint64_t trusted) const {
    ReadyVector mr = max_ready(trusted);
    std::int64_t total = 0;
    for (ProcessId k = 0; k < n_; ++k)
        total += std::max<std::int64_t>(0, mr[k] - delivered_[k]);
    return total;
}

bool FifoUrb::all_have_terminated(std::uint64_t trusted) const {
    std::int64_t stable = gossip_stable(self_, trusted);
    for (const auto& [num, e] : buf_[self_]) {
        if (!e.has_payload) continue;
        if ((e.acks & trusted) != trusted && num > stable) return false;
    }
    return true;
}

std::vector<Delivery> FifoUrb::bulk_read(const ReadyVector& bound,
                                         std::uint64_t trusted) {
    ReadyVector mr = max_ready(trusted);
    std::vector<Delivery> out;
    for (ProcessId k = 0; k < n_ && k < int(bound.size()); ++k) {
        std::int64_t b = bound[k];
        if (b > mr[k]) ++bulk_viol_;  // decided bound outran this node's view
        if (b <= delivered_[k]) continue;
        auto& stream = buf_[k];
        auto it = stream.upper_bound(delivered_[k]);
        while (it != stream.end() && it->first <= b) {
            if (it->second.has_payload)
                out.push_back({k, it->first, it->second.payload, it->second.planted});
            it = stream.erase(it);
        }
        delivered_[k] = b;
    }
    std::sort(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) {
        if (a.num != b.num) return a.num < b.num;
        return a.sender < b.sender;
    });
    return out;
}

std::int64_t FifoUrb::buffered_entries() const {
    std::int64_t total = 0;
    for (const auto& s : buf_) total += static_cast<std::int64_t>(s.size());
    return total;
}

void FifoUrb::sanitize() {
    if (next_send_ < 1) next_send_ = 1;
    for (ProcessId k = 0; k < n_; ++k)
        if (delivered_[k] < 0) delivered_[k] = 0;
    // own stream: keep the window anchored to what we can still retransmit
    if (delivered_[self_] < next_send_ - 1 - bound_)
        delivered_[self_] = next_send_ - 1 - bound_;
    if (!buf_[self_].empty())
        next_send_ = std::max(next_send_, buf_[self_].rbegin()->first + 1);
    next_send_ = std::max(next_send_, delivered_[self_] + 1);
    const std::uint64_t all_mask = n_ >= 64 ? ~0ull : (1ull << n_) - 1;
    for (ProcessId k = 0; k < n_; ++k) {
        auto& stream = buf_[k];
        for (auto it = stream.begin(); it != stream.end();) {
            if (it->first <= delivered_[k] || it->first > delivered_[k] + bound_) {
                it = stream.erase(it);
                continue;
            }
            it->second.acks &= all_mask;
            ++it;
        }
    }
    // fill gaps in the own stream with planted empties: numbers nobody holds
    // can never be retransmitted, so they must not stall receivers
    for (std::int64_t x = delivered_[self_] + 1; x < next_send_; ++x) {
        Entry& e = buf_[self_][x];
        if (!e.has_payload) {
            e.has_payload = true;
            e.payload.clear();
            e.planted = true;
        }
        e.acks |= 1ull << self_;
    }
}

void FifoUrb::pump(std::uint64_t trusted, Outbox& out) {
    sanitize();
    if (--wm_countdown_ <= 0) {
        wm_countdown_ = wm_period_;
        ReadyVector mine = max_ready(trusted);
        for (ProcessId j = 0; j < n_; ++j) {
            if (j == self_) continue;
            Message wm;
            wm.kind = MsgKind::UrbWm;
            wm.dst = j;
            wm.head = next_send_ - 1;
            wm.ready = mine;
            out.push_back(std::move(wm));
        }
        // authoritative refresh: walk the own undelivered entries one per
        // cadence and re-push to every trusted peer, acked or not. An ack
        // only proves a copy under that number landed, not that the copy
        // matches what was authored here.
        auto rit = buf_[self_].upper_bound(refresh_num_);
        if (rit == buf_[self_].end()) rit = buf_[self_].begin();
        if (rit != buf_[self_].end()) {
            refresh_num_ = rit->first;
            if (rit->second.has_payload) {
                for (ProcessId j = 0; j < n_; ++j) {
                    if (j == self_ || !(trusted & (1ull << j))) continue;
                    Message d;
                    d.kind = MsgKind::UrbData;
                    d.dst = j;
                    d.sender = self_;
                    d.num = rit->first;
                    d.payload = rit->second.payload;
                    d.planted = rit->second.planted;
                    out.push_back(std::move(d));
                }
            }
        } else {
            refresh_num_ = 0;
        }
        // helper retransmission: a held frontier blocker missing trusted
        // acks may be unrecoverable from its owner (crashed, or the copy
        // was lost in flight). Whoever still holds it forwards it to the
        // holdouts, else they skip a message the holders go on to deliver.
        for (ProcessId k = 0; k < n_; ++k) {
            if (k == self_) continue;
            auto it = buf_[k].upper_bound(mine[k]);
            if (it == buf_[k].end() || !it->second.has_payload) continue;
            const Entry& e = it->second;
            if ((e.acks & trusted) == trusted) continue;
            for (ProcessId j = 0; j < n_; ++j) {
                if (j == self_ || !(trusted & (1ull << j))) continue;
                if (e.acks & (1ull << j)) continue;
                Message d;
                d.kind = MsgKind::UrbData;
                d.dst = j;
                d.sender = k;
                d.num = it->first;
                d.payload = e.payload;
                d.planted = e.planted;
                out.push_back(std::move(d));
            }
        }
    }
    // retransmit strictly until the acks themselves are in: suppressing on
    // gossiped watermarks instead lets two peers cite each other's claims in
    // a circle that outlives the corruption that planted them
    for (const auto& [num, e] : buf_[self_]) {
        if (!e.has_payload) continue;
        if ((e.acks & trusted) == trusted) continue;
        for (ProcessId j = 0; j < n_; ++j) {
            if (j == self_ || !(trusted & (1ull << j))) continue;
            if (e.acks & (1ull << j)) continue;
            Message d;
            d.kind = MsgKind::UrbData;
            d.dst = j;
            d.sender = self_;
            d.num = num;
            d.payload = e.payload;
            d.planted = e.planted;
            out.push_back(std::move(d));
        }
    }
}

void FifoUrb::tick(std::uint64_t trusted) {
    ReadyVector mr = max_ready(trusted);
    for (ProcessId k = 0; k < n_; ++k) {
        if (k == self_) continue;  // the own stream heals by retransmission
        StallProbe& p = stall_[k];
        auto& stream = buf_[k];
        auto it = stream.upper_bound(mr[k]);
        if (delivered_[k] != mr[k] || it == stream.end()) {
            // readable entries pending (rounds will drain them) or idle
            p = {};
            continue;
        }
        int held = it->second.has_payload ? 1 : 0;
        if (p.w != mr[k] || p.key != it->first || p.held != held) {
            p = {.w = mr[k], .key = it->first, .held = held, .rounds = 1};
            continue;
        }
        if (++p.rounds < kStuckRounds) continue;
        std::int64_t key = it->first;
        if (key == mr[k] + 1) {
            stream.erase(it);  // wedged right at the frontier: discard it
            delivered_[k] = key;
        } else {
            delivered_[k] = key - 1;  // unheld gap: jump to the next entry
        }
        p = {};
    }
}

std::uint64_t FifoUrb::state_digest() const {
    std::uint64_t h = fnv1a_mix(static_cast<std::uint64_t>(next_send_), 0x4655u);
    for (auto d : delivered_) h = fnv1a_mix(static_cast<std::uint64_t>(d), h);
    for (ProcessId k = 0; k < n_; ++k)
        for (const auto& [num, e] : buf_[k]) {
            h = fnv1a_mix(static_cast<std::uint64_t>(k), h);
            h = fnv1a_mix(static_cast<std::uint64_t>(num), h);
            h = fnv1a_mix(e.acks, h);
            h = fnv1a_mix(e.has_payload ? fnv1a(e.payload) : 0, h);
        }
    for (auto hd : peer_head_) h = fnv1a_mix(static_cast<std::uint64_t>(hd), h);
    for (const auto& row : peer_wm_) h = fnv1a_mix(digest_ready(row), h);
    return h;
}

void FifoUrb::corrupt(std::mt19937_64& rng, const FaultSpec& f) {
    auto roll = [&] { return (rng() % 1000) < std::uint64_t(f.intensity * 1000); };
    auto small = [&] { return static_cast<std::int64_t>(rng() % (f.bound + 1)); };
    if (roll()) next_send_ = 1 + small();
    if (roll())
        for (auto& d : delivered_) if (rng() % 2) d = small();
    if (roll()) {
        for (int rep = 0; rep < n_; ++rep) {
            ProcessId k = static_cast<ProcessId>(rng() % n_);
            if (rng() % 2 && !buf_[k].empty()) {
                auto it = buf_[k].begin();
                std::advance(it, rng() % buf_[k].size());
                buf_[k].erase(it);
            } else {
                Entry e;
                e.has_payload = rng() % 4 != 0;
                e.payload = "ghost." + std::to_string(rng() % 100);
                e.acks = rng();
                e.planted = true;
                buf_[k][1 + small()] = std::move(e);
            }
        }
    }
    if (roll())
        for (auto& hd : peer_head_) if (rng() % 2) hd = small();
    if (roll())
        for (auto& row : peer_wm_)
            for (auto& v : row) if (rng() % 2) v = small();
}

}  // namespace tourb

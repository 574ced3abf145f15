#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tourb/types.hpp"

namespace tourb {

// Heartbeat suspicion by silence counting. Any received message counts as a
// heartbeat from its source; tick() ages every silent peer once per protocol
// pump. A peer is trusted while its missed count stays below the threshold,
// so a silent peer is suspected after `threshold` pumps and re-trusted the
// moment it speaks again. Counters are clamped at the threshold, which is
// what lets arbitrarily corrupted counters wash out: one heartbeat restores
// trust, `threshold` silent pumps restore suspicion.
class FailureDetector {
public:
    FailureDetector(ProcessId self, int n, int threshold)
        : self_(self), n_(n), threshold_(threshold), missed_(n, 0) {}

    void heard_from(ProcessId j) {
        if (j >= 0 && j < n_) missed_[j] = 0;
    }

    void tick() {
        for (ProcessId j = 0; j < n_; ++j) {
            if (j == self_) { missed_[j] = 0; continue; }
            if (missed_[j] < threshold_) ++missed_[j];
            else missed_[j] = threshold_;  // clamp corrupted counters
        }
    }

    bool trusts(ProcessId j) const {
        if (j == self_) return true;
        return j >= 0 && j < n_ && missed_[j] < threshold_;
    }

    std::vector<ProcessId> trusted() const {
        std::vector<ProcessId> out;
        for (ProcessId j = 0; j < n_; ++j)
            if (trusts(j)) out.push_back(j);
        return out;
    }

    std::uint64_t trusted_mask() const {
        std::uint64_t m = 0;
        for (ProcessId j = 0; j < n_; ++j)
            if (trusts(j)) m |= 1ull << j;
        return m;
    }

    // lowest-id trusted node; self is always trusted so this never fails
    ProcessId coordinator() const {
        for (ProcessId j = 0; j < n_; ++j)
            if (trusts(j)) return j;
        return self_;
    }

    std::int64_t missed(ProcessId j) const { return missed_[j]; }

    void corrupt(std::mt19937_64& rng) {
        for (ProcessId j = 0; j < n_; ++j)
            missed_[j] = static_cast<std::int64_t>(rng() % 2000000000ull);
    }

    void reset() { std::fill(missed_.begin(), missed_.end(), 0); }

private:
    ProcessId self_;
    int n_;
    int threshold_;
    std::vector<std::int64_t> missed_;
};

}  // namespace tourb

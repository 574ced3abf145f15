#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tourb {

using ProcessId = int;

// Per-sender vector of broadcast message numbers. Index k refers to the
// stream of messages broadcast by node k. Numbers are 1-based; 0 means
// "nothing yet".
using ReadyVector = std::vector<std::int64_t>;

inline ReadyVector entrywise_min(const ReadyVector& a, const ReadyVector& b) {
    ReadyVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = std::min(a[i], i < b.size() ? b[i] : 0);
    return out;
}

// FNV-1a, used for state digests and payload digests in traces.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
    return fnv1a(s.data(), s.size(), h);
}

inline std::uint64_t fnv1a_mix(std::uint64_t v, std::uint64_t h) {
    return fnv1a(&v, sizeof v, h);
}

inline std::uint64_t digest_ready(const ReadyVector& r) {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : r) h = fnv1a_mix(static_cast<std::uint64_t>(v), h);
    return h;
}

}  // namespace tourb

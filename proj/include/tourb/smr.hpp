#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tourb/types.hpp"

namespace tourb {

// Demo replicated automaton: a counter plus an append log. Commands:
//   "inc"          counter += 1
//   "append:<tok>" push <tok> onto the log
// Anything else is ignored (deterministically) so corrupted payloads cannot
// diverge replicas that apply the same sequence.
struct SmrState {
    std::int64_t counter = 0;
    std::vector<std::string> log;

    bool operator==(const SmrState&) const = default;

    void apply(const std::string& command);
    std::uint64_t digest() const;
    std::string render() const;           // single token, no spaces
    static SmrState parse(const std::string& text);
};

}  // namespace tourb

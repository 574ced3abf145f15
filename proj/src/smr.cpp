#include "tourb/smr.hpp"

#include <sstream>

namespace tourb {

void SmrState::apply(const std::string& command) {
    if (command == "inc") {
        ++counter;
    } else if (command.rfind("append:", 0) == 0) {
        log.push_back(command.substr(7));
    }
    // unknown commands are no-ops
}

std::uint64_t SmrState::digest() const {
    std::uint64_t h = fnv1a_mix(static_cast<std::uint64_t>(counter), 0x5352u);
    for (const auto& e : log) h = fnv1a(e, h);
    return h;
}

// Rendered as counter|tok1|tok2|... with no spaces so it survives the
// line-oriented trace and message formats.
std::string SmrState::render() const {
    std::ostringstream os;
    os << counter;
    for (const auto& e : log) os << '|' << e;
    return os.str();
}

SmrState SmrState::parse(const std::string& text) {
    SmrState s;
    std::size_t pos = text.find('|');
    s.counter = std::strtoll(text.substr(0, pos).c_str(), nullptr, 10);
    while (pos != std::string::npos) {
        std::size_t next = text.find('|', pos + 1);
        s.log.push_back(text.substr(pos + 1, next == std::string::npos
                                                  ? std::string::npos
                                                  : next - pos - 1));
        pos = next;
    }
    return s;
}

}  // namespace tourb

#include "tourb/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace tourb {

namespace {

std::string join_ids(const std::vector<ProcessId>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

std::vector<ProcessId> split_ids(const std::string& s) {
    std::vector<ProcessId> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, ','))
        if (!tok.empty()) out.push_back(std::atoi(tok.c_str()));
    return out;
}

const char* shape_name(FaultShape s) {
    switch (s) {
        case FaultShape::None: return "none";
        case FaultShape::State: return "state";
        case FaultShape::Channels: return "channels";
        case FaultShape::Full: return "full";
    }
    return "none";
}

}  // namespace

std::uint64_t Scenario::derived_max_steps() const {
    if (max_steps) return max_steps;
    // generous: enough room for the workload plus drain and stabilization
    std::uint64_t w = static_cast<std::uint64_t>(std::max<std::int64_t>(workload, 1));
    return 400000 + w * static_cast<std::uint64_t>(n) * 800;
}

std::string Scenario::to_text() const {
    std::ostringstream os;
    os << "format=tourb-scn-1\n";
    os << "n=" << n << "\nt=" << t << "\ndelta=" << delta
       << "\nchannel_capacity=" << channel_capacity
       << "\nmax_counter=" << max_counter << "\nseed=" << seed << "\nfairness="
       << (fairness == Fairness::Fair ? "fair" : "adversarial") << "\n";
    if (fairness == Fairness::Adversarial)
        os << "adv_node=" << adv_node << "\nadv_from=" << adv_from
           << "\nadv_len=" << adv_len << "\n";
    os << "loss=" << loss << "\ndup=" << dup << "\nreorder=" << reorder
       << "\ndrop_cap=" << drop_cap << "\nfd_threshold=" << fd_threshold
       << "\nbuffer_bound=" << buffer_bound << "\nwm_period=" << wm_period
       << "\nmax_steps=" << max_steps << "\nworkload=" << workload
       << "\nworkload_gap=" << workload_gap << "\n";
    if (!workload_senders.empty())
        os << "workload_senders=" << join_ids(workload_senders) << "\n";
    os << "smr=" << int(smr) << "\nsmr_append_every=" << smr_append_every << "\n";
    for (const auto& cr : crashes)
        os << "crash=" << cr.node << "@" << cr.step << "\n";
    if (fault.shape != FaultShape::None) {
        os << "fault=" << shape_name(fault.shape) << "@" << fault.step << "\n";
        if (!fault.nodes.empty()) os << "fault_nodes=" << join_ids(fault.nodes) << "\n";
        os << "fault_intensity=" << fault.intensity << "\nfault_bound="
           << fault.bound << "\n";
    }
    os << "trace_level=" << (trace_level == TraceLevel::Full ? "full" : "light")
       << "\nquiesce_cycles=" << quiesce_cycles << "\n";
    return os.str();
}

std::optional<Scenario> Scenario::parse(const std::string& text, std::string* err) {
    auto fail = [&](const std::string& m) {
        if (err) *err = m;
        return std::nullopt;
    };
    Scenario sc;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool saw_format = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            return fail("line " + std::to_string(lineno) + ": expected key=value");
        std::string k = line.substr(0, eq);
        std::string v = line.substr(eq + 1);
        auto iv = [&] { return std::strtoll(v.c_str(), nullptr, 10); };
        auto uv = [&] { return std::strtoull(v.c_str(), nullptr, 10); };
        auto dv = [&] { return std::strtod(v.c_str(), nullptr); };
        if (k == "format") {
            if (v != "tourb-scn-1") return fail("unsupported scenario format: " + v);
            saw_format = true;
        } else if (k == "n") sc.n = int(iv());
        else if (k == "t") sc.t = int(iv());
        else if (k == "delta") sc.delta = iv();
        else if (k == "channel_capacity") sc.channel_capacity = int(iv());
        else if (k == "max_counter") sc.max_counter = iv();
        else if (k == "seed") sc.seed = uv();
        else if (k == "fairness") {
            if (v == "fair") sc.fairness = Fairness::Fair;
            else if (v == "adversarial") sc.fairness = Fairness::Adversarial;
            else return fail("bad fairness: " + v);
        }
        else if (k == "adv_node") sc.adv_node = int(iv());
        else if (k == "adv_from") sc.adv_from = uv();
        else if (k == "adv_len") sc.adv_len = uv();
        else if (k == "loss") sc.loss = dv();
        else if (k == "dup") sc.dup = dv();
        else if (k == "reorder") sc.reorder = dv();
        else if (k == "drop_cap") sc.drop_cap = int(iv());
        else if (k == "fd_threshold") sc.fd_threshold = int(iv());
        else if (k == "buffer_bound") sc.buffer_bound = iv();
        else if (k == "wm_period") sc.wm_period = int(iv());
        else if (k == "max_steps") sc.max_steps = uv();
        else if (k == "workload") sc.workload = iv();
        else if (k == "workload_gap") sc.workload_gap = iv();
        else if (k == "workload_senders") sc.workload_senders = split_ids(v);
        else if (k == "smr") sc.smr = iv() != 0;
        else if (k == "smr_append_every") sc.smr_append_every = iv();
        else if (k == "crash") {
            auto at = v.find('@');
            if (at == std::string::npos) return fail("crash wants node@step");
            sc.crashes.push_back({std::atoi(v.substr(0, at).c_str()),
                                  std::strtoull(v.c_str() + at + 1, nullptr, 10)});
        }
        else if (k == "fault") {
            auto at = v.find('@');
            std::string shape = at == std::string::npos ? v : v.substr(0, at);
            if (shape == "none") sc.fault.shape = FaultShape::None;
            else if (shape == "state") sc.fault.shape = FaultShape::State;
            else if (shape == "channels") sc.fault.shape = FaultShape::Channels;
            else if (shape == "full") sc.fault.shape = FaultShape::Full;
            else return fail("bad fault shape: " + shape);
            if (at != std::string::npos)
                sc.fault.step = std::strtoull(v.c_str() + at + 1, nullptr, 10);
        }
        else if (k == "fault_nodes") sc.fault.nodes = split_ids(v);
        else if (k == "fault_intensity") sc.fault.intensity = dv();
        else if (k == "fault_bound") sc.fault.bound = iv();
        else if (k == "trace_level") {
            if (v == "full") sc.trace_level = TraceLevel::Full;
            else if (v == "light") sc.trace_level = TraceLevel::Light;
            else return fail("bad trace_level: " + v);
        }
        else if (k == "quiesce_cycles") sc.quiesce_cycles = iv();
        else return fail("unknown scenario key: " + k);
    }
    if (!saw_format) return fail("missing format=tourb-scn-1 line");
    if (auto e = sc.validate()) return fail(*e);
    return sc;
}

std::optional<std::string> Scenario::validate() const {
    if (n < 1 || n > 63) return "n must be in [1, 63]";
    if (t < 0 || 2 * t >= n) return "t must satisfy 0 <= t < n/2";
    if (int(crashes.size()) > t) return "more scheduled crashes than t";
    for (const auto& c : crashes)
        if (c.node < 0 || c.node >= n) return "crash node out of range";
    if (delta < 1) return "delta must be >= 1";
    if (buffer_bound < delta) return "buffer_bound must be >= delta";
    if (channel_capacity < 2) return "channel_capacity must be >= 2";
    if (max_counter < 16) return "max_counter must be >= 16";
    if (loss < 0 || loss >= 1 || dup < 0 || dup >= 1 || reorder < 0 || reorder > 1)
        return "loss/dup in [0,1), reorder in [0,1]";
    if (drop_cap < 1) return "drop_cap must be >= 1";
    if (fd_threshold < 2) return "fd_threshold must be >= 2";
    if (wm_period < 1) return "wm_period must be >= 1";
    if (workload < 0) return "workload must be >= 0";
    if (workload_gap < 0) return "workload_gap must be >= 0";
    for (auto s : workload_senders)
        if (s < 0 || s >= n) return "workload sender out of range";
    if (fairness == Fairness::Adversarial && (adv_node < 0 || adv_node >= n))
        return "adversarial mode needs adv_node in range";
    for (auto nd : fault.nodes)
        if (nd < 0 || nd >= n) return "fault node out of range";
    if (fault.intensity < 0 || fault.intensity > 1)
        return "fault_intensity in [0,1]";
    if (fault.bound < 1) return "fault_bound must be >= 1";
    if (quiesce_cycles < 1) return "quiesce_cycles must be >= 1";
    return std::nullopt;
}

}  // namespace tourb

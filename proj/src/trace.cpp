#include "tourb/trace.hpp"

#include <cstring>
#include <sstream>

namespace tourb {

namespace {

const char* const kKindNames[] = {
    "to-broadcast", "to-deliver", "fifo-deliver-internal", "send", "receive",
    "drop", "duplicate", "crash", "transient-fault", "state-snapshot",
    "cycle-boundary", "propose", "global-restart",
};
constexpr int kKindCount = 13;

}  // namespace

const char* event_kind_name(EventKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<EventKind> event_kind_from(const std::string& name) {
    for (int i = 0; i < kKindCount; ++i)
        if (name == kKindNames[i]) return static_cast<EventKind>(i);
    return std::nullopt;
}

std::string Trace::serialize() const {
    std::ostringstream os;
    os << "tourb-trace-" << meta.format_version << '\n';
    os << "meta n=" << meta.n << " t=" << meta.t << " delta=" << meta.delta
       << " bound=" << meta.buffer_bound << " maxc=" << meta.max_counter
       << " seed=" << meta.seed << " smr=" << int(meta.smr)
       << " light=" << int(meta.light) << " scn=" << meta.scenario_digest << '\n';
    for (const auto& ev : events) {
        if (ev.kind == EventKind::StateSnapshot) {
            const SnapshotRec& s = snaps[static_cast<std::size_t>(ev.a)];
            os << "s " << ev.step << ' ' << s.node << ' ' << s.iter_begin << ' '
               << s.obs_s << ' ' << s.next_query << ' ' << s.get_seq << ' '
               << s.last_max_seq << ' ' << s.allseq_min << ' ' << s.allseq_max;
            for (const auto& c : s.cs)
                os << ' ' << int(c.active) << ' ' << c.seq << ' ' << c.result
                   << ' ' << c.value_digest << ' ' << int(c.ghost);
            os << ' ' << s.max_inflight_qn << ' ' << s.buffered << ' '
               << s.active_slots << ' ' << s.ell << ' ' << int(s.all_term)
               << ' ' << s.bulk_violations << ' ' << s.state_digest << ' '
               << int(s.smr_on) << ' ' << s.smr_counter << ' ' << s.smr_digest
               << '\n';
            continue;
        }
        os << "e " << ev.step << ' ' << event_kind_name(ev.kind) << ' '
           << ev.node << ' ' << ev.peer << ' ' << ev.a << ' ' << ev.b << ' '
           << ev.c << ' ' << ev.d << ' ' << ev.e << ' ' << int(ev.ghost);
        if (!ev.text.empty()) os << ' ' << ev.text;
        os << '\n';
    }
    return os.str();
}

std::optional<Trace> Trace::parse(const std::string& text, std::string* err) {
    auto fail = [&](const std::string& m) {
        if (err) *err = m;
        return std::nullopt;
    };
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("tourb-trace-", 0) != 0)
        return fail("missing trace header");
    Trace tr;
    tr.meta.format_version = std::atoi(line.c_str() + 12);
    if (tr.meta.format_version != 1) return fail("unsupported trace version");
    if (!std::getline(is, line) || line.rfind("meta ", 0) != 0)
        return fail("missing meta line");
    {
        std::istringstream ms(line.substr(5));
        std::string kv;
        while (ms >> kv) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) return fail("bad meta token: " + kv);
            std::string k = kv.substr(0, eq);
            long long v = std::strtoll(kv.c_str() + eq + 1, nullptr, 10);
            unsigned long long uv = std::strtoull(kv.c_str() + eq + 1, nullptr, 10);
            if (k == "n") tr.meta.n = int(v);
            else if (k == "t") tr.meta.t = int(v);
            else if (k == "delta") tr.meta.delta = v;
            else if (k == "bound") tr.meta.buffer_bound = v;
            else if (k == "maxc") tr.meta.max_counter = v;
            else if (k == "seed") tr.meta.seed = uv;
            else if (k == "smr") tr.meta.smr = v != 0;
            else if (k == "light") tr.meta.light = v != 0;
            else if (k == "scn") tr.meta.scenario_digest = uv;
            else return fail("unknown meta key: " + k);
        }
    }
    int lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "e") {
            TraceEvent ev;
            std::string kind;
            int ghost = 0;
            ls >> ev.step >> kind >> ev.node >> ev.peer >> ev.a >> ev.b >>
                ev.c >> ev.d >> ev.e >> ghost;
            if (!ls) return fail("short event at line " + std::to_string(lineno));
            auto k = event_kind_from(kind);
            if (!k) return fail("unknown event kind: " + kind);
            ev.kind = *k;
            ev.ghost = ghost != 0;
            ls >> ev.text;  // optional
            tr.events.push_back(std::move(ev));
        } else if (tag == "s") {
            SnapshotRec s;
            std::uint64_t step = 0;
            int act, g, term, smron;
            ls >> step >> s.node >> s.iter_begin >> s.obs_s >> s.next_query >>
                s.get_seq >> s.last_max_seq >> s.allseq_min >> s.allseq_max;
            for (auto& c : s.cs) {
                ls >> act >> c.seq >> c.result >> c.value_digest >> g;
                c.active = act != 0;
                c.ghost = g != 0;
            }
            ls >> s.max_inflight_qn >> s.buffered >> s.active_slots >> s.ell >>
                term >> s.bulk_violations >> s.state_digest >> smron >>
                s.smr_counter >> s.smr_digest;
            if (!ls) return fail("short snapshot at line " + std::to_string(lineno));
            s.step = step;
            s.all_term = term != 0;
            s.smr_on = smron != 0;
            TraceEvent ev;
            ev.step = step;
            ev.kind = EventKind::StateSnapshot;
            ev.node = s.node;
            ev.a = static_cast<std::int64_t>(tr.snaps.size());
            tr.snaps.push_back(s);
            tr.events.push_back(std::move(ev));
        } else {
            return fail("unknown line tag at line " + std::to_string(lineno));
        }
    }
    return tr;
}

}  // namespace tourb

#include "tourb/checker.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "tourb/to_urb_ops.hpp"

namespace tourb {

namespace {

struct Dl {
    std::uint64_t step;
    ProcessId sender;
    std::int64_t num;
    std::string payload;
    bool ghost;
};

using MsgId = std::pair<ProcessId, std::int64_t>;

void note(PropCount& p, std::uint64_t step, std::uint64_t stab,
          const std::string& what) {
    ++p.full;
    if (step >= stab) ++p.suffix;
    if (p.detail.empty()) p.detail = what;
}

// merge-sort inversion count
std::int64_t inversions(std::vector<std::int64_t>& v) {
    if (v.size() < 2) return 0;
    std::vector<std::int64_t> tmp(v.size());
    std::int64_t count = 0;
    for (std::size_t w = 1; w < v.size(); w *= 2) {
        for (std::size_t lo = 0; lo + w < v.size(); lo += 2 * w) {
            std::size_t mid = lo + w, hi = std::min(lo + 2 * w, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[i] <= v[j]) tmp[k++] = v[i++];
                else {
                    count += static_cast<std::int64_t>(mid - i);
                    tmp[k++] = v[j++];
                }
            }
            while (i < mid) tmp[k++] = v[i++];
            while (j < hi) tmp[k++] = v[j++];
            std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
                      tmp.begin() + static_cast<std::ptrdiff_t>(hi),
                      v.begin() + static_cast<std::ptrdiff_t>(lo));
        }
    }
    return count;
}

std::string id_text(ProcessId s, std::int64_t num) {
    return "msg(" + std::to_string(s) + "," + std::to_string(num) + ")";
}

EpochReport check_epoch(const Trace& t, int index, bool final_epoch,
                        std::uint64_t from, std::uint64_t to,
                        const std::vector<char>& correct) {
    const int n = t.meta.n;
    EpochReport ep;
    ep.index = index;
    ep.final_epoch = final_epoch;
    ep.from_step = from;
    ep.to_step = to;

    // gather this epoch's raw material
    std::vector<std::vector<Dl>> dl(static_cast<std::size_t>(n));
    std::map<MsgId, std::pair<std::uint64_t, std::string>> bc;
    std::map<std::int64_t, std::set<std::uint64_t>> proposed;
    // round -> digest -> (first step seen, involves planted value)
    std::map<std::int64_t, std::map<std::uint64_t, std::pair<std::uint64_t, bool>>>
        decided;
    std::vector<std::vector<const SnapshotRec*>> snaps(static_cast<std::size_t>(n));

    std::optional<std::uint64_t> last_fault;
    for (const auto& e : t.events) {
        if (e.step < from || e.step > to) continue;
        switch (e.kind) {
            case EventKind::TransientFault:
                last_fault = e.step;
                break;
            case EventKind::ToBroadcast:
                if (e.node >= 0 && e.node < n)
                    bc.emplace(MsgId{e.node, e.a}, std::make_pair(e.step, e.text));
                break;
            case EventKind::ToDeliver:
                if (e.node >= 0 && e.node < n) {
                    dl[static_cast<std::size_t>(e.node)].push_back(
                        {e.step, e.peer, e.a, e.text, e.ghost});
                    if (e.ghost) ++ep.ghost_deliveries;
                }
                break;
            case EventKind::Propose:
                proposed[e.a].insert(e.e);
                break;
            default:
                break;
        }
    }
    for (const auto& s : t.snaps) {
        if (s.step < from || s.step > to) continue;
        if (s.node < 0 || s.node >= n) continue;
        snaps[static_cast<std::size_t>(s.node)].push_back(&s);
        for (const auto& c : s.cs) {
            if (!c.active || c.result != 1) continue;
            auto& slot = decided[c.seq];
            auto it = slot.find(c.value_digest);
            if (it == slot.end())
                slot.emplace(c.value_digest, std::make_pair(s.step, c.ghost));
        }
    }

    CycleAccount cyc = count_async_cycles(t, from, to, correct);
    ep.cycles = static_cast<std::int64_t>(cyc.boundaries.size());
    ep.cycles_unbounded = cyc.unbounded;

    // structural violations fix the stabilization step, so collect their
    // steps first and count everything against stab afterwards
    std::vector<std::uint64_t> bad;
    auto flag = [&](std::uint64_t step) { bad.push_back(step); };

    struct Pending {
        PropCount* prop;
        std::uint64_t step;
        std::string what;
    };
    std::vector<Pending> pend;
    auto defer = [&](PropCount& p, std::uint64_t step, std::string what,
                     bool structural) {
        pend.push_back({&p, step, std::move(what)});
        if (structural) flag(step);
    };

    // per-snapshot invariants
    for (int i = 0; i < n; ++i) {
        const SnapshotRec* prev = nullptr;
        for (const SnapshotRec* s : snaps[static_cast<std::size_t>(i)]) {
            SlotSeqView view{};
            for (int k = 0; k < 3; ++k)
                if (s->cs[k].active) view[static_cast<std::size_t>(k)] = s->cs[k].seq;
            if (needs_stale_cleanup(s->obs_s, view))
                defer(ep.consistency, s->step,
                      "stale slots at node " + std::to_string(i), true);
            if (s->get_seq != current_seq(s->obs_s, view))
                defer(ep.consistency, s->step,
                      "seq mismatch at node " + std::to_string(i), true);
            if (s->next_query < s->max_inflight_qn)
                defer(ep.consistency, s->step,
                      "stale query number at node " + std::to_string(i), true);
            if (s->obs_s > s->get_seq || s->get_seq > s->obs_s + 1)
                defer(ep.consistency, s->step,
                      "round counters out of shape at node " + std::to_string(i),
                      true);
            if (prev && s->bulk_violations > prev->bulk_violations)
                defer(ep.consistency, s->step,
                      "delivery bound outran node " + std::to_string(i), true);
            if (s->buffered > static_cast<std::int64_t>(n) * t.meta.buffer_bound)
                defer(ep.bounded, s->step,
                      "buffer overrun at node " + std::to_string(i), true);
            if (s->active_slots > 3)
                defer(ep.bounded, s->step,
                      "slot overrun at node " + std::to_string(i), true);
            if (s->obs_s < 0 || s->obs_s >= t.meta.max_counter ||
                s->next_query < 0 || s->next_query >= t.meta.max_counter)
                defer(ep.bounded, s->step,
                      "counter out of range at node " + std::to_string(i), true);
            prev = s;
        }
    }

    // delivery bookkeeping
    for (int i = 0; i < n; ++i) {
        std::set<MsgId> seen;
        std::map<ProcessId, std::int64_t> last_num;
        for (const Dl& d : dl[static_cast<std::size_t>(i)]) {
            MsgId id{d.sender, d.num};
            if (!seen.insert(id).second)
                defer(ep.integrity, d.step,
                      "node " + std::to_string(i) + " re-delivered " +
                          id_text(d.sender, d.num),
                      true);
            if (!d.ghost) {
                auto it = bc.find(id);
                if (it == bc.end() || it->second.second != d.payload)
                    defer(ep.validity, d.step,
                          "node " + std::to_string(i) + " delivered unsent " +
                              id_text(d.sender, d.num),
                          true);
            }
            auto ln = last_num.find(d.sender);
            if (ln != last_num.end() && d.num < ln->second)
                defer(ep.fifo_order, d.step,
                      "node " + std::to_string(i) + " inverted stream " +
                          std::to_string(d.sender),
                      true);
            if (ln == last_num.end() || d.num > ln->second)
                last_num[d.sender] = d.num;
        }
    }

    // decided rounds
    for (const auto& [seq, values] : decided) {
        if (values.size() > 1) {
            std::uint64_t worst = 0;
            for (const auto& [dg, info] : values) worst = std::max(worst, info.first);
            defer(ep.agreement, worst,
                  "round " + std::to_string(seq) + " decided " +
                      std::to_string(values.size()) + " values",
                  true);
        }
        for (const auto& [dg, info] : values) {
            if (info.second) continue;  // planted decision, exempt
            auto it = proposed.find(seq);
            if (it == proposed.end() || !it->second.count(dg))
                defer(ep.cons_validity, info.first,
                      "round " + std::to_string(seq) + " decided unproposed value",
                      true);
        }
    }

    // replica state digests per round
    if (t.meta.smr) {
        std::map<std::int64_t, std::map<std::uint64_t, std::uint64_t>> per_round;
        for (int i = 0; i < n; ++i)
            for (const SnapshotRec* s : snaps[static_cast<std::size_t>(i)]) {
                auto& m = per_round[s->obs_s];
                if (!m.count(s->smr_digest)) m[s->smr_digest] = s->step;
            }
        for (const auto& [z, m] : per_round) {
            if (m.size() > 1) {
                std::uint64_t worst = 0;
                for (const auto& [dg, st] : m) worst = std::max(worst, st);
                defer(ep.smr_agreement, worst,
                      "state digests diverge at round " + std::to_string(z), true);
            }
        }
    }

    // stabilization point and convergence ordinal
    ep.stab_step = from;
    for (std::uint64_t s : bad) ep.stab_step = std::max(ep.stab_step, s + 1);
    // a fault is damage even when nothing misbehaves on the spot: state it
    // rewrote (a delivered mark, a counter) can silently swallow whatever
    // is broadcast before the next full exchange straightens it out, so
    // stabilization is never placed before the first cycle boundary past
    // the last injection
    if (last_fault) {
        for (std::uint64_t b : cyc.boundaries) {
            if (b > *last_fault) {
                ep.stab_step = std::max(ep.stab_step, b);
                break;
            }
        }
    }
    ep.stabilized = false;
    for (std::size_t k = 0; k < cyc.boundaries.size(); ++k) {
        if (cyc.boundaries[k] >= ep.stab_step) {
            ep.convergence_cycles = static_cast<std::int64_t>(k) + 1;
            ep.stabilized = true;
            break;
        }
    }
    if (bad.empty() && ep.stab_step == from && !cyc.boundaries.empty()) {
        ep.stabilized = true;
        ep.convergence_cycles = 1;
    }

    for (const Pending& p : pend) note(*p.prop, p.step, ep.stab_step, p.what);

    // total order, full trace: delivery logs must form a prefix chain
    {
        std::vector<std::vector<MsgId>> seqs;
        for (int i = 0; i < n; ++i) {
            std::vector<MsgId> v;
            for (const Dl& d : dl[static_cast<std::size_t>(i)])
                v.push_back({d.sender, d.num});
            seqs.push_back(std::move(v));
        }
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            return seqs[static_cast<std::size_t>(x)].size() <
                   seqs[static_cast<std::size_t>(y)].size();
        });
        for (int k = 0; k + 1 < n; ++k) {
            const auto& a = seqs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
            const auto& b =
                seqs[static_cast<std::size_t>(order[static_cast<std::size_t>(k + 1)])];
            if (!std::equal(a.begin(), a.end(), b.begin())) {
                ++ep.total_order.full;
                if (ep.total_order.detail.empty())
                    ep.total_order.detail =
                        "logs of nodes " +
                        std::to_string(order[static_cast<std::size_t>(k)]) + " and " +
                        std::to_string(order[static_cast<std::size_t>(k + 1)]) +
                        " are not prefix-comparable";
            }
        }
    }

    // total order, suffix: pairwise inversions over messages both nodes
    // delivered after stabilization
    for (int x = 0; x < n; ++x) {
        std::map<MsgId, std::size_t> pos;
        std::vector<const Dl*> dx;
        for (const Dl& d : dl[static_cast<std::size_t>(x)])
            if (d.step >= ep.stab_step) {
                pos[{d.sender, d.num}] = dx.size();
                dx.push_back(&d);
            }
        for (int y = x + 1; y < n; ++y) {
            std::vector<std::int64_t> xpos;
            for (const Dl& d : dl[static_cast<std::size_t>(y)]) {
                if (d.step < ep.stab_step) continue;
                auto it = pos.find({d.sender, d.num});
                if (it != pos.end())
                    xpos.push_back(static_cast<std::int64_t>(it->second));
            }
            std::int64_t inv = inversions(xpos);
            if (inv > 0) {
                ep.total_order.suffix += inv;
                if (ep.total_order.detail.empty())
                    ep.total_order.detail = "order conflict between nodes " +
                                            std::to_string(x) + " and " +
                                            std::to_string(y);
            }
        }
    }

    // liveness, judged in the final epoch only
    if (final_epoch) {
        std::vector<std::set<MsgId>> got(static_cast<std::size_t>(n));
        std::map<MsgId, std::uint64_t> first_dl;
        for (int i = 0; i < n; ++i)
            for (const Dl& d : dl[static_cast<std::size_t>(i)]) {
                if (d.ghost) continue;
                got[static_cast<std::size_t>(i)].insert({d.sender, d.num});
                auto it = first_dl.find({d.sender, d.num});
                if (it == first_dl.end() || d.step < it->second)
                    first_dl[{d.sender, d.num}] = d.step;
            }
        for (const auto& [id, info] : bc) {
            if (id.first < 0 || id.first >= n) continue;
            if (!correct[static_cast<std::size_t>(id.first)]) continue;
            for (int i = 0; i < n; ++i) {
                if (!correct[static_cast<std::size_t>(i)]) continue;
                if (!got[static_cast<std::size_t>(i)].count(id))
                    note(ep.completion, info.first, ep.stab_step,
                         id_text(id.first, id.second) + " never reached node " +
                             std::to_string(i));
            }
        }
        for (const auto& [id, fstep] : first_dl) {
            // suffix accounting keys on the broadcast step where one is
            // known: closure is only owed for messages broadcast after
            // stabilization. A payload authored while a planted delivered
            // mark still lies about its number can be acknowledged without
            // ever being held, and no retransmission revives it; that loss
            // is convergence damage, not a suffix violation.
            auto bit = bc.find(id);
            std::uint64_t key = bit != bc.end() ? bit->second.first : fstep;
            for (int i = 0; i < n; ++i) {
                if (!correct[static_cast<std::size_t>(i)]) continue;
                if (!got[static_cast<std::size_t>(i)].count(id))
                    note(ep.uniformity, key, ep.stab_step,
                         id_text(id.first, id.second) +
                             " delivered somewhere but not at node " +
                             std::to_string(i));
            }
        }
    }

    // trailing standstill: frozen digests and the agreement predicate
    {
        bool all_frozen = true;
        std::uint64_t latest_start = from;
        std::int64_t common_z = -1;
        bool z_same = true;
        for (int i = 0; i < n && all_frozen; ++i) {
            if (!correct[static_cast<std::size_t>(i)]) continue;
            const auto& v = snaps[static_cast<std::size_t>(i)];
            if (v.size() < 2) {
                all_frozen = false;
                break;
            }
            std::size_t k = v.size();
            auto settled = [&](const SnapshotRec* s) {
                return s->get_seq == s->obs_s && s->last_max_seq == s->obs_s &&
                       s->allseq_min == s->obs_s && s->allseq_max == s->obs_s;
            };
            while (k > 0 && settled(v[k - 1]) &&
                   v[k - 1]->state_digest == v.back()->state_digest)
                --k;
            std::size_t run = v.size() - k;
            if (run < 2) {
                all_frozen = false;
                break;
            }
            latest_start = std::max(latest_start, v[k]->step);
            if (common_z < 0) common_z = v.back()->obs_s;
            else if (common_z != v.back()->obs_s) z_same = false;
        }
        ep.standstill = all_frozen && z_same;
        if (ep.standstill) {
            ep.standstill_from = latest_start;
            for (std::uint64_t b : cyc.boundaries)
                if (b >= latest_start) ++ep.standstill_cycles;
        }
    }

    return ep;
}

}  // namespace

bool EpochReport::suffix_ok() const {
    if (!stabilized) return false;
    if (cycles_unbounded) return false;
    return validity.suffix == 0 && integrity.suffix == 0 &&
           total_order.suffix == 0 && completion.suffix == 0 &&
           uniformity.suffix == 0 && fifo_order.suffix == 0 &&
           agreement.suffix == 0 && cons_validity.suffix == 0 &&
           consistency.suffix == 0 && bounded.suffix == 0 &&
           smr_agreement.suffix == 0;
}

bool EpochReport::clean() const {
    return stabilized && stab_step == from_step && validity.full == 0 &&
           integrity.full == 0 && total_order.full == 0 &&
           completion.full == 0 && uniformity.full == 0 &&
           fifo_order.full == 0 && agreement.full == 0 &&
           cons_validity.full == 0 && consistency.full == 0 &&
           bounded.full == 0 && smr_agreement.full == 0 &&
           ghost_deliveries == 0;
}

CheckReport check_trace(const Trace& t) {
    CheckReport r;
    std::vector<char> correct = correct_nodes(t);
    std::uint64_t last = 0;
    for (const auto& e : t.events) last = std::max(last, e.step);
    for (const auto& s : t.snaps) last = std::max(last, s.step);

    std::vector<std::pair<std::uint64_t, std::uint64_t>> ranges;
    std::uint64_t start = 0;
    for (const auto& e : t.events) {
        if (e.kind != EventKind::GlobalRestart) continue;
        ranges.push_back({start, e.step});
        start = e.step + 1;
    }
    ranges.push_back({start, last});

    r.pass = true;
    for (std::size_t k = 0; k < ranges.size(); ++k) {
        EpochReport ep = check_epoch(t, static_cast<int>(k),
                                     k + 1 == ranges.size(), ranges[k].first,
                                     ranges[k].second, correct);
        if (!ep.suffix_ok()) r.pass = false;
        r.epochs.push_back(std::move(ep));
    }
    return r;
}

std::string CheckReport::render() const {
    std::ostringstream os;
    os << "tourb-report-1\n";
    os << "pass " << (pass ? 1 : 0) << "\n";
    os << "epochs " << epochs.size() << "\n";
    auto line = [&os](const char* name, const PropCount& p) {
        os << name << " " << p.full << " " << p.suffix << "\n";
        if (!p.detail.empty()) os << "# " << name << ": " << p.detail << "\n";
    };
    for (const auto& ep : epochs) {
        os << "epoch " << ep.index << " final " << (ep.final_epoch ? 1 : 0)
           << " from " << ep.from_step << " to " << ep.to_step << "\n";
        os << "stabilized " << (ep.stabilized ? 1 : 0) << " stab-step "
           << ep.stab_step << " convergence-cycles " << ep.convergence_cycles
           << " cycles " << ep.cycles << " unbounded "
           << (ep.cycles_unbounded ? 1 : 0) << "\n";
        os << "standstill " << (ep.standstill ? 1 : 0) << " from "
           << ep.standstill_from << " trailing-cycles " << ep.standstill_cycles
           << " ghosts " << ep.ghost_deliveries << "\n";
        line("validity", ep.validity);
        line("integrity", ep.integrity);
        line("total-order", ep.total_order);
        line("completion", ep.completion);
        line("uniformity", ep.uniformity);
        line("fifo", ep.fifo_order);
        line("agreement", ep.agreement);
        line("cons-validity", ep.cons_validity);
        line("consistency", ep.consistency);
        line("bounded", ep.bounded);
        line("smr", ep.smr_agreement);
    }
    return os.str();
}

}  // namespace tourb

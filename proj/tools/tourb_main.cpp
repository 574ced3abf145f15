#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tourb/runner.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolation = 2;
constexpr int kExitIo = 3;

std::optional<std::string> slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool spill(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) return false;
    out << text;
    return bool(out);
}

std::optional<tourb::Scenario> load_scenario(const std::string& path) {
    auto text = slurp(path);
    if (!text) {
        std::cerr << "cannot read scenario file: " << path << "\n";
        return std::nullopt;
    }
    std::string err;
    auto sc = tourb::Scenario::parse(*text, &err);
    if (!sc) {
        std::cerr << "bad scenario: " << err << "\n";
        return std::nullopt;
    }
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulated self-stabilizing total-order broadcast"};
    app.require_subcommand(1);

    std::string scenario_path, trace_out, report_out, trace_in;
    std::uint64_t seed = 0;
    bool seed_set = false, light = false;
    std::string seeds_range = "1..20";

    CLI::App* run = app.add_subcommand("run", "run one scenario and check it");
    run->add_option("--scenario", scenario_path, "scenario file")->required();
    run->add_option("--seed", seed, "override the scenario seed")
        ->each([&](const std::string&) { seed_set = true; });
    run->add_option("--trace-out", trace_out, "write the trace here");
    run->add_option("--report", report_out, "write the verdicts here");
    run->add_flag("--light", light, "omit per-message events from the trace");

    CLI::App* chk = app.add_subcommand("check", "check a recorded trace");
    chk->add_option("--trace", trace_in, "trace file")->required();
    chk->add_option("--report", report_out, "write the verdicts here");

    CLI::App* swp = app.add_subcommand("sweep", "run a scenario across seeds");
    swp->add_option("--scenario", scenario_path, "scenario file")->required();
    swp->add_option("--seeds", seeds_range, "inclusive range, e.g. 1..100");
    swp->add_flag("--light", light, "omit per-message events from traces");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        auto sc = load_scenario(scenario_path);
        if (!sc) return kExitIo;
        if (seed_set) sc->seed = seed;
        if (light) sc->trace_level = tourb::TraceLevel::Light;
        tourb::RunOutcome out = tourb::run_scenario(*sc);
        if (!trace_out.empty() && !spill(trace_out, out.trace.serialize())) {
            std::cerr << "cannot write trace: " << trace_out << "\n";
            return kExitIo;
        }
        std::string rendered = out.report.render();
        if (!report_out.empty() && !spill(report_out, rendered)) {
            std::cerr << "cannot write report: " << report_out << "\n";
            return kExitIo;
        }
        std::cout << rendered;
        std::cout << "steps " << out.steps
                  << (out.hit_step_limit ? " (budget exhausted)\n" : "\n");
        return out.report.pass ? kExitPass : kExitViolation;
    }

    if (chk->parsed()) {
        auto text = slurp(trace_in);
        if (!text) {
            std::cerr << "cannot read trace: " << trace_in << "\n";
            return kExitIo;
        }
        std::string err;
        auto tr = tourb::Trace::parse(*text, &err);
        if (!tr) {
            std::cerr << "bad trace: " << err << "\n";
            return kExitIo;
        }
        tourb::CheckReport rep = tourb::check_trace(*tr);
        std::string rendered = rep.render();
        if (!report_out.empty() && !spill(report_out, rendered)) {
            std::cerr << "cannot write report: " << report_out << "\n";
            return kExitIo;
        }
        std::cout << rendered;
        return rep.pass ? kExitPass : kExitViolation;
    }

    auto sc = load_scenario(scenario_path);
    if (!sc) return kExitIo;
    if (light) sc->trace_level = tourb::TraceLevel::Light;
    auto sep = seeds_range.find("..");
    if (sep == std::string::npos) {
        std::cerr << "bad seed range, expected a..b\n";
        return kExitIo;
    }
    std::uint64_t a = 0, b = 0;
    try {
        a = std::stoull(seeds_range.substr(0, sep));
        b = std::stoull(seeds_range.substr(sep + 2));
    } catch (const std::exception&) {
        std::cerr << "bad seed range, expected a..b\n";
        return kExitIo;
    }
    if (b < a) std::swap(a, b);
    tourb::SweepOutcome agg = tourb::sweep(*sc, a, b);
    std::cout << agg.render();
    return agg.pass() ? kExitPass : kExitViolation;
}

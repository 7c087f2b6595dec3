// sp2noc: command-line front end for the analysis, simulator and harness.
//
// Exit codes: 0 success, 1 a dominance/sufficiency/invariant violation was
// found, 2 usage or I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "sp2/experiment.hpp"
#include "sp2/flowset_io.hpp"
#include "sp2/generator.hpp"
#include "sp2/progression.hpp"
#include "sp2/rta.hpp"
#include "sp2/simulator.hpp"

namespace fs = std::filesystem;
using namespace sp2;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

fs::path default_out_dir() {
    if (const char* env = std::getenv("SP2_OUT_DIR"); env && *env) return env;
    return "sp2_out";
}

int cmd_analyze(const std::string& file, const std::string& policy, Cycles back_pressure, const std::string& out) {
    const FlowSet flows = load_flowset(file);
    AnalysisOptions opt;
    opt.policy = policy == "exhaustive" ? XPolicy::Exhaustive
                 : policy == "all-zero" ? XPolicy::AllZero
                                        : XPolicy::SuspendingZero;
    opt.back_pressure.uniform = back_pressure;
    const auto result = analyze_all(flows, opt);
    if (out.empty()) {
        write_analysis_csv(std::cout, flows, result);
    } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot write " + out);
        write_analysis_csv(os, flows, result);
    }
    const auto dom = dominance_check(flows);
    for (const auto& v : dom.violations) {
        std::cerr << "dominance violated for flow " << flows[v.flow].id << ": R_sp2="
                  << (v.r_sp2 ? std::to_string(*v.r_sp2) : "-") << " R_baseline=" << v.r_baseline << '\n';
    }
    return dom.ok() ? kOk : kViolation;
}

int cmd_simulate(const std::string& file, Cycles horizon, const std::string& releases, std::uint64_t seed,
                 const std::string& trace_file) {
    const FlowSet flows = load_flowset(file);
    ReleasePattern rel;
    if (releases == "sync") {
        rel = ReleasePattern::synchronous(flows, horizon);
    } else if (releases == "periodic") {
        // Offsets drawn from the seed, uniform in [0, T).
        std::mt19937_64 rng(seed);
        std::vector<Cycles> offsets;
        for (const Flow& f : flows.flows()) offsets.push_back(std::uniform_int_distribution<Cycles>(0, f.period - 1)(rng));
        rel = ReleasePattern::periodic(flows, offsets, horizon);
    } else {
        rel = ReleasePattern::sporadic(flows, seed, horizon);
    }
    const auto trace = simulate(flows, rel, horizon);
    if (!trace_file.empty()) {
        std::ofstream os(trace_file);
        if (!os) throw std::runtime_error("cannot write " + trace_file);
        write_trace(os, trace, flows);
    }

    const auto analysis = analyze_all(flows);
    std::vector<std::optional<Cycles>> worst(flows.size());
    std::vector<std::size_t> misses(flows.size(), 0);
    for (const auto& m : trace.messages) {
        if (m.missed) ++misses[m.flow];
        if (auto r = m.response_time(); r && (!worst[m.flow] || *r > *worst[m.flow])) worst[m.flow] = r;
    }
    std::cout << "flow_id,messages_completed,max_response,misses,R_sp2\n";
    bool sufficient = true;
    for (std::size_t k = 0; k < flows.size(); ++k) {
        std::size_t done = 0;
        for (const auto& m : trace.messages) done += m.flow == k && m.completion.has_value();
        const auto& r = analysis.flows[k].r_sp2;
        std::cout << flows[k].id << ',' << done << ',' << (worst[k] ? std::to_string(*worst[k]) : "") << ','
                  << misses[k] << ',' << (r ? std::to_string(*r) : "") << '\n';
        if (r && ((worst[k] && *worst[k] > *r) || misses[k] > 0)) {
            std::cerr << "flow " << flows[k].id << " exceeded its bound\n";
            sufficient = false;
        }
    }
    if (!trace.model_valid) std::cerr << "note: a flow was released while its previous message was unfinished\n";
    const auto check = check_trace(trace, flows);
    for (const auto& v : check.violations) std::cerr << "trace: " << v << '\n';
    return check.ok() && sufficient ? kOk : kViolation;
}

int cmd_enumerate(int flits, int links, std::optional<int> capacity) {
    const auto b = progression::series_bounds(flits, links, capacity);
    std::cout << "min=" << b.min_len << ",max=" << b.max_len << '\n';
    try {
        std::cout << "count=" << progression::count_series(flits, links, capacity) << '\n';
    } catch (const std::overflow_error&) {
        std::cout << "count=overflow\n";
    }
    return kOk;
}

int cmd_experiment(const std::string& file, const fs::path& out) {
    const auto cfg = ExperimentConfig::load(file);
    const auto report = run_experiment(cfg);
    write_report(report, out);
    write_summary(std::cout, report);
    return report.ok() ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SP2 NoC analysis, simulation and experiment toolkit", "sp2noc"};
    app.require_subcommand(1);

    std::string file;
    std::string out;

    auto* analyze = app.add_subcommand("analyze", "Response-time analysis of a flow set (CSV on stdout)");
    std::string policy = "suspending-zero";
    Cycles back_pressure = 0;
    analyze->add_option("flowset", file, "Flow-set JSON")->required();
    analyze->add_option("--policy", policy, "x assignment")->check(CLI::IsMember({"suspending-zero", "exhaustive", "all-zero"}));
    analyze->add_option("--back-pressure", back_pressure, "Uniform baseline back-pressure B")
        ->check(CLI::NonNegativeNumber);
    analyze->add_option("--out", out, "Write the CSV here instead of stdout");

    auto* sim = app.add_subcommand("simulate", "Cycle-accurate SP2 simulation");
    Cycles horizon = 0;
    std::string releases = "sync";
    std::uint64_t seed = 1;
    std::string trace_file;
    sim->add_option("flowset", file, "Flow-set JSON")->required();
    sim->add_option("--horizon", horizon, "Cycles to simulate")->required()->check(CLI::PositiveNumber);
    sim->add_option("--releases", releases, "Release pattern")->check(CLI::IsMember({"sync", "periodic", "sporadic"}));
    sim->add_option("--seed", seed, "Seed for periodic offsets / sporadic arrivals");
    sim->add_option("--trace", trace_file, "Write the per-cycle trace to this file");

    auto* enumerate = app.add_subcommand("enumerate", "Min/max progression-series length by exhaustive search");
    int flits = 0;
    int links = 0;
    std::optional<int> capacity;
    enumerate->add_option("--flits", flits, "Flits C")->required()->check(CLI::PositiveNumber);
    enumerate->add_option("--links", links, "Path length eta")->required()->check(CLI::Range(1, 24));
    enumerate->add_option("--capacity", capacity, "Per-router buffer capacity in flits")->check(CLI::PositiveNumber);

    auto* generate = app.add_subcommand("generate", "Generate a random flow set");
    GeneratorParams gp;
    generate->add_option("--out", out, "Output JSON file")->required();
    generate->add_option("--rows", gp.rows)->check(CLI::PositiveNumber);
    generate->add_option("--cols", gp.cols)->check(CLI::PositiveNumber);
    generate->add_flag("--core-links", gp.with_core_links, "Add core injection/ejection links to the mesh");
    generate->add_option("--flows", gp.flow_count);
    generate->add_option("--flits-min", gp.flits_min);
    generate->add_option("--flits-max", gp.flits_max);
    generate->add_option("--period-min", gp.period_min);
    generate->add_option("--period-max", gp.period_max);
    generate->add_option("--deadline-min", gp.deadline_factor_min, "Smallest D/T factor");
    generate->add_option("--deadline-max", gp.deadline_factor_max, "Largest D/T factor");
    generate->add_option("--seed", gp.seed);

    auto* experiment = app.add_subcommand("experiment", "Run a schedulability experiment");
    experiment->add_option("config", file, "Experiment JSON")->required();
    experiment->add_option("--out", out, "Output directory (default $SP2_OUT_DIR or ./sp2_out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*analyze) return cmd_analyze(file, policy, back_pressure, out);
        if (*sim) return cmd_simulate(file, horizon, releases, seed, trace_file);
        if (*enumerate) return cmd_enumerate(flits, links, capacity);
        if (*generate) {
            save_flowset(generate_flowset(gp), out);
            return kOk;
        }
        if (*experiment) return cmd_experiment(file, out.empty() ? default_out_dir() : fs::path(out));
    } catch (const progression::SearchBudgetExceeded& e) {
        std::cerr << "sp2noc: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "sp2noc: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

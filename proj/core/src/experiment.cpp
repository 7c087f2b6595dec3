#include "sp2/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sp2/flowset_io.hpp"
#include "sp2/simulator.hpp"

namespace sp2 {

using nlohmann::json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <typename T>
void read_range(const json& obj, const char* key, T& lo, T& hi) {
    if (!obj.contains(key)) return;
    const json& r = obj.at(key);
    if (!r.is_array() || r.size() != 2) throw FormatError(std::string("\"") + key + "\" must be a [min, max] pair");
    lo = r[0].get<T>();
    hi = r[1].get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw FormatError("experiment config must be a JSON object");
    ExperimentConfig cfg;
    try {
        if (doc.contains("generator")) {
            const json& g = doc["generator"];
            auto& p = cfg.generator;
            p.rows = g.value("rows", p.rows);
            p.cols = g.value("cols", p.cols);
            p.with_core_links = g.value("core_links", p.with_core_links);
            p.flow_count = g.value("flows", p.flow_count);
            read_range(g, "flits", p.flits_min, p.flits_max);
            read_range(g, "period", p.period_min, p.period_max);
            read_range(g, "deadline_factor", p.deadline_factor_min, p.deadline_factor_max);
            p.validate();
        }
        if (doc.contains("flowset")) {
            std::filesystem::path f = doc["flowset"].get<std::string>();
            cfg.flowset_file = f.is_relative() ? base_dir / f : f;
        }
        cfg.first_seed = doc.value("first_seed", cfg.first_seed);
        cfg.instances = doc.value("instances", cfg.instances);
        cfg.sporadic_runs = doc.value("sporadic_runs", cfg.sporadic_runs);
        cfg.horizon_periods = doc.value("horizon_periods", cfg.horizon_periods);
        cfg.horizon_cap = doc.value("horizon_cap", cfg.horizon_cap);
        cfg.extra_delay_p = doc.value("extra_delay_p", cfg.extra_delay_p);
        cfg.utilization_bin = doc.value("utilization_bin", cfg.utilization_bin);
    } catch (const json::exception& e) {
        throw FormatError(std::string("experiment config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("experiment config: ") + e.what());
    }
    if (cfg.horizon_periods < 1 || cfg.horizon_cap < 1) throw FormatError("horizon settings must be positive");
    if (!(cfg.utilization_bin > 0.0)) throw FormatError("utilization_bin must be positive");
    if (!(cfg.extra_delay_p > 0.0 && cfg.extra_delay_p <= 1.0)) throw FormatError("extra_delay_p must be in (0, 1]");
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), file.parent_path());
}

InstanceReport evaluate_instance(const FlowSet& fs, std::uint64_t seed, const ExperimentConfig& cfg) {
    InstanceReport rep;
    rep.seed = seed;
    rep.flow_count = fs.size();
    rep.max_link_utilization = max_link_utilization(fs);
    rep.analysis = analyze_all(fs);
    rep.dominance = dominance_check(fs);
    const auto r = rep.analysis.response_times_sp2();
    rep.rhs_mismatches = rhs_agreement(fs, r).size();
    rep.max_observed_response.assign(fs.size(), std::nullopt);
    if (fs.empty()) return rep;

    Cycles max_period = 0;
    for (const Flow& f : fs.flows()) max_period = std::max(max_period, f.period);
    rep.horizon = std::min(cfg.horizon_cap, cfg.horizon_periods * max_period);

    std::vector<std::vector<std::size_t>> ss(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) ss[i] = ss_set(fs, i);

    auto run = [&](const ReleasePattern& pattern) {
        const ScheduleTrace trace = simulate(fs, pattern, rep.horizon);
        ++rep.simulation_runs;
        if (!trace.model_valid) ++rep.model_invalid_runs;
        rep.deadline_misses += trace.miss_count();
        rep.trace_violations += check_trace(trace, fs, std::numeric_limits<std::size_t>::max()).violations.size();

        for (const MessageRecord& m : trace.messages) {
            // Unfinished messages count with the time they have waited so far.
            const Cycles observed = m.completion ? *m.completion - m.release : rep.horizon - m.release;
            auto& best = rep.max_observed_response[m.flow];
            if (m.completion && (!best || observed > *best)) best = observed;
            if (!r[m.flow]) continue;
            const bool over = m.completion ? observed > *r[m.flow] : observed >= *r[m.flow];
            if (over || m.missed) ++rep.sufficiency_violations;
        }
        for (const SelfSuspensionStats& s : self_suspensions(trace, fs)) {
            if (!std::binary_search(ss[s.observer].begin(), ss[s.observer].end(), s.suspended)) {
                ++rep.suspension_set_violations;
            }
            if (r[s.suspended] && s.max_per_message > *r[s.suspended] - effective_time(fs[s.suspended])) {
                ++rep.suspension_time_violations;
            }
        }
    };

    run(ReleasePattern::synchronous(fs, rep.horizon));
    for (std::size_t k = 0; k < cfg.sporadic_runs; ++k) {
        run(ReleasePattern::sporadic(fs, splitmix64(seed * 0x100000001b3ULL + k), rep.horizon, cfg.extra_delay_p));
    }
    return rep;
}

std::size_t ExperimentReport::hard_violations() const {
    std::size_t total = 0;
    for (const auto& inst : instances) total += inst.hard_violations();
    return total;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    ExperimentReport report;
    if (cfg.flowset_file) {
        report.instances.push_back(evaluate_instance(load_flowset(*cfg.flowset_file), cfg.first_seed, cfg));
    } else {
        for (std::size_t n = 0; n < cfg.instances; ++n) {
            GeneratorParams p = cfg.generator;
            p.seed = cfg.first_seed + n;
            report.instances.push_back(evaluate_instance(generate_flowset(p), p.seed, cfg));
        }
    }

    std::map<long, UtilizationBin> bins;
    for (const auto& inst : report.instances) {
        const long idx = static_cast<long>(std::floor(inst.max_link_utilization / cfg.utilization_bin));
        auto& bin = bins[idx];
        bin.lower = static_cast<double>(idx) * cfg.utilization_bin;
        bin.upper = bin.lower + cfg.utilization_bin;
        ++bin.instances;
        if (inst.analysis.all_schedulable_sp2()) ++bin.schedulable_sp2;
        if (inst.analysis.all_schedulable_baseline()) ++bin.schedulable_baseline;
    }
    for (auto& [idx, bin] : bins) report.bins.push_back(bin);
    return report;
}

void write_summary(std::ostream& os, const ExperimentReport& report) {
    std::size_t flows = 0;
    std::size_t sched_sp2 = 0;
    std::size_t sched_base = 0;
    std::size_t runs = 0;
    std::size_t misses = 0;
    std::size_t invalid = 0;
    std::size_t dominance = 0;
    std::size_t rhs = 0;
    std::size_t sufficiency = 0;
    std::size_t trace = 0;
    std::size_t ss_set_v = 0;
    std::size_t ss_time_v = 0;
    for (const auto& inst : report.instances) {
        flows += inst.flow_count;
        for (const auto& fa : inst.analysis.flows) {
            sched_sp2 += fa.schedulable_sp2() ? 1 : 0;
            sched_base += fa.schedulable_baseline() ? 1 : 0;
        }
        runs += inst.simulation_runs;
        misses += inst.deadline_misses;
        invalid += inst.model_invalid_runs;
        dominance += inst.dominance.violations.size();
        rhs += inst.rhs_mismatches;
        sufficiency += inst.sufficiency_violations;
        trace += inst.trace_violations;
        ss_set_v += inst.suspension_set_violations;
        ss_time_v += inst.suspension_time_violations;
    }
    os << "instances " << report.instances.size() << '\n'
       << "flows " << flows << '\n'
       << "flows_schedulable_sp2 " << sched_sp2 << '\n'
       << "flows_schedulable_baseline " << sched_base << '\n'
       << "simulation_runs " << runs << '\n'
       << "deadline_misses " << misses << '\n'
       << "model_invalid_runs " << invalid << '\n'
       << "dominance_violations " << dominance << '\n'
       << "rhs_mismatches " << rhs << '\n'
       << "sufficiency_violations " << sufficiency << '\n'
       << "trace_violations " << trace << '\n'
       << "suspension_set_violations " << ss_set_v << '\n'
       << "suspension_time_violations " << ss_time_v << '\n';
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        return out;
    };
    auto opt = [](const std::optional<Cycles>& v) { return v ? std::to_string(*v) : std::string(); };

    {
        auto out = open("instances.csv");
        out << "seed,flows,max_link_util,schedulable_sp2,schedulable_baseline,dominance_violations,"
               "rhs_mismatches,sim_runs,horizon,deadline_misses,sufficiency_violations,trace_violations,"
               "suspension_set_violations,suspension_time_violations,model_invalid_runs\n";
        out << std::fixed << std::setprecision(6);
        for (const auto& inst : report.instances) {
            out << inst.seed << ',' << inst.flow_count << ',' << inst.max_link_utilization << ','
                << (inst.analysis.all_schedulable_sp2() ? 1 : 0) << ','
                << (inst.analysis.all_schedulable_baseline() ? 1 : 0) << ',' << inst.dominance.violations.size()
                << ',' << inst.rhs_mismatches << ',' << inst.simulation_runs << ',' << inst.horizon << ','
                << inst.deadline_misses << ',' << inst.sufficiency_violations << ',' << inst.trace_violations << ','
                << inst.suspension_set_violations << ',' << inst.suspension_time_violations << ','
                << inst.model_invalid_runs << '\n';
        }
    }
    {
        auto out = open("flows.csv");
        out << "seed,flow_index,R_sp2,R_baseline,max_observed\n";
        for (const auto& inst : report.instances) {
            for (std::size_t k = 0; k < inst.analysis.flows.size(); ++k) {
                const auto& fa = inst.analysis.flows[k];
                out << inst.seed << ',' << k << ',' << opt(fa.r_sp2) << ',' << opt(fa.r_baseline) << ','
                    << opt(inst.max_observed_response[k]) << '\n';
            }
        }
    }
    {
        auto out = open("ratios.csv");
        out << "util_lo,util_hi,instances,schedulable_sp2,schedulable_baseline,ratio_sp2,ratio_baseline\n";
        out << std::fixed << std::setprecision(6);
        for (const auto& bin : report.bins) {
            const double n = static_cast<double>(bin.instances);
            out << bin.lower << ',' << bin.upper << ',' << bin.instances << ',' << bin.schedulable_sp2 << ','
                << bin.schedulable_baseline << ',' << static_cast<double>(bin.schedulable_sp2) / n << ','
                << static_cast<double>(bin.schedulable_baseline) / n << '\n';
        }
    }
    {
        auto out = open("summary.txt");
        write_summary(out, report);
    }
}

}  // namespace sp2

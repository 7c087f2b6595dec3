// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "sp2/experiment.hpp"
#include "sp2/generator.hpp"
#include "sp2/progression.hpp"
#include "sp2/rta.hpp"
#include "sp2/simulator.hpp"
#include "support/test_support.hpp"

using namespace sp2;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Shared between criteria 5 and 6, and 1 and 6.
std::size_t g_trace_checks = 0;
std::size_t g_trace_violations = 0;

void count_trace(const ScheduleTrace& trace, const FlowSet& fs) {
    ++g_trace_checks;
    g_trace_violations += check_trace(trace, fs, SIZE_MAX).violations.size();
}

constexpr std::size_t kInstances = 1000;
constexpr std::size_t kSporadicSeeds = 20;

GeneratorParams instance_params(std::uint64_t seed) {
    // 4x4 mesh, loaded enough that some flows fail the analysis and miss in
    // simulation: the sufficiency check is only meaningful under contention.
    GeneratorParams p;
    p.flow_count = 10;
    p.flits_max = 64;
    p.period_min = 50;
    p.period_max = 800;
    p.seed = seed;
    return p;
}

Outcome example1() {
    Outcome o;
    std::ostringstream why;
    const auto fs = testing::example1();
    const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 100), 100);
    count_trace(trace, fs);
    const std::vector<Cycles> expect{20, 40, 50};
    for (std::size_t i = 0; i < 3; ++i) {
        if (trace.messages[i].completion != expect[i]) {
            o.ok = false;
            why << " f" << fs[i].id << " completed at "
                << (trace.messages[i].completion ? std::to_string(*trace.messages[i].completion) : "never");
        }
    }
    // f3 holds nothing while f2 transmits.
    for (Cycles t = 0; t < trace.horizon(); ++t) {
        bool f2_on = trace.owner(t, fs[1].path.links[0]) == std::optional<std::size_t>{1};
        if (!f2_on) continue;
        for (LinkId l : fs[2].path.links) {
            if (trace.owner(t, l) == std::optional<std::size_t>{2}) {
                o.ok = false;
                why << " f3 holds a link at " << t;
            }
        }
    }
    // Self-suspension witness of f2 on f3's links.
    Cycles witness = 0;
    for (const auto& s : self_suspensions(trace, fs)) {
        if (s.observer == 2 && s.suspended == 1) witness = s.total;
    }
    if (witness != 20) {
        o.ok = false;
        why << " witness cycles " << witness;
    }
    // Replay each flow's grants through the buffer model: the SP2 series must
    // end exactly at the reported completion, after C+eta-1 moves.
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& f = fs[i];
        auto b = progression::BufferState::initial(static_cast<int>(f.flits), static_cast<int>(f.eta()));
        Cycles moves = 0;
        std::optional<Cycles> end;
        for (Cycles t = 0; t < trace.horizon() && !end; ++t) {
            if (trace.owner(t, f.path.links[0]) != std::optional<std::size_t>{i}) continue;
            auto next = progression::sp2_successor(b);
            if (!next) break;
            b = next->state;
            ++moves;
            if (b.terminal()) end = t + 1;
        }
        if (end != expect[i] || moves != progression::sp2_series_length(f.flits, static_cast<int>(f.eta())) ||
            moves != effective_time(f)) {
            o.ok = false;
            why << " replay of f" << f.id << " ends at " << (end ? std::to_string(*end) : "never");
        }
    }
    o.detail = o.ok ? "completions 20,40,50; replay agrees; f2 self-suspended 20 cycles on f3's links" : why.str();
    return o;
}

Outcome progression_bounds() {
    Outcome o;
    std::ostringstream why;
    for (int c = 1; c <= 6; ++c) {
        for (int eta = 1; eta <= 4; ++eta) {
            const auto b = progression::series_bounds(c, eta);
            if (b.min_len != c + eta - 1 || b.max_len != c * eta) {
                o.ok = false;
                why << " (" << c << "," << eta << ")->(" << b.min_len << "," << b.max_len << ")";
            }
        }
    }
    o.detail = o.ok ? "24 (C, eta) pairs match (C+eta-1, C*eta)" : why.str();
    return o;
}

Outcome ss_identity() {
    Outcome o;
    std::mt19937_64 rng(20240101);
    std::size_t mismatches = 0;
    constexpr int kSets = 10000;
    for (int n = 0; n < kSets; ++n) {
        const auto fs = testing::random_flowset(rng);
        for (std::size_t k = 0; k < fs.size(); ++k) mismatches += ss_set(fs, k) != share1_set(fs, k);
    }
    o.ok = mismatches == 0;
    o.detail = std::to_string(kSets) + " sets, " + std::to_string(mismatches) + " mismatches";
    return o;
}

Outcome dominance() {
    Outcome o;
    std::size_t violations = 0, mismatches = 0, compared = 0;
    for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
        const auto fs = generate_flowset(instance_params(seed));
        const auto rep = dominance_check(fs);
        violations += rep.violations.size();
        compared += rep.compared;
        mismatches += rhs_agreement(fs, analyze_all(fs).response_times_sp2()).size();
    }
    o.ok = violations == 0 && mismatches == 0;
    o.detail = std::to_string(kInstances) + " instances, " + std::to_string(compared) + " flows compared, " +
               std::to_string(violations) + " violations, " + std::to_string(mismatches) + " rhs mismatches";
    return o;
}

Outcome sufficiency() {
    Outcome o;
    ExperimentConfig cfg;
    cfg.sporadic_runs = kSporadicSeeds;
    cfg.horizon_periods = 2;
    cfg.horizon_cap = 1'000'000;
    std::size_t bad = 0, schedulable_misses = 0, runs = 0, schedulable_flows = 0, all_misses = 0;
    for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
        const auto fs = generate_flowset(instance_params(seed));
        const auto rep = evaluate_instance(fs, seed, cfg);
        bad += rep.sufficiency_violations + rep.suspension_set_violations + rep.suspension_time_violations;
        runs += rep.simulation_runs;
        all_misses += rep.deadline_misses;
        g_trace_checks += rep.simulation_runs;
        g_trace_violations += rep.trace_violations;
        for (std::size_t k = 0; k < fs.size(); ++k) {
            const auto& r = rep.analysis.flows[k].r_sp2;
            if (!r) continue;
            ++schedulable_flows;
            const auto& seen = rep.max_observed_response[k];
            if (seen && *seen > fs[k].deadline) ++schedulable_misses;
        }
    }
    o.ok = bad == 0 && schedulable_misses == 0;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(schedulable_flows) + " schedulable flows, " +
               std::to_string(schedulable_misses) + " misses among them (" + std::to_string(all_misses) +
               " misses over all flows), " + std::to_string(bad) + " bound violations";
    return o;
}

Outcome invariant() {
    Outcome o;
    o.ok = g_trace_violations == 0 && g_trace_checks > 0;
    o.detail = std::to_string(g_trace_checks) + " traces, " + std::to_string(g_trace_violations) + " violations";
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_s;  // 0: no limit
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "Example 1 golden schedule", 1.0, example1},
        {2, "progression bounds", 10.0, progression_bounds},
        {3, "SS identity", 30.0, ss_identity},
        {4, "dominance over baseline", 60.0, dominance},
        {5, "sufficiency in simulation", 0.0, sufficiency},
        {6, "all-or-nothing invariant", 0.0, invariant},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs > c.limit_s) {
            o.ok = false;
            o.detail += " (over the time limit)";
        }
        std::printf("%s criterion %d: %s -- %s [%.2fs", o.ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        if (c.limit_s > 0) std::printf(" / %.0fs", c.limit_s);
        std::printf("]\n");
        std::fflush(stdout);
        failed += !o.ok;
    }
    return failed == 0 ? 0 : 1;
}

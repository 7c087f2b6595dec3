#include "sp2/rta.hpp"

#include <algorithm>
#include <stdexcept>

namespace sp2 {

namespace {

Cycles ceil_div(Cycles a, Cycles b) { return (a + b - 1) / b; }

bool contains(const std::vector<std::size_t>& sorted, std::size_t v) {
    return std::binary_search(sorted.begin(), sorted.end(), v);
}

void check_k(const FlowSet& fs, std::size_t k, ResponseTimes r) {
    if (k >= fs.size()) throw std::out_of_range("flow index out of range");
    if (r.size() < k) throw std::invalid_argument("response times missing for higher-priority flows");
    if (fs[k].deadline > fs[k].period) {
        throw std::invalid_argument("flow " + std::to_string(fs[k].id) + " has D > T");
    }
}

std::string missing_response(const FlowSet& fs, std::size_t j) {
    return "higher-priority flow " + std::to_string(fs[j].id) + " has no response time";
}

}  // namespace

const char* to_string(XPolicy p) {
    switch (p) {
        case XPolicy::SuspendingZero: return "suspending-zero";
        case XPolicy::Exhaustive: return "exhaustive";
        case XPolicy::AllZero: return "all-zero";
    }
    return "?";
}

Cycles BackPressure::operator()(std::size_t j, std::size_t k) const {
    if (const auto it = per_pair.find({j, k}); it != per_pair.end()) return it->second;
    return uniform;
}

void BackPressure::validate() const {
    if (uniform < 0) throw std::invalid_argument("back-pressure must be non-negative");
    for (const auto& [pair, v] : per_pair) {
        if (v < 0) throw std::invalid_argument("back-pressure must be non-negative");
    }
}

std::vector<TransformedFlow> transform_flowset(const FlowSet& fs, std::size_t k, ResponseTimes r) {
    check_k(fs, k, r);
    const auto share = share_set(fs, k);
    const auto ss = ss_set(fs, k);
    std::vector<TransformedFlow> out;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        TransformedFlow tf;
        tf.flow = j;
        tf.c_hat = effective_time(fs[j]);
        tf.period = fs[j].period;
        tf.deadline = fs[j].deadline;
        tf.interferes = contains(share, j);
        if (contains(ss, j)) {
            if (!r[j]) throw std::invalid_argument(missing_response(fs, j));
            tf.suspension = *r[j] - tf.c_hat;
        }
        out.push_back(tf);
    }
    return out;
}

InterferenceModel InterferenceModel::build(const FlowSet& fs, std::size_t k, ResponseTimes r) {
    check_k(fs, k, r);
    InterferenceModel m;
    m.k = k;
    m.c_hat = effective_time(fs[k]);
    m.deadline = fs[k].deadline;
    const auto ss = ss_set(fs, k);
    const auto share1 = share1_set(fs, k);
    for (std::size_t j : share_set(fs, k)) {
        if (!r[j]) throw std::invalid_argument(missing_response(fs, j));
        Term term;
        term.flow = j;
        term.c_hat = effective_time(fs[j]);
        term.period = fs[j].period;
        term.response_slack = *r[j] - term.c_hat;
        term.self_suspending = contains(ss, j);
        term.in_share1 = contains(share1, j);
        term.suspension = term.self_suspending ? term.response_slack : 0;
        m.terms.push_back(term);
    }
    return m;
}

std::vector<bool> InterferenceModel::suspending_zero_assignment() const {
    std::vector<bool> x(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) x[i] = !terms[i].self_suspending;
    return x;
}

Cycles InterferenceModel::sp2_rhs(Cycles t, const std::vector<bool>& x) const {
    // S_k = 0 for the flow under analysis.
    Cycles total = c_hat;
    // Q_i = sum over later terms j >= i of S_j * x_j; accumulate from the back.
    Cycles carry = 0;
    for (std::size_t i = terms.size(); i-- > 0;) {
        const Term& term = terms[i];
        if (x[i]) carry += term.suspension;
        const Cycles jitter = x[i] ? 0 : term.response_slack;
        total += ceil_div(t + carry + jitter, term.period) * term.c_hat;
    }
    return total;
}

Cycles InterferenceModel::baseline_rhs(Cycles t, const BackPressure& b) const {
    Cycles total = c_hat;
    for (const Term& term : terms) {
        const Cycles jitter = term.in_share1 ? term.response_slack : 0;
        total += ceil_div(t + jitter, term.period) * (term.c_hat + b(term.flow, k));
    }
    return total;
}

Sp2Response rta_sp2(const FlowSet& fs, std::size_t k, XPolicy policy, ResponseTimes r) {
    const auto model = InterferenceModel::build(fs, k, r);
    auto solve = [&](const std::vector<bool>& x) {
        return solve_fixed_point(model.c_hat, model.deadline, [&](Cycles t) { return model.sp2_rhs(t, x); });
    };

    Sp2Response out;
    auto consider = [&](const std::vector<bool>& x) {
        const FixedPoint fp = solve(x);
        ++out.vectors_evaluated;
        out.iterations += fp.iterations;
        if (fp.value && (!out.response || *fp.value < *out.response)) {
            out.response = fp.value;
            out.x = x;
        }
    };

    const auto base = model.suspending_zero_assignment();
    std::vector<std::size_t> suspending;
    for (std::size_t i = 0; i < model.terms.size(); ++i) {
        if (model.terms[i].self_suspending) suspending.push_back(i);
    }

    switch (policy) {
        case XPolicy::SuspendingZero:
            consider(base);
            break;
        case XPolicy::AllZero:
            consider(std::vector<bool>(model.terms.size(), false));
            break;
        case XPolicy::Exhaustive:
            if (suspending.size() > kMaxExhaustiveBits) {
                consider(base);
                consider(std::vector<bool>(model.terms.size(), false));
                break;
            }
            // Terms without suspension keep x = 1: x = 0 would only add
            // jitter without shrinking any carry-in.
            for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << suspending.size()); ++mask) {
                std::vector<bool> x = base;
                for (std::size_t b = 0; b < suspending.size(); ++b) x[suspending[b]] = (mask >> b) & 1U;
                consider(x);
            }
            break;
    }
    if (!out.response) out.x = base;
    return out;
}

FixedPoint rta_baseline(const FlowSet& fs, std::size_t k, const BackPressure& b, ResponseTimes r) {
    b.validate();
    const auto model = InterferenceModel::build(fs, k, r);
    return solve_fixed_point(model.c_hat, model.deadline, [&](Cycles t) { return model.baseline_rhs(t, b); });
}

bool AnalysisResult::all_schedulable_sp2() const {
    return std::all_of(flows.begin(), flows.end(), [](const FlowAnalysis& f) { return f.schedulable_sp2(); });
}

bool AnalysisResult::all_schedulable_baseline() const {
    return std::all_of(flows.begin(), flows.end(), [](const FlowAnalysis& f) { return f.schedulable_baseline(); });
}

std::vector<std::optional<Cycles>> AnalysisResult::response_times_sp2() const {
    std::vector<std::optional<Cycles>> r;
    for (const auto& f : flows) r.push_back(f.r_sp2);
    return r;
}

std::vector<std::optional<Cycles>> AnalysisResult::response_times_baseline() const {
    std::vector<std::optional<Cycles>> r;
    for (const auto& f : flows) r.push_back(f.r_baseline);
    return r;
}

AnalysisResult analyze_all(const FlowSet& fs, const AnalysisOptions& options) {
    fs.require_constrained_deadlines();
    options.back_pressure.validate();
    AnalysisResult result;
    result.flows.resize(fs.size());
    std::vector<std::optional<Cycles>> r_sp2(fs.size());
    std::vector<std::optional<Cycles>> r_base(fs.size());

    for (std::size_t k = 0; k < fs.size(); ++k) {
        const auto share = share_set(fs, k);
        auto known = [&](const std::vector<std::optional<Cycles>>& r) {
            return std::all_of(share.begin(), share.end(), [&](std::size_t j) { return r[j].has_value(); });
        };
        FlowAnalysis& fa = result.flows[k];
        if (known(r_sp2)) {
            const auto res = rta_sp2(fs, k, options.policy, r_sp2);
            fa.r_sp2 = res.response;
            fa.iterations_sp2 = res.iterations;
            fa.x = res.x;
            fa.vectors_evaluated = res.vectors_evaluated;
        }
        if (known(r_base)) {
            const auto res = rta_baseline(fs, k, options.back_pressure, r_base);
            fa.r_baseline = res.value;
            fa.iterations_baseline = res.iterations;
        }
        r_sp2[k] = fa.r_sp2;
        r_base[k] = fa.r_baseline;
    }
    return result;
}

DominanceReport dominance_check(const FlowSet& fs) {
    const auto result = analyze_all(fs, {});
    DominanceReport report;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        const auto& fa = result.flows[k];
        if (!fa.r_baseline) continue;
        ++report.compared;
        if (!fa.r_sp2 || *fa.r_sp2 > *fa.r_baseline) {
            report.violations.push_back({k, fa.r_sp2, *fa.r_baseline});
        }
    }
    return report;
}

std::vector<RhsMismatch> rhs_agreement(const FlowSet& fs, ResponseTimes r) {
    std::vector<RhsMismatch> out;
    const BackPressure none;
    for (std::size_t k = 0; k < fs.size(); ++k) {
        const auto share = share_set(fs, k);
        if (!std::all_of(share.begin(), share.end(), [&](std::size_t j) { return j < r.size() && r[j]; })) continue;
        const auto model = InterferenceModel::build(fs, k, r);
        const auto x = model.suspending_zero_assignment();
        for (Cycles t = 1; t <= fs[k].deadline; ++t) {
            const Cycles a = model.sp2_rhs(t, x);
            const Cycles b = model.baseline_rhs(t, none);
            if (a != b) out.push_back({k, t, a, b});
        }
    }
    return out;
}

}  // namespace sp2

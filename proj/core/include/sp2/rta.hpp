#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sp2/flowset.hpp"

namespace sp2 {

/// How the binary vector x of the suspension-aware test is chosen.
enum class XPolicy {
    /// x_j = 0 for self-suspending interferers, 1 otherwise. Every carry-in
    /// offset Q then vanishes.
    SuspendingZero,
    /// Minimum over every assignment of the self-suspending interferers
    /// (each one is a safe test). Falls back to the better of
    /// SuspendingZero and AllZero above kMaxExhaustiveBits members.
    Exhaustive,
    /// x_j = 0 for every interferer.
    AllZero,
};

inline constexpr std::size_t kMaxExhaustiveBits = 16;

[[nodiscard]] const char* to_string(XPolicy p);

/// Higher-priority response times, indexed like the flow set; std::nullopt
/// for flows that are not (yet) known to be schedulable.
using ResponseTimes = std::span<const std::optional<Cycles>>;

/// Per-pair back-pressure term B(j -> k) of the wormhole baseline, keyed by
/// flow index.
struct BackPressure {
    Cycles uniform = 0;
    std::map<std::pair<std::size_t, std::size_t>, Cycles> per_pair;

    [[nodiscard]] Cycles operator()(std::size_t j, std::size_t k) const;
    /// Throws std::invalid_argument on any negative entry.
    void validate() const;
};

/// One higher-priority flow as seen by the analysis of flow k.
struct TransformedFlow {
    std::size_t flow = 0;
    Cycles c_hat = 0;
    Cycles period = 0;
    Cycles deadline = 0;
    /// R_j - C^_j for members of SS(k), else 0.
    Cycles suspension = 0;
    /// False for flows outside share(k): reported, but they add no
    /// interference term.
    bool interferes = false;
};

/// Transformed view of flows 0..k-1 for the analysis of flow k. Throws
/// std::invalid_argument when a self-suspending interferer has no response
/// time.
[[nodiscard]] std::vector<TransformedFlow> transform_flowset(const FlowSet& fs, std::size_t k, ResponseTimes r);

/// Interference terms of flow k under both analyses, with everything that
/// does not depend on t resolved up front.
struct InterferenceModel {
    struct Term {
        std::size_t flow = 0;
        Cycles c_hat = 0;
        Cycles period = 0;
        Cycles response_slack = 0;  ///< R_j - C^_j
        Cycles suspension = 0;      ///< S_j; non-zero only for self-suspending members
        bool self_suspending = false;  ///< member of SS(k)
        bool in_share1 = false;        ///< member of share1(k)
    };

    std::size_t k = 0;
    Cycles c_hat = 0;
    Cycles deadline = 0;
    std::vector<Term> terms;  ///< share(k), priority order

    /// Throws std::invalid_argument if any member of share(k) lacks a
    /// response time.
    static InterferenceModel build(const FlowSet& fs, std::size_t k, ResponseTimes r);

    /// Default assignment for the terms: false (x=0) for self-suspending
    /// members, true otherwise.
    [[nodiscard]] std::vector<bool> suspending_zero_assignment() const;

    /// Right-hand side of the suspension-aware test at t for the binary
    /// vector x (one entry per term).
    [[nodiscard]] Cycles sp2_rhs(Cycles t, const std::vector<bool>& x) const;

    /// Right-hand side of the wormhole baseline at t; share1 membership gives
    /// the interference jitter.
    [[nodiscard]] Cycles baseline_rhs(Cycles t, const BackPressure& b) const;
};

struct FixedPoint {
    std::optional<Cycles> value;  ///< std::nullopt when the iteration exceeded the limit
    std::size_t iterations = 0;
};

/// Least fixed point of t = rhs(t) by iteration from `start`; gives up as
/// soon as an iterate exceeds `limit`. rhs must be non-decreasing.
template <typename Rhs>
FixedPoint solve_fixed_point(Cycles start, Cycles limit, Rhs&& rhs) {
    FixedPoint fp;
    Cycles t = start;
    while (t <= limit) {
        ++fp.iterations;
        const Cycles next = rhs(t);
        if (next == t) {
            fp.value = t;
            return fp;
        }
        t = next;
    }
    return fp;
}

struct Sp2Response {
    std::optional<Cycles> response;
    std::size_t iterations = 0;
    std::vector<bool> x;                ///< assignment achieving `response` (or the suspending-zero one)
    std::size_t vectors_evaluated = 0;
};

/// Suspension-aware response-time bound of flow k under fixed-priority SP2.
/// Returns no response when the bound exceeds D_k.
[[nodiscard]] Sp2Response rta_sp2(const FlowSet& fs, std::size_t k, XPolicy policy, ResponseTimes r);

/// Wormhole baseline bound with interference jitter for share1 members and
/// back-pressure b.
[[nodiscard]] FixedPoint rta_baseline(const FlowSet& fs, std::size_t k, const BackPressure& b, ResponseTimes r);

struct FlowAnalysis {
    std::optional<Cycles> r_sp2;
    std::optional<Cycles> r_baseline;
    std::size_t iterations_sp2 = 0;
    std::size_t iterations_baseline = 0;
    std::vector<bool> x;  ///< chosen assignment over share(k), priority order
    std::size_t vectors_evaluated = 0;

    [[nodiscard]] bool schedulable_sp2() const { return r_sp2.has_value(); }
    [[nodiscard]] bool schedulable_baseline() const { return r_baseline.has_value(); }
};

struct AnalysisOptions {
    XPolicy policy = XPolicy::SuspendingZero;
    BackPressure back_pressure;
};

struct AnalysisResult {
    std::vector<FlowAnalysis> flows;

    [[nodiscard]] bool all_schedulable_sp2() const;
    [[nodiscard]] bool all_schedulable_baseline() const;
    [[nodiscard]] std::vector<std::optional<Cycles>> response_times_sp2() const;
    [[nodiscard]] std::vector<std::optional<Cycles>> response_times_baseline() const;
};

/// Both analyses in priority order. A flow whose interferer failed a test is
/// reported unschedulable by that test without being analyzed.
[[nodiscard]] AnalysisResult analyze_all(const FlowSet& fs, const AnalysisOptions& options = {});

struct DominanceViolation {
    std::size_t flow = 0;
    std::optional<Cycles> r_sp2;
    Cycles r_baseline = 0;
};

struct DominanceReport {
    std::vector<DominanceViolation> violations;
    std::size_t compared = 0;  ///< flows where the baseline converged
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Checks, per flow, that the SP2 bound (suspending-zero assignment) never exceeds the
/// zero-back-pressure baseline whenever the latter converges.
[[nodiscard]] DominanceReport dominance_check(const FlowSet& fs);

struct RhsMismatch {
    std::size_t flow = 0;
    Cycles t = 0;
    Cycles sp2 = 0;
    Cycles baseline = 0;
};

/// Compares the two right-hand sides (suspending-zero assignment, zero back-pressure)
/// at every t in [1, D_k] for each flow whose interferers all have response
/// times in r.
[[nodiscard]] std::vector<RhsMismatch> rhs_agreement(const FlowSet& fs, ResponseTimes r);

}  // namespace sp2

#pragma once

#include <cstdint>

#include "sp2/flowset.hpp"

namespace sp2 {

/// Random flow sets on a mesh with XY routing and deadline-monotonic
/// priorities (ties broken by flow id).
struct GeneratorParams {
    int rows = 4;
    int cols = 4;
    bool with_core_links = false;
    std::size_t flow_count = 8;
    Cycles flits_min = 1;
    Cycles flits_max = 32;
    /// Periods are drawn log-uniformly from [period_min, period_max].
    Cycles period_min = 100;
    Cycles period_max = 2000;
    /// D = max(C^, floor(d * T)) with d uniform in [deadline_factor_min, deadline_factor_max].
    double deadline_factor_min = 0.5;
    double deadline_factor_max = 1.0;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on empty ranges, non-positive values or a
    /// flow count above the number of distinct ordered router pairs.
    void validate() const;
};

/// Deterministic in the parameters (including the seed). Each flow gets a
/// distinct (source, destination) router pair; a period shorter than the
/// flow's effective time is raised to it so that D <= T always holds.
[[nodiscard]] FlowSet generate_flowset(const GeneratorParams& p);

}  // namespace sp2

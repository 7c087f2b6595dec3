#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sp2/topology.hpp"

namespace sp2 {

using Cycles = std::int64_t;

struct Flow {
    int id = 0;
    int priority = 0;  ///< unique, smaller value = higher priority
    Cycles flits = 1;  ///< C
    Cycles period = 1;  ///< T (minimum inter-arrival time)
    Cycles deadline = 1;  ///< D
    Path path;

    [[nodiscard]] std::size_t eta() const { return path.eta(); }
    bool operator==(const Flow&) const = default;
};

/// Time a flow needs all of its links simultaneously to deliver one message:
/// C + eta - 1.
[[nodiscard]] Cycles effective_time(const Flow& f);

/// Flows of one NoC, indexed in priority order (index 0 is the highest
/// priority). Construction validates flow parameters, path chaining and
/// priority uniqueness; it does not require D <= T, which the analysis
/// entry points check.
class FlowSet {
public:
    FlowSet(std::shared_ptr<const Topology> topology, std::vector<Flow> flows);

    [[nodiscard]] const Topology& topology() const { return *topology_; }
    [[nodiscard]] const std::shared_ptr<const Topology>& topology_ptr() const { return topology_; }
    [[nodiscard]] std::span<const Flow> flows() const { return flows_; }
    [[nodiscard]] const Flow& operator[](std::size_t i) const { return flows_[i]; }
    [[nodiscard]] std::size_t size() const { return flows_.size(); }
    [[nodiscard]] bool empty() const { return flows_.empty(); }

    /// True iff the paths of flows a and b have a directed link in common.
    [[nodiscard]] bool intersects(std::size_t a, std::size_t b) const;

    /// Throws std::invalid_argument unless every flow has D <= T.
    void require_constrained_deadlines() const;

    bool operator==(const FlowSet& other) const;

private:
    std::shared_ptr<const Topology> topology_;
    std::vector<Flow> flows_;
    std::vector<std::vector<bool>> overlap_;
};

/// Indices j < i whose path shares a link with flow i.
[[nodiscard]] std::vector<std::size_t> share_set(const FlowSet& fs, std::size_t i);

/// Members l of share(i) that share a link with some flow n in share(l)
/// whose path is disjoint from flow i's path: the flows that can appear to
/// self-suspend on flow i's links.
[[nodiscard]] std::vector<std::size_t> ss_set(const FlowSet& fs, std::size_t i);

/// share(k) minus the members l for which share(l) \ share(k) is empty.
/// Evaluated directly from that set expression; see ss_set for the
/// equivalent existential form.
[[nodiscard]] std::vector<std::size_t> share1_set(const FlowSet& fs, std::size_t k);

/// Peak over links of the summed effective-time utilization of the flows
/// crossing that link.
[[nodiscard]] double max_link_utilization(const FlowSet& fs);

}  // namespace sp2

#include "sp2/flowset.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace sp2 {

Cycles effective_time(const Flow& f) {
    return f.flits + static_cast<Cycles>(f.eta()) - 1;
}

FlowSet::FlowSet(std::shared_ptr<const Topology> topology, std::vector<Flow> flows)
    : topology_(std::move(topology)), flows_(std::move(flows)) {
    if (!topology_) {
        throw std::invalid_argument("flow set needs a topology");
    }
    std::unordered_set<int> priorities;
    for (const Flow& f : flows_) {
        const std::string who = "flow " + std::to_string(f.id) + ": ";
        if (f.flits < 1) throw std::invalid_argument(who + "flit count must be >= 1");
        if (f.period < 1) throw std::invalid_argument(who + "period must be >= 1");
        if (f.deadline < 1) throw std::invalid_argument(who + "deadline must be >= 1");
        if (f.priority < 1) throw std::invalid_argument(who + "priority must be positive");
        if (!priorities.insert(f.priority).second) {
            throw std::invalid_argument(who + "duplicate priority " + std::to_string(f.priority));
        }
        // Re-validates chaining and link existence.
        (void)topology_->make_path(f.path.links);
    }
    std::stable_sort(flows_.begin(), flows_.end(),
                     [](const Flow& a, const Flow& b) { return a.priority < b.priority; });

    const std::size_t n = flows_.size();
    overlap_.assign(n, std::vector<bool>(n, false));
    std::vector<std::vector<std::size_t>> users(topology_->link_count());
    for (std::size_t i = 0; i < n; ++i) {
        for (LinkId l : flows_[i].path.links) users[l.value].push_back(i);
    }
    for (const auto& on_link : users) {
        for (std::size_t a : on_link) {
            for (std::size_t b : on_link) overlap_[a][b] = true;
        }
    }
}

bool FlowSet::intersects(std::size_t a, std::size_t b) const {
    return overlap_.at(a).at(b);
}

void FlowSet::require_constrained_deadlines() const {
    for (const Flow& f : flows_) {
        if (f.deadline > f.period) {
            throw std::invalid_argument("flow " + std::to_string(f.id) +
                                        ": analysis requires a constrained deadline (D <= T)");
        }
    }
}

bool FlowSet::operator==(const FlowSet& other) const {
    return topology_->rows() == other.topology_->rows() && topology_->cols() == other.topology_->cols() &&
           topology_->has_core_links() == other.topology_->has_core_links() && flows_ == other.flows_;
}

std::vector<std::size_t> share_set(const FlowSet& fs, std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < i; ++j) {
        if (fs.intersects(j, i)) out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> ss_set(const FlowSet& fs, std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t l : share_set(fs, i)) {
        const auto share_l = share_set(fs, l);
        const bool has_transparent_blocker =
            std::any_of(share_l.begin(), share_l.end(), [&](std::size_t n) { return !fs.intersects(n, i); });
        if (has_transparent_blocker) out.push_back(l);
    }
    return out;
}

std::vector<std::size_t> share1_set(const FlowSet& fs, std::size_t k) {
    const auto share_k = share_set(fs, k);
    const std::unordered_set<std::size_t> in_share_k(share_k.begin(), share_k.end());
    std::vector<std::size_t> out;
    for (std::size_t l : share_k) {
        std::vector<std::size_t> difference;
        for (std::size_t n : share_set(fs, l)) {
            if (!in_share_k.contains(n)) difference.push_back(n);
        }
        if (!difference.empty()) out.push_back(l);
    }
    return out;
}

double max_link_utilization(const FlowSet& fs) {
    std::map<std::uint32_t, double> load;
    for (const Flow& f : fs.flows()) {
        const double u = static_cast<double>(effective_time(f)) / static_cast<double>(f.period);
        for (LinkId l : f.path.links) load[l.value] += u;
    }
    double peak = 0.0;
    for (const auto& [link, u] : load) peak = std::max(peak, u);
    return peak;
}

}  // namespace sp2

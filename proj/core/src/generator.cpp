#include "sp2/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace sp2 {

void GeneratorParams::validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("generator: mesh dimensions must be positive");
    if (flits_min < 1 || flits_max < flits_min) throw std::invalid_argument("generator: bad flit range");
    if (period_min < 1 || period_max < period_min) throw std::invalid_argument("generator: bad period range");
    if (!(deadline_factor_min > 0.0) || deadline_factor_max > 1.0 || deadline_factor_max < deadline_factor_min) {
        throw std::invalid_argument("generator: deadline factors must satisfy 0 < min <= max <= 1");
    }
    const auto routers = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (flow_count > routers * (routers - 1)) {
        throw std::invalid_argument("generator: more flows than distinct router pairs");
    }
}

FlowSet generate_flowset(const GeneratorParams& p) {
    p.validate();
    auto topology = std::make_shared<const Topology>(Topology::build_mesh(p.rows, p.cols, p.with_core_links));
    std::mt19937_64 rng(p.seed);
    const auto routers = static_cast<std::uint32_t>(topology->router_count());

    std::uniform_int_distribution<std::uint32_t> pick_router(0, routers - 1);
    std::uniform_int_distribution<Cycles> pick_flits(p.flits_min, p.flits_max);
    std::uniform_real_distribution<double> pick_log_period(std::log(static_cast<double>(p.period_min)),
                                                           std::log(static_cast<double>(p.period_max)));
    std::uniform_real_distribution<double> pick_factor(p.deadline_factor_min, p.deadline_factor_max);

    std::set<std::pair<std::uint32_t, std::uint32_t>> used_pairs;
    std::vector<Flow> flows;
    flows.reserve(p.flow_count);
    for (std::size_t n = 0; n < p.flow_count; ++n) {
        std::uint32_t src = 0;
        std::uint32_t dst = 0;
        do {
            src = pick_router(rng);
            dst = pick_router(rng);
        } while (src == dst || used_pairs.contains({src, dst}));
        used_pairs.emplace(src, dst);

        Flow f;
        f.id = static_cast<int>(n) + 1;
        f.path = topology->xy_route(RouterId{src}, RouterId{dst});
        f.flits = pick_flits(rng);
        const Cycles c_hat = effective_time(f);
        const auto period = static_cast<Cycles>(std::llround(std::exp(pick_log_period(rng))));
        f.period = std::clamp(period, p.period_min, p.period_max);
        f.period = std::max(f.period, c_hat);
        const auto scaled = static_cast<Cycles>(std::floor(pick_factor(rng) * static_cast<double>(f.period)));
        f.deadline = std::min(std::max(c_hat, scaled), f.period);
        flows.push_back(std::move(f));
    }

    std::vector<std::size_t> order(flows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (flows[a].deadline != flows[b].deadline) return flows[a].deadline < flows[b].deadline;
        return flows[a].id < flows[b].id;
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) flows[order[rank]].priority = static_cast<int>(rank) + 1;

    return FlowSet(std::move(topology), std::move(flows));
}

}  // namespace sp2

#pragma once

// Helpers shared by the unit and acceptance suites. Everything here builds
// inputs or computes expected values without going through the code paths
// under test (no XY routing, no simulator, no analysis).

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "sp2/flowset.hpp"
#include "sp2/topology.hpp"

namespace sp2::testing {

inline LinkId router_link(const Topology& t, Coord a, Coord b) {
    return *t.find_link({NodeId::Kind::Router, t.router_at(a).value}, {NodeId::Kind::Router, t.router_at(b).value});
}

inline Path router_path(const Topology& t, const std::vector<Coord>& hops) {
    std::vector<LinkId> links;
    for (std::size_t i = 0; i + 1 < hops.size(); ++i) links.push_back(router_link(t, hops[i], hops[i + 1]));
    return t.make_path(std::move(links));
}

/// The three-flow self-suspension scenario on a 3x3 mesh: routers V1, V2, V3
/// are (0,0), (0,1), (0,2) and V6 is (1,2).
inline FlowSet example1(Cycles period = 200, Cycles d3 = 200) {
    auto t = std::make_shared<const Topology>(Topology::build_mesh(3, 3, false));
    std::vector<Flow> flows(3);
    flows[0] = {1, 1, 20, period, period, router_path(*t, {{0, 0}, {0, 1}})};
    flows[1] = {2, 2, 19, period, period, router_path(*t, {{0, 0}, {0, 1}, {0, 2}})};
    flows[2] = {3, 3, 29, period, d3, router_path(*t, {{0, 1}, {0, 2}, {1, 2}})};
    return FlowSet(std::move(t), std::move(flows));
}

/// Random self-avoiding router walk of 1..max_len links.
inline Path random_walk(const Topology& t, std::mt19937_64& rng, int max_len) {
    std::uniform_int_distribution<int> pr(0, t.rows() - 1);
    std::uniform_int_distribution<int> pc(0, t.cols() - 1);
    std::uniform_int_distribution<int> plen(1, max_len);
    for (;;) {
        Coord at{pr(rng), pc(rng)};
        std::set<Coord> visited{at};
        std::vector<Coord> hops{at};
        const int len = plen(rng);
        while (static_cast<int>(hops.size()) <= len) {
            std::vector<Coord> options;
            for (Coord d : {Coord{0, 1}, Coord{0, -1}, Coord{1, 0}, Coord{-1, 0}}) {
                const Coord n{at.row + d.row, at.col + d.col};
                if (t.contains(n) && !visited.contains(n)) options.push_back(n);
            }
            if (options.empty()) break;
            at = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
            visited.insert(at);
            hops.push_back(at);
        }
        if (hops.size() >= 2) return router_path(t, hops);
    }
}

struct RandomSetParams {
    int rows = 4;
    int cols = 4;
    std::size_t min_flows = 3;
    std::size_t max_flows = 10;
    int max_path = 6;
    Cycles max_flits = 16;
    Cycles min_period = 40;
    Cycles max_period = 400;
};

/// Random flow set with random-walk paths and random priorities. Periods are
/// at least the effective time and deadlines lie in [C^, T].
inline FlowSet random_flowset(std::mt19937_64& rng, const RandomSetParams& p = {}) {
    auto t = std::make_shared<const Topology>(Topology::build_mesh(p.rows, p.cols, false));
    const std::size_t n = std::uniform_int_distribution<std::size_t>(p.min_flows, p.max_flows)(rng);
    std::vector<int> prio(n);
    for (std::size_t i = 0; i < n; ++i) prio[i] = static_cast<int>(i) + 1;
    std::shuffle(prio.begin(), prio.end(), rng);
    std::vector<Flow> flows;
    for (std::size_t i = 0; i < n; ++i) {
        Flow f;
        f.id = static_cast<int>(i) + 1;
        f.priority = prio[i];
        f.path = random_walk(*t, rng, p.max_path);
        f.flits = std::uniform_int_distribution<Cycles>(1, p.max_flits)(rng);
        const Cycles c_hat = f.flits + static_cast<Cycles>(f.path.eta()) - 1;
        f.period = std::max(c_hat, std::uniform_int_distribution<Cycles>(p.min_period, p.max_period)(rng));
        f.deadline = std::uniform_int_distribution<Cycles>(c_hat, f.period)(rng);
        flows.push_back(std::move(f));
    }
    return FlowSet(std::move(t), std::move(flows));
}

/// Link-set intersection computed from the raw link lists.
inline bool paths_overlap(const Flow& a, const Flow& b) {
    for (LinkId x : a.path.links) {
        for (LinkId y : b.path.links) {
            if (x == y) return true;
        }
    }
    return false;
}

}  // namespace sp2::testing

#include "sp2/topology.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

namespace sp2 {

namespace {

std::uint64_t node_key(NodeId n) {
    return (static_cast<std::uint64_t>(n.kind) << 31) | n.index;
}

std::uint64_t endpoint_key(NodeId src, NodeId dst) {
    return (node_key(src) << 32) | node_key(dst);
}

NodeId router_node(std::uint32_t index) { return {NodeId::Kind::Router, index}; }
NodeId core_node(std::uint32_t index) { return {NodeId::Kind::Core, index}; }

}  // namespace

int manhattan_distance(Coord a, Coord b) {
    return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

Topology::Topology(int rows, int cols, bool with_core_links)
    : rows_(rows), cols_(cols), with_core_links_(with_core_links) {}

void Topology::add_link(NodeId src, NodeId dst) {
    const LinkId id{static_cast<std::uint32_t>(links_.size())};
    links_.push_back({id, src, dst});
    by_endpoints_.emplace(endpoint_key(src, dst), id);
}

Topology Topology::build_mesh(int rows, int cols, bool with_core_links) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("mesh dimensions must be positive");
    }
    Topology t(rows, cols, with_core_links);
    const int dr[] = {0, 0, 1, -1};
    const int dc[] = {1, -1, 0, 0};
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto from = t.router_at({r, c});
            for (int d = 0; d < 4; ++d) {
                const Coord next{r + dr[d], c + dc[d]};
                if (!t.contains(next)) continue;
                t.add_link(router_node(from.value), router_node(t.router_at(next).value));
            }
        }
    }
    t.inter_router_links_ = t.links_.size();
    if (with_core_links) {
        for (std::uint32_t i = 0; i < t.router_count(); ++i) {
            t.add_link(core_node(i), router_node(i));
            t.add_link(router_node(i), core_node(i));
        }
    }
    return t;
}

bool Topology::contains(Coord c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
}

RouterId Topology::router_at(Coord c) const {
    if (!contains(c)) {
        throw std::invalid_argument("router coordinate outside the mesh");
    }
    return RouterId{static_cast<std::uint32_t>(c.row * cols_ + c.col)};
}

Coord Topology::coord_of(RouterId r) const {
    if (!contains(r)) {
        throw std::invalid_argument("unknown router id");
    }
    const int v = static_cast<int>(r.value);
    return {v / cols_, v % cols_};
}

const Link& Topology::link(LinkId id) const {
    if (id.value >= links_.size()) {
        throw std::out_of_range("unknown link id");
    }
    return links_[id.value];
}

std::optional<LinkId> Topology::find_link(NodeId src, NodeId dst) const {
    const auto it = by_endpoints_.find(endpoint_key(src, dst));
    if (it == by_endpoints_.end()) return std::nullopt;
    return it->second;
}

std::string Topology::node_name(NodeId n) const {
    const Coord c = coord_of(RouterId{n.index});
    char buf[48];
    std::snprintf(buf, sizeof buf, "%c(%d,%d)", n.kind == NodeId::Kind::Router ? 'R' : 'C', c.row, c.col);
    return buf;
}

std::string Topology::link_name(LinkId id) const {
    const Link& l = link(id);
    return node_name(l.src) + "->" + node_name(l.dst);
}

std::optional<LinkId> Topology::link_by_name(std::string_view name) const {
    const auto arrow = name.find("->");
    if (arrow == std::string_view::npos) return std::nullopt;
    auto parse_node = [this](std::string_view s) -> std::optional<NodeId> {
        char kind = 0;
        int r = 0;
        int c = 0;
        char tail = 0;
        const std::string str(s);
        if (std::sscanf(str.c_str(), "%c(%d,%d)%c", &kind, &r, &c, &tail) != 3) return std::nullopt;
        if (kind != 'R' && kind != 'C') return std::nullopt;
        if (!contains(Coord{r, c})) return std::nullopt;
        const auto idx = router_at({r, c}).value;
        return kind == 'R' ? router_node(idx) : core_node(idx);
    };
    const auto src = parse_node(name.substr(0, arrow));
    const auto dst = parse_node(name.substr(arrow + 2));
    if (!src || !dst) return std::nullopt;
    return find_link(*src, *dst);
}

Path Topology::xy_route(RouterId src, RouterId dst) const {
    if (!contains(src) || !contains(dst)) {
        throw std::invalid_argument("xy_route: unknown router");
    }
    if (src == dst) {
        throw std::invalid_argument("xy_route: source equals destination");
    }
    Coord at = coord_of(src);
    const Coord to = coord_of(dst);
    std::vector<LinkId> hops;
    auto step = [&](Coord next) {
        hops.push_back(*find_link(router_node(router_at(at).value), router_node(router_at(next).value)));
        at = next;
    };
    while (at.col != to.col) step({at.row, at.col + (to.col > at.col ? 1 : -1)});
    while (at.row != to.row) step({at.row + (to.row > at.row ? 1 : -1), at.col});
    return Path{std::move(hops)};
}

Path Topology::make_path(std::vector<LinkId> links) const {
    if (links.empty()) {
        throw std::invalid_argument("path must contain at least one link");
    }
    std::unordered_set<std::uint32_t> seen;
    for (std::size_t i = 0; i < links.size(); ++i) {
        const Link& l = link(links[i]);
        if (!seen.insert(l.id.value).second) {
            throw std::invalid_argument("path repeats link " + link_name(l.id));
        }
        if (i + 1 < links.size() && l.dst != link(links[i + 1]).src) {
            throw std::invalid_argument("path links do not chain at " + link_name(l.id));
        }
    }
    return Path{std::move(links)};
}

}  // namespace sp2

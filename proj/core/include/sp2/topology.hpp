#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sp2 {

struct RouterId {
    std::uint32_t value = 0;
    auto operator<=>(const RouterId&) const = default;
};

struct LinkId {
    std::uint32_t value = 0;
    auto operator<=>(const LinkId&) const = default;
};

/// A node is either a router or the core attached to a router. Cores share
/// the index of their router.
struct NodeId {
    enum class Kind : std::uint8_t { Router, Core };
    Kind kind = Kind::Router;
    std::uint32_t index = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct Coord {
    int row = 0;
    int col = 0;
    auto operator<=>(const Coord&) const = default;
};

struct Link {
    LinkId id;
    NodeId src;
    NodeId dst;
};

/// Ordered link sequence traversed by a flow. Construct through
/// Topology::make_path or Topology::xy_route so the chaining invariant holds.
struct Path {
    std::vector<LinkId> links;

    [[nodiscard]] std::size_t eta() const { return links.size(); }
    bool operator==(const Path&) const = default;
};

/// Directed-link graph of a 2-D mesh NoC. Immutable after construction.
///
/// Link ids are assigned deterministically: inter-router links first, in
/// row-major router order with the outgoing directions east, west, south,
/// north; then the core links (core->router, router->core) in row-major order.
class Topology {
public:
    static Topology build_mesh(int rows, int cols, bool with_core_links);

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] bool has_core_links() const { return with_core_links_; }

    [[nodiscard]] std::size_t router_count() const { return static_cast<std::size_t>(rows_ * cols_); }
    [[nodiscard]] std::size_t core_count() const { return with_core_links_ ? router_count() : 0; }
    [[nodiscard]] std::span<const Link> links() const { return links_; }
    [[nodiscard]] std::size_t link_count() const { return links_.size(); }
    [[nodiscard]] std::size_t inter_router_link_count() const { return inter_router_links_; }
    [[nodiscard]] std::size_t core_link_count() const { return links_.size() - inter_router_links_; }

    [[nodiscard]] RouterId router_at(Coord c) const;
    [[nodiscard]] Coord coord_of(RouterId r) const;
    [[nodiscard]] bool contains(RouterId r) const { return r.value < router_count(); }
    [[nodiscard]] bool contains(Coord c) const;

    [[nodiscard]] const Link& link(LinkId id) const;
    [[nodiscard]] std::optional<LinkId> find_link(NodeId src, NodeId dst) const;

    /// Stable human-readable name, e.g. "R(0,0)->R(0,1)" or "C(1,2)->R(1,2)".
    [[nodiscard]] std::string link_name(LinkId id) const;
    [[nodiscard]] std::optional<LinkId> link_by_name(std::string_view name) const;

    /// Dimension-ordered route: columns first, then rows.
    /// Throws std::invalid_argument when src == dst or either router is unknown.
    [[nodiscard]] Path xy_route(RouterId src, RouterId dst) const;

    /// Validates an explicit link sequence against the path invariants
    /// (non-empty, chained, no repeated link) and returns it as a Path.
    [[nodiscard]] Path make_path(std::vector<LinkId> links) const;

    [[nodiscard]] std::string node_name(NodeId n) const;

private:
    Topology(int rows, int cols, bool with_core_links);
    void add_link(NodeId src, NodeId dst);

    int rows_ = 0;
    int cols_ = 0;
    bool with_core_links_ = false;
    std::size_t inter_router_links_ = 0;
    std::vector<Link> links_;
    std::unordered_map<std::uint64_t, LinkId> by_endpoints_;
};

[[nodiscard]] int manhattan_distance(Coord a, Coord b);

}  // namespace sp2

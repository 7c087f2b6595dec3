#include "sp2/progression.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <unordered_map>

namespace sp2::progression {

namespace {

struct CountsHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (int x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

void validate_shape(int flits, int eta, std::optional<int> capacity) {
    if (flits < 1) throw std::invalid_argument("flit count must be >= 1");
    if (eta < 1) throw std::invalid_argument("link count must be >= 1");
    if (capacity && *capacity < 1) throw std::invalid_argument("buffer capacity must be >= 1");
    if (eta > 30) throw std::invalid_argument("link count too large for exhaustive enumeration");
}

bool within_capacity(const std::vector<int>& counts, std::optional<int> capacity) {
    if (!capacity) return true;
    for (std::size_t j = 1; j + 1 < counts.size(); ++j) {
        if (counts[j] > *capacity) return false;
    }
    return true;
}

/// Memoized DFS over the progression DAG. Every progression moves at least
/// one flit strictly downstream, so the graph is acyclic.
template <typename Value, typename Combine>
class Explorer {
public:
    Explorer(std::size_t budget, Value terminal_value, Combine combine)
        : budget_(budget), terminal_value_(terminal_value), combine_(combine) {}

    Value visit(const BufferState& b) {
        if (b.terminal()) return terminal_value_;
        if (auto it = memo_.find(b.counts); it != memo_.end()) return it->second;
        if (memo_.size() >= budget_) throw SearchBudgetExceeded(budget_);
        std::optional<Value> acc;
        for (const Successor& s : valid_successors(b)) {
            const Value v = visit(s.state);
            acc = acc ? combine_(*acc, v) : combine_.first(v);
        }
        // Every non-terminal state has at least one successor: the furthest
        // downstream non-empty buffer can always forward.
        memo_.emplace(b.counts, *acc);
        return *acc;
    }

private:
    std::size_t budget_;
    Value terminal_value_;
    Combine combine_;
    std::unordered_map<std::vector<int>, Value, CountsHash> memo_;
};

struct LengthRange {
    std::int64_t lo;
    std::int64_t hi;
};

struct CombineLengths {
    LengthRange first(LengthRange v) const { return {v.lo + 1, v.hi + 1}; }
    LengthRange operator()(LengthRange acc, LengthRange v) const {
        return {std::min(acc.lo, v.lo + 1), std::max(acc.hi, v.hi + 1)};
    }
};

struct CombineCounts {
    std::uint64_t first(std::uint64_t v) const { return v; }
    std::uint64_t operator()(std::uint64_t acc, std::uint64_t v) const {
        if (acc > std::numeric_limits<std::uint64_t>::max() - v) {
            throw std::overflow_error("series count exceeds 64 bits");
        }
        return acc + v;
    }
};

}  // namespace

SearchBudgetExceeded::SearchBudgetExceeded(std::size_t budget)
    : std::runtime_error("progression search exceeded its budget of " + std::to_string(budget) + " states"),
      budget_(budget) {}

BufferState BufferState::initial(int flits, int eta, std::optional<int> capacity) {
    validate_shape(flits, eta, capacity);
    BufferState b;
    b.counts.assign(static_cast<std::size_t>(eta) + 1, 0);
    b.counts.front() = flits;
    b.flits = flits;
    b.capacity = capacity;
    return b;
}

std::vector<int> MoveVector::delta() const {
    std::vector<int> y(fires.size() + 1, 0);
    for (std::size_t j = 0; j < fires.size(); ++j) {
        if (!fires[j]) continue;
        y[j] -= 1;
        y[j + 1] += 1;
    }
    return y;
}

std::vector<Successor> valid_successors(const BufferState& b) {
    std::vector<Successor> out;
    if (b.terminal()) return out;
    const int eta = b.eta();
    const std::uint64_t combos = std::uint64_t{1} << eta;
    for (std::uint64_t mask = 1; mask < combos; ++mask) {
        MoveVector move;
        move.fires.resize(static_cast<std::size_t>(eta));
        bool ok = true;
        for (int j = 0; j < eta; ++j) {
            const bool fire = (mask >> j) & 1U;
            move.fires[static_cast<std::size_t>(j)] = fire;
            if (fire && b.counts[static_cast<std::size_t>(j)] < 1) ok = false;
        }
        if (!ok) continue;
        BufferState next = b;
        const auto y = move.delta();
        for (std::size_t e = 0; e < next.counts.size(); ++e) next.counts[e] += y[e];
        if (!within_capacity(next.counts, b.capacity)) continue;
        out.push_back({std::move(move), std::move(next)});
    }
    return out;
}

std::optional<Successor> sp2_successor(const BufferState& b) {
    if (b.terminal()) return std::nullopt;
    MoveVector move;
    move.fires.resize(static_cast<std::size_t>(b.eta()));
    for (std::size_t j = 0; j < move.fires.size(); ++j) move.fires[j] = b.counts[j] >= 1;
    BufferState next = b;
    const auto y = move.delta();
    for (std::size_t e = 0; e < next.counts.size(); ++e) next.counts[e] += y[e];
    return Successor{std::move(move), std::move(next)};
}

SeriesBounds series_bounds(int flits, int eta, std::optional<int> capacity, std::size_t state_budget) {
    const auto start = BufferState::initial(flits, eta, capacity);
    Explorer explorer(state_budget, LengthRange{0, 0}, CombineLengths{});
    const auto r = explorer.visit(start);
    return {r.lo, r.hi};
}

std::uint64_t count_series(int flits, int eta, std::optional<int> capacity, std::size_t state_budget) {
    const auto start = BufferState::initial(flits, eta, capacity);
    Explorer explorer(state_budget, std::uint64_t{1}, CombineCounts{});
    return explorer.visit(start);
}

std::int64_t sp2_series_length(int flits, int eta) {
    auto b = BufferState::initial(flits, eta);
    std::int64_t steps = 0;
    while (auto s = sp2_successor(b)) {
        b = std::move(s->state);
        ++steps;
    }
    return steps;
}

}  // namespace sp2::progression

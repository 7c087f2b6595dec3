#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sp2::progression {

/// Per-node flit counts along a path of eta links: element 0 is the source
/// buffer, element eta the destination. A capacity bounds the intermediate
/// elements only; std::nullopt means unbounded.
struct BufferState {
    std::vector<int> counts;
    int flits = 0;
    std::optional<int> capacity;

    static BufferState initial(int flits, int eta, std::optional<int> capacity = std::nullopt);

    [[nodiscard]] int eta() const { return static_cast<int>(counts.size()) - 1; }
    [[nodiscard]] bool terminal() const { return counts.back() == flits; }
    bool operator==(const BufferState&) const = default;
};

/// One candidate progression: fires[j] means link j forwards one flit.
struct MoveVector {
    std::vector<bool> fires;

    /// Buffer delta: -1 at the upstream node and +1 at the downstream node of
    /// every firing link.
    [[nodiscard]] std::vector<int> delta() const;
    bool operator==(const MoveVector&) const = default;
};

struct Successor {
    MoveVector move;
    BufferState state;
};

/// Thrown when an enumeration would visit more states than its budget allows.
class SearchBudgetExceeded : public std::runtime_error {
public:
    explicit SearchBudgetExceeded(std::size_t budget);
    [[nodiscard]] std::size_t budget() const { return budget_; }

private:
    std::size_t budget_;
};

inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

/// All valid progressions out of b. A link may fire only if its upstream
/// buffer already held a flit at the start of the cycle (no same-cycle
/// pass-through); the result must respect the capacity. Terminal states have
/// no successors.
[[nodiscard]] std::vector<Successor> valid_successors(const BufferState& b);

/// The single progression SP2 performs: every link with a buffered upstream
/// flit fires.
[[nodiscard]] std::optional<Successor> sp2_successor(const BufferState& b);

struct SeriesBounds {
    std::int64_t min_len = 0;
    std::int64_t max_len = 0;
};

/// Shortest and longest series of progressions from (C,0,...,0) to
/// (0,...,0,C), found by memoized DFS over the reachable state graph.
[[nodiscard]] SeriesBounds series_bounds(int flits, int eta, std::optional<int> capacity = std::nullopt,
                                         std::size_t state_budget = kDefaultStateBudget);

/// Number of distinct series of progressions (distinct move sequences).
/// Throws std::overflow_error if the count does not fit in 64 bits.
[[nodiscard]] std::uint64_t count_series(int flits, int eta, std::optional<int> capacity = std::nullopt,
                                         std::size_t state_budget = kDefaultStateBudget);

/// Number of SP2 progressions needed to deliver the whole message.
[[nodiscard]] std::int64_t sp2_series_length(int flits, int eta);

}  // namespace sp2::progression

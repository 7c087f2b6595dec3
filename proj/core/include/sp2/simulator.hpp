#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sp2/flowset.hpp"

namespace sp2 {

/// Absolute release times per flow index, each list strictly increasing.
struct ReleasePattern {
    std::vector<std::vector<Cycles>> releases;

    /// Every flow released at 0, then strictly periodically.
    static ReleasePattern synchronous(const FlowSet& fs, Cycles horizon);
    /// Strictly periodic with per-flow offsets (one per flow index).
    static ReleasePattern periodic(const FlowSet& fs, std::span<const Cycles> offsets, Cycles horizon);
    /// First release uniform in [0, T); every later inter-arrival is
    /// T plus a geometric extra delay with success probability extra_delay_p.
    static ReleasePattern sporadic(const FlowSet& fs, std::uint64_t seed, Cycles horizon,
                                   double extra_delay_p = 0.25);

    /// Throws std::invalid_argument if the pattern does not match the flow set
    /// or two releases of one flow are closer than its period.
    void validate(const FlowSet& fs) const;
};

/// A message competing for its links in one cycle.
struct Contender {
    std::size_t flow = 0;
    int priority = 0;
    std::span<const LinkId> path;
};

/// Greedy fixed-priority SP2 arbitration over a reusable claim table.
/// A contender is granted iff none of its links is claimed by an already
/// granted, higher-priority contender; a grant claims every link of the
/// path, whether or not a flit crosses it this cycle.
class Arbiter {
public:
    explicit Arbiter(std::size_t link_count) : claimed_(link_count, false) {}

    /// Contenders must be in strictly increasing priority order.
    void arbitrate(std::span<const Contender> contenders, std::vector<std::size_t>& granted);

private:
    std::vector<bool> claimed_;
    std::vector<std::uint32_t> touched_;
};

/// Stateless wrapper: sorts by priority, rejects duplicate priorities with
/// std::invalid_argument, and returns granted flow indices in priority order.
[[nodiscard]] std::vector<std::size_t> arbitrate_cycle(std::vector<Contender> active);

struct TraceEvent {
    enum class Kind : std::uint8_t { Release, Complete, Miss, Violation };
    Cycles time = 0;
    Kind kind = Kind::Release;
    std::size_t flow = 0;
    bool operator==(const TraceEvent&) const = default;
};

[[nodiscard]] const char* to_string(TraceEvent::Kind k);

struct MessageRecord {
    std::size_t flow = 0;
    Cycles release = 0;
    Cycles absolute_deadline = 0;
    std::optional<Cycles> completion;
    bool missed = false;

    [[nodiscard]] std::optional<Cycles> response_time() const {
        if (!completion) return std::nullopt;
        return *completion - release;
    }
};

/// Per-cycle link ownership plus the event log of one run. Only links used
/// by at least one flow are recorded; every other link is idle throughout.
class ScheduleTrace {
public:
    static constexpr std::int16_t kIdle = -1;

    ScheduleTrace(Cycles horizon, std::vector<LinkId> links);

    [[nodiscard]] Cycles horizon() const { return horizon_; }
    [[nodiscard]] std::span<const LinkId> links() const { return links_; }
    [[nodiscard]] std::optional<std::size_t> column_of(LinkId l) const;

    /// Flow index on the link at cycle t, or std::nullopt when idle.
    [[nodiscard]] std::optional<std::size_t> owner(Cycles t, LinkId l) const;
    [[nodiscard]] std::int16_t owner_at(Cycles t, std::size_t column) const {
        return owners_[static_cast<std::size_t>(t) * links_.size() + column];
    }
    void set_owner(Cycles t, std::size_t column, std::int16_t flow) {
        owners_[static_cast<std::size_t>(t) * links_.size() + column] = flow;
    }

    std::vector<TraceEvent> events;
    std::vector<MessageRecord> messages;
    /// False once a flow was released while its previous message was unfinished.
    bool model_valid = true;

    [[nodiscard]] std::size_t miss_count() const;
    /// True iff the flow has a released, unfinished message during cycle t.
    /// Requires index_messages() after messages was last modified.
    [[nodiscard]] bool active(Cycles t, std::size_t flow) const;
    void index_messages();

private:
    Cycles horizon_;
    std::vector<LinkId> links_;
    std::vector<std::int16_t> owners_;
    std::vector<std::vector<std::size_t>> by_flow_;  // indices into messages, release order
};

/// Cycle-by-cycle fixed-priority SP2 run over [0, horizon). A message
/// released at t may be granted in cycle t and completes at the end of the
/// cycle carrying its (C+eta-1)-th grant. Deadline misses and model
/// violations are logged; the run always covers the whole horizon.
[[nodiscard]] ScheduleTrace simulate(const FlowSet& fs, const ReleasePattern& rel, Cycles horizon);

struct TraceCheck {
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Re-derives activity from the event log and checks the ownership table:
/// all-or-nothing per path, work conservation, and that every completion
/// lands exactly one cycle after the message's (C+eta-1)-th grant.
[[nodiscard]] TraceCheck check_trace(const ScheduleTrace& trace, const FlowSet& fs,
                                     std::size_t max_reported = 32);

/// True iff at cycle t flow j is self-suspended as seen from the links of
/// flow i: both are active, j is not scheduled on any of i's links, no flow
/// of priority j or higher holds one of them, and the two paths overlap
/// without being the same link set.
[[nodiscard]] bool is_self_suspended(const ScheduleTrace& trace, const FlowSet& fs, Cycles t, std::size_t j,
                                     std::size_t i);

struct SelfSuspensionStats {
    std::size_t observer = 0;   ///< i, whose links are examined
    std::size_t suspended = 0;  ///< j
    Cycles total = 0;
    /// Largest number of such cycles inside one message of j's
    /// [release, completion) window.
    Cycles max_per_message = 0;
    Cycles first_time = 0;
};

/// Every (i, j) pair that exhibits self-suspension somewhere in the trace.
[[nodiscard]] std::vector<SelfSuspensionStats> self_suspensions(const ScheduleTrace& trace, const FlowSet& fs);

/// Line format: "t,<link_id>=<flow_id|->,..." per cycle, then
/// "E,t,<release|complete|miss|violation>,<flow_id>" per event.
void write_trace(std::ostream& os, const ScheduleTrace& trace, const FlowSet& fs);

}  // namespace sp2

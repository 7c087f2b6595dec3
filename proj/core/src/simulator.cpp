#include "sp2/simulator.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

namespace sp2 {

// ---------------------------------------------------------------------------
// Release patterns

ReleasePattern ReleasePattern::synchronous(const FlowSet& fs, Cycles horizon) {
    const std::vector<Cycles> zeros(fs.size(), 0);
    return periodic(fs, zeros, horizon);
}

ReleasePattern ReleasePattern::periodic(const FlowSet& fs, std::span<const Cycles> offsets, Cycles horizon) {
    if (offsets.size() != fs.size()) {
        throw std::invalid_argument("periodic release pattern needs one offset per flow");
    }
    ReleasePattern rp;
    rp.releases.resize(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (offsets[i] < 0) throw std::invalid_argument("release offsets must be non-negative");
        for (Cycles t = offsets[i]; t < horizon; t += fs[i].period) rp.releases[i].push_back(t);
    }
    return rp;
}

ReleasePattern ReleasePattern::sporadic(const FlowSet& fs, std::uint64_t seed, Cycles horizon,
                                        double extra_delay_p) {
    if (!(extra_delay_p > 0.0 && extra_delay_p <= 1.0)) {
        throw std::invalid_argument("sporadic extra-delay probability must be in (0, 1]");
    }
    std::mt19937_64 rng(seed);
    std::geometric_distribution<Cycles> extra(extra_delay_p);
    ReleasePattern rp;
    rp.releases.resize(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const Cycles period = fs[i].period;
        std::uniform_int_distribution<Cycles> phase(0, period - 1);
        for (Cycles t = phase(rng); t < horizon; t += period + extra(rng)) rp.releases[i].push_back(t);
    }
    return rp;
}

void ReleasePattern::validate(const FlowSet& fs) const {
    if (releases.size() != fs.size()) {
        throw std::invalid_argument("release pattern does not match the flow count");
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto& r = releases[i];
        for (std::size_t k = 0; k < r.size(); ++k) {
            if (r[k] < 0) throw std::invalid_argument("negative release time");
            if (k > 0 && r[k] - r[k - 1] < fs[i].period) {
                throw std::invalid_argument("releases of flow " + std::to_string(fs[i].id) +
                                            " are closer than its period");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Arbitration

void Arbiter::arbitrate(std::span<const Contender> contenders, std::vector<std::size_t>& granted) {
    granted.clear();
    for (std::size_t c = 0; c < contenders.size(); ++c) {
        const Contender& m = contenders[c];
        if (c > 0 && contenders[c - 1].priority >= m.priority) {
            throw std::invalid_argument(contenders[c - 1].priority == m.priority
                                            ? "duplicate priority among contenders"
                                            : "contenders are not in priority order");
        }
        const bool free = std::none_of(m.path.begin(), m.path.end(),
                                       [this](LinkId l) { return static_cast<bool>(claimed_[l.value]); });
        if (!free) continue;
        for (LinkId l : m.path) {
            claimed_[l.value] = true;
            touched_.push_back(l.value);
        }
        granted.push_back(m.flow);
    }
    for (std::uint32_t l : touched_) claimed_[l] = false;
    touched_.clear();
}

std::vector<std::size_t> arbitrate_cycle(std::vector<Contender> active) {
    std::stable_sort(active.begin(), active.end(),
                     [](const Contender& a, const Contender& b) { return a.priority < b.priority; });
    std::uint32_t max_link = 0;
    for (const Contender& c : active) {
        for (LinkId l : c.path) max_link = std::max(max_link, l.value);
    }
    Arbiter arbiter(static_cast<std::size_t>(max_link) + 1);
    std::vector<std::size_t> granted;
    arbiter.arbitrate(active, granted);
    return granted;
}

// ---------------------------------------------------------------------------
// Trace container

const char* to_string(TraceEvent::Kind k) {
    switch (k) {
        case TraceEvent::Kind::Release: return "release";
        case TraceEvent::Kind::Complete: return "complete";
        case TraceEvent::Kind::Miss: return "miss";
        case TraceEvent::Kind::Violation: return "violation";
    }
    return "?";
}

ScheduleTrace::ScheduleTrace(Cycles horizon, std::vector<LinkId> links)
    : horizon_(horizon), links_(std::move(links)) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    std::sort(links_.begin(), links_.end());
    links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
    owners_.assign(static_cast<std::size_t>(horizon) * links_.size(), kIdle);
}

std::optional<std::size_t> ScheduleTrace::column_of(LinkId l) const {
    const auto it = std::lower_bound(links_.begin(), links_.end(), l);
    if (it == links_.end() || *it != l) return std::nullopt;
    return static_cast<std::size_t>(it - links_.begin());
}

std::optional<std::size_t> ScheduleTrace::owner(Cycles t, LinkId l) const {
    const auto col = column_of(l);
    if (!col || t < 0 || t >= horizon_) return std::nullopt;
    const auto o = owner_at(t, *col);
    if (o == kIdle) return std::nullopt;
    return static_cast<std::size_t>(o);
}

std::size_t ScheduleTrace::miss_count() const {
    return static_cast<std::size_t>(
        std::count_if(messages.begin(), messages.end(), [](const MessageRecord& m) { return m.missed; }));
}

void ScheduleTrace::index_messages() {
    by_flow_.clear();
    for (std::size_t m = 0; m < messages.size(); ++m) {
        const std::size_t f = messages[m].flow;
        if (by_flow_.size() <= f) by_flow_.resize(f + 1);
        by_flow_[f].push_back(m);
    }
    for (auto& list : by_flow_) {
        std::stable_sort(list.begin(), list.end(),
                         [this](std::size_t a, std::size_t b) { return messages[a].release < messages[b].release; });
    }
}

bool ScheduleTrace::active(Cycles t, std::size_t flow) const {
    if (flow >= by_flow_.size()) return false;
    const auto& list = by_flow_[flow];
    // Completions are FIFO per flow, so the latest release at or before t
    // decides activity.
    auto it = std::upper_bound(list.begin(), list.end(), t,
                               [this](Cycles v, std::size_t m) { return v < messages[m].release; });
    if (it == list.begin()) return false;
    const MessageRecord& m = messages[*std::prev(it)];
    return !m.completion || *m.completion > t;
}

// ---------------------------------------------------------------------------
// Simulation

ScheduleTrace simulate(const FlowSet& fs, const ReleasePattern& rel, Cycles horizon) {
    rel.validate(fs);
    if (fs.size() > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max())) {
        throw std::invalid_argument("too many flows for the trace encoding");
    }
    std::vector<LinkId> used;
    for (const Flow& f : fs.flows()) used.insert(used.end(), f.path.links.begin(), f.path.links.end());
    ScheduleTrace trace(horizon, used);

    const std::size_t n = fs.size();
    std::vector<std::vector<std::size_t>> columns(n);
    std::vector<Cycles> grants_needed(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (LinkId l : fs[i].path.links) columns[i].push_back(*trace.column_of(l));
        grants_needed[i] = effective_time(fs[i]);
    }

    struct Pending {
        std::size_t record;
        Cycles remaining;
    };
    std::vector<std::deque<Pending>> queues(n);
    std::vector<std::size_t> next_release(n, 0);
    // (absolute deadline, record) for unfinished messages
    std::set<std::pair<Cycles, std::size_t>> deadlines;

    Arbiter arbiter(fs.topology().link_count());
    std::vector<Contender> contenders;
    std::vector<std::size_t> granted;
    contenders.reserve(n);

    auto flag_miss = [&](std::size_t record, Cycles when) {
        trace.messages[record].missed = true;
        trace.events.push_back({when, TraceEvent::Kind::Miss, trace.messages[record].flow});
    };

    for (Cycles t = 0; t < horizon; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto& times = rel.releases[i];
            if (next_release[i] >= times.size() || times[next_release[i]] != t) continue;
            ++next_release[i];
            if (!queues[i].empty()) {
                trace.model_valid = false;
                trace.events.push_back({t, TraceEvent::Kind::Violation, i});
            }
            const std::size_t record = trace.messages.size();
            trace.messages.push_back({i, t, t + fs[i].deadline, std::nullopt, false});
            queues[i].push_back({record, grants_needed[i]});
            deadlines.emplace(t + fs[i].deadline, record);
            trace.events.push_back({t, TraceEvent::Kind::Release, i});
        }
        while (!deadlines.empty() && deadlines.begin()->first <= t) {
            flag_miss(deadlines.begin()->second, deadlines.begin()->first);
            deadlines.erase(deadlines.begin());
        }

        contenders.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (!queues[i].empty()) contenders.push_back({i, fs[i].priority, fs[i].path.links});
        }
        arbiter.arbitrate(contenders, granted);

        for (std::size_t i : granted) {
            for (std::size_t col : columns[i]) trace.set_owner(t, col, static_cast<std::int16_t>(i));
            Pending& head = queues[i].front();
            if (--head.remaining > 0) continue;
            MessageRecord& rec = trace.messages[head.record];
            rec.completion = t + 1;
            trace.events.push_back({t + 1, TraceEvent::Kind::Complete, i});
            deadlines.erase({rec.absolute_deadline, head.record});
            queues[i].pop_front();
        }
    }
    // A deadline exactly at the horizon is decided by the last simulated cycle.
    while (!deadlines.empty() && deadlines.begin()->first <= horizon) {
        flag_miss(deadlines.begin()->second, deadlines.begin()->first);
        deadlines.erase(deadlines.begin());
    }

    trace.index_messages();
    return trace;
}

// ---------------------------------------------------------------------------
// Trace verification

namespace {

class ViolationLog {
public:
    explicit ViolationLog(std::size_t cap) : cap_(cap) {}

    void add(std::string msg) {
        ++total_;
        if (out_.violations.size() < cap_) out_.violations.push_back(std::move(msg));
    }

    TraceCheck finish() {
        if (total_ > out_.violations.size()) {
            out_.violations.push_back("... " + std::to_string(total_ - cap_) + " further violations");
        }
        return std::move(out_);
    }

private:
    std::size_t cap_;
    std::size_t total_ = 0;
    TraceCheck out_;
};

std::string at(Cycles t) { return "t=" + std::to_string(t) + ": "; }

}  // namespace

TraceCheck check_trace(const ScheduleTrace& trace, const FlowSet& fs, std::size_t max_reported) {
    ViolationLog log(std::max<std::size_t>(max_reported, 1));
    const std::size_t n = fs.size();
    const std::size_t ncols = trace.links().size();

    std::vector<std::vector<std::size_t>> columns(n);
    std::vector<std::vector<bool>> on_path(n, std::vector<bool>(ncols, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (LinkId l : fs[i].path.links) {
            const auto col = trace.column_of(l);
            if (!col) {
                log.add("flow " + std::to_string(fs[i].id) + " uses a link absent from the trace");
                return log.finish();
            }
            columns[i].push_back(*col);
            on_path[i][*col] = true;
        }
    }

    // Event log bucketed by time.
    std::multimap<Cycles, const TraceEvent*> by_time;
    for (const TraceEvent& e : trace.events) {
        if (e.flow >= n) {
            log.add(at(e.time) + "event for unknown flow index " + std::to_string(e.flow));
            continue;
        }
        by_time.emplace(e.time, &e);
    }

    std::vector<std::deque<Cycles>> grants_left(n);  // one entry per released, unfinished message
    std::vector<std::multiset<Cycles>> expected_completions(n);
    std::vector<std::multiset<Cycles>> reported_completions(n);

    auto apply_events_at = [&](Cycles t) {
        auto [lo, hi] = by_time.equal_range(t);
        for (auto it = lo; it != hi; ++it) {
            const TraceEvent& e = *it->second;
            if (e.kind == TraceEvent::Kind::Release) grants_left[e.flow].push_back(effective_time(fs[e.flow]));
            if (e.kind == TraceEvent::Kind::Complete) reported_completions[e.flow].insert(e.time);
        }
    };

    std::vector<std::size_t> held(n);
    for (Cycles t = 0; t < trace.horizon(); ++t) {
        apply_events_at(t);
        std::fill(held.begin(), held.end(), 0);
        for (std::size_t c = 0; c < ncols; ++c) {
            const auto o = trace.owner_at(t, c);
            if (o == ScheduleTrace::kIdle) continue;
            if (o < 0 || static_cast<std::size_t>(o) >= n) {
                log.add(at(t) + "link owned by unknown flow index " + std::to_string(o));
                continue;
            }
            const auto f = static_cast<std::size_t>(o);
            if (!on_path[f][c]) {
                log.add(at(t) + "flow " + std::to_string(fs[f].id) + " scheduled on link " +
                        std::to_string(trace.links()[c].value) + " outside its path");
                continue;
            }
            ++held[f];
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::string who = "flow " + std::to_string(fs[i].id);
            const bool is_active = !grants_left[i].empty();
            if (held[i] != 0 && held[i] != columns[i].size()) {
                log.add(at(t) + who + " holds " + std::to_string(held[i]) + " of " +
                        std::to_string(columns[i].size()) + " links (all-or-nothing)");
            }
            if (held[i] == columns[i].size()) {
                if (!is_active) {
                    log.add(at(t) + who + " holds its links without an active message");
                    continue;
                }
                if (--grants_left[i].front() == 0) {
                    grants_left[i].pop_front();
                    expected_completions[i].insert(t + 1);
                }
            } else if (held[i] == 0 && is_active) {
                const bool blocked = std::any_of(columns[i].begin(), columns[i].end(), [&](std::size_t c) {
                    const auto o = trace.owner_at(t, c);
                    return o != ScheduleTrace::kIdle && static_cast<std::size_t>(o) < i;
                });
                if (!blocked) log.add(at(t) + who + " is active and unblocked but idle (work conservation)");
            }
        }
    }
    apply_events_at(trace.horizon());

    for (std::size_t i = 0; i < n; ++i) {
        if (expected_completions[i] != reported_completions[i]) {
            log.add("flow " + std::to_string(fs[i].id) + ": completion events do not match grant counts");
        }
    }
    return log.finish();
}

// ---------------------------------------------------------------------------
// Self-suspension witnesses

namespace {

bool same_link_set(const Path& a, const Path& b) {
    if (a.eta() != b.eta()) return false;
    std::vector<LinkId> x = a.links;
    std::vector<LinkId> y = b.links;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    return x == y;
}

}  // namespace

bool is_self_suspended(const ScheduleTrace& trace, const FlowSet& fs, Cycles t, std::size_t j, std::size_t i) {
    if (i == j || i >= fs.size() || j >= fs.size()) return false;
    if (!trace.active(t, j) || !trace.active(t, i)) return false;
    if (!fs.intersects(i, j) || same_link_set(fs[i].path, fs[j].path)) return false;
    for (LinkId l : fs[i].path.links) {
        const auto o = trace.owner(t, l);
        if (!o) continue;
        if (*o == j) return false;
        if (*o < j) return false;
    }
    return true;
}

std::vector<SelfSuspensionStats> self_suspensions(const ScheduleTrace& trace, const FlowSet& fs) {
    const std::size_t n = fs.size();
    std::vector<std::vector<std::size_t>> columns(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (LinkId l : fs[i].path.links) columns[i].push_back(*trace.column_of(l));
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (i, j)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && fs.intersects(i, j) && !same_link_set(fs[i].path, fs[j].path)) pairs.emplace_back(i, j);
        }
    }

    // Head message per flow, advanced monotonically in t.
    std::vector<std::vector<std::size_t>> msgs(n);
    for (std::size_t m = 0; m < trace.messages.size(); ++m) msgs[trace.messages[m].flow].push_back(m);
    std::vector<std::size_t> head(n, 0);

    std::map<std::pair<std::size_t, std::size_t>, SelfSuspensionStats> stats;
    std::map<std::pair<std::size_t, std::size_t>, std::map<std::size_t, Cycles>> per_message;
    std::vector<std::optional<std::size_t>> current(n);
    std::vector<std::int32_t> min_owner(n);

    for (Cycles t = 0; t < trace.horizon(); ++t) {
        for (std::size_t f = 0; f < n; ++f) {
            auto& h = head[f];
            while (h < msgs[f].size() && trace.messages[msgs[f][h]].completion &&
                   *trace.messages[msgs[f][h]].completion <= t) {
                ++h;
            }
            current[f].reset();
            if (h < msgs[f].size() && trace.messages[msgs[f][h]].release <= t) current[f] = msgs[f][h];
            std::int32_t lowest = std::numeric_limits<std::int32_t>::max();
            for (std::size_t c : columns[f]) {
                const auto o = trace.owner_at(t, c);
                if (o != ScheduleTrace::kIdle) lowest = std::min<std::int32_t>(lowest, o);
            }
            min_owner[f] = lowest;
        }
        for (const auto& [i, j] : pairs) {
            if (!current[i] || !current[j]) continue;
            // Nothing of priority j or higher on i's links; this also rules
            // out j itself being scheduled there.
            if (min_owner[i] <= static_cast<std::int32_t>(j)) continue;
            auto [it, fresh] = stats.try_emplace({i, j});
            if (fresh) {
                it->second.observer = i;
                it->second.suspended = j;
                it->second.first_time = t;
            }
            ++it->second.total;
            const Cycles in_msg = ++per_message[{i, j}][*current[j]];
            it->second.max_per_message = std::max(it->second.max_per_message, in_msg);
        }
    }

    std::vector<SelfSuspensionStats> out;
    out.reserve(stats.size());
    for (auto& [key, s] : stats) out.push_back(s);
    return out;
}

// ---------------------------------------------------------------------------
// Export

void write_trace(std::ostream& os, const ScheduleTrace& trace, const FlowSet& fs) {
    const auto links = trace.links();
    for (Cycles t = 0; t < trace.horizon(); ++t) {
        os << t;
        for (std::size_t c = 0; c < links.size(); ++c) {
            os << ',' << links[c].value << '=';
            const auto o = trace.owner_at(t, c);
            if (o == ScheduleTrace::kIdle) {
                os << '-';
            } else {
                os << fs[static_cast<std::size_t>(o)].id;
            }
        }
        os << '\n';
    }
    for (const TraceEvent& e : trace.events) {
        os << "E," << e.time << ',' << to_string(e.kind) << ',' << fs[e.flow].id << '\n';
    }
}

}  // namespace sp2

#include <doctest.h>

#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "sp2/simulator.hpp"
#include "support/test_support.hpp"

using namespace sp2;

namespace {

std::vector<Contender> contenders_of(const FlowSet& fs, std::initializer_list<std::size_t> idx) {
    std::vector<Contender> out;
    for (std::size_t i : idx) out.push_back({i, fs[i].priority, fs[i].path.links});
    return out;
}

// Reference run written against raw link sets: returns per-flow completion
// times of the messages released by `rel`.
std::vector<std::vector<Cycles>> reference_completions(const FlowSet& fs, const ReleasePattern& rel, Cycles horizon) {
    const std::size_t n = fs.size();
    std::vector<std::deque<Cycles>> left(n);
    std::vector<std::vector<Cycles>> done(n);
    for (Cycles t = 0; t < horizon; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            for (Cycles r : rel.releases[i]) {
                if (r == t) left[i].push_back(fs[i].flits + static_cast<Cycles>(fs[i].eta()) - 1);
            }
        }
        std::set<std::uint32_t> busy;
        for (std::size_t i = 0; i < n; ++i) {  // index order is priority order
            if (left[i].empty()) continue;
            bool free = true;
            for (LinkId l : fs[i].path.links) free = free && !busy.contains(l.value);
            if (!free) continue;
            for (LinkId l : fs[i].path.links) busy.insert(l.value);
            if (--left[i].front() == 0) {
                left[i].pop_front();
                done[i].push_back(t + 1);
            }
        }
    }
    return done;
}

std::vector<std::vector<Cycles>> completions(const ScheduleTrace& trace, std::size_t n) {
    std::vector<std::vector<Cycles>> out(n);
    for (const auto& m : trace.messages) {
        if (m.completion) out[m.flow].push_back(*m.completion);
    }
    return out;
}

}  // namespace

TEST_CASE("arbitrate_cycle on Example 1") {
    const auto fs = testing::example1();
    SUBCASE("all three released") { CHECK(arbitrate_cycle(contenders_of(fs, {0, 1, 2})) == std::vector<std::size_t>{0, 2}); }
    SUBCASE("after f1 finishes, f2 suspends f3 on all of its links") {
        CHECK(arbitrate_cycle(contenders_of(fs, {1, 2})) == std::vector<std::size_t>{1});
    }
    SUBCASE("order of the input does not matter") {
        CHECK(arbitrate_cycle(contenders_of(fs, {2, 1, 0})) == std::vector<std::size_t>{0, 2});
    }
    SUBCASE("nobody active") { CHECK(arbitrate_cycle({}).empty()); }
    SUBCASE("duplicate priorities") {
        auto c = contenders_of(fs, {0, 1});
        c[1].priority = c[0].priority;
        CHECK_THROWS_AS((void)arbitrate_cycle(c), std::invalid_argument);
    }
}

TEST_CASE("Example 1 synchronous simulation") {
    const auto fs = testing::example1();
    const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 60), 60);
    REQUIRE(trace.messages.size() == 3);
    CHECK(trace.messages[0].completion == 20);
    CHECK(trace.messages[1].completion == 40);
    CHECK(trace.messages[2].completion == 50);
    CHECK(trace.miss_count() == 0);
    CHECK(trace.model_valid);
    CHECK(check_trace(trace, fs).ok());

    // f3 holds nothing while f2 transmits.
    for (Cycles t = 20; t < 40; ++t) {
        for (LinkId l : fs[2].path.links) CHECK(trace.owner(t, l) != std::optional<std::size_t>{2});
    }
    // f2 is self-suspended on f3's links while f1 blocks it.
    for (Cycles t = 0; t < 20; ++t) CHECK(is_self_suspended(trace, fs, t, 1, 2));
    CHECK_FALSE(is_self_suspended(trace, fs, 20, 1, 2));
    const auto stats = self_suspensions(trace, fs);
    REQUIRE(stats.size() == 1);
    CHECK(stats[0].observer == 2);
    CHECK(stats[0].suspended == 1);
    CHECK(stats[0].total == 20);
    CHECK(stats[0].max_per_message == 20);
}

TEST_CASE("trace export format") {
    const auto fs = testing::example1();
    const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 60), 60);
    std::ostringstream os;
    write_trace(os, trace, fs);
    std::vector<std::string> lines;
    std::istringstream in(os.str());
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    REQUIRE(lines.size() == 60 + 6);
    // Link ids: R(0,0)->R(0,1) = 0, R(0,1)->R(0,2) = 2, R(0,2)->R(1,2) = 6.
    CHECK(lines[0] == "0,0=1,2=3,6=3");
    CHECK(lines[19] == "19,0=1,2=3,6=3");
    CHECK(lines[20] == "20,0=2,2=2,6=-");
    CHECK(lines[39] == "39,0=2,2=2,6=-");
    CHECK(lines[40] == "40,0=-,2=3,6=3");
    CHECK(lines[49] == "49,0=-,2=3,6=3");
    CHECK(lines[50] == "50,0=-,2=-,6=-");
    CHECK(lines[60] == "E,0,release,1");
    CHECK(lines[61] == "E,0,release,2");
    CHECK(lines[62] == "E,0,release,3");
    CHECK(lines[63] == "E,20,complete,1");
    CHECK(lines[64] == "E,40,complete,2");
    CHECK(lines[65] == "E,50,complete,3");
}

TEST_CASE("contention-free flows take exactly C+eta-1") {
    auto t = std::make_shared<const Topology>(Topology::build_mesh(4, 4, false));
    SUBCASE("single flow, arbitrary release") {
        FlowSet fs(t, {Flow{1, 1, 9, 30, 30, testing::router_path(*t, {{0, 0}, {0, 1}, {1, 1}, {2, 1}})}});
        ReleasePattern rel;
        rel.releases = {{7, 40, 95}};
        const auto trace = simulate(fs, rel, 150);
        for (const auto& m : trace.messages) CHECK(m.response_time() == 11);
    }
    SUBCASE("two disjoint flows") {
        FlowSet fs(t, {Flow{1, 1, 5, 30, 30, testing::router_path(*t, {{0, 0}, {0, 1}})},
                       Flow{2, 2, 8, 30, 30, testing::router_path(*t, {{3, 0}, {3, 1}, {3, 2}})}});
        const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 30), 30);
        CHECK(trace.messages[0].completion == 5);
        CHECK(trace.messages[1].completion == 9);
    }
}

TEST_CASE("deadline misses and backlog are logged, not fatal") {
    auto t = std::make_shared<const Topology>(Topology::build_mesh(2, 2, false));
    const Path p = testing::router_path(*t, {{0, 0}, {0, 1}});
    SUBCASE("lower-priority flow misses") {
        FlowSet fs(t, {Flow{1, 1, 6, 10, 10, p}, Flow{2, 2, 6, 10, 8, p}});
        const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 10), 10);
        CHECK(trace.messages[1].missed);
        CHECK(trace.miss_count() == 1);
        CHECK(std::count(trace.events.begin(), trace.events.end(), TraceEvent{8, TraceEvent::Kind::Miss, 1}) == 1);
    }
    SUBCASE("release while the previous message is unfinished") {
        FlowSet fs(t, {Flow{1, 1, 10, 4, 4, p}});
        const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 30), 30);
        CHECK_FALSE(trace.model_valid);
        CHECK(std::any_of(trace.events.begin(), trace.events.end(),
                          [](const TraceEvent& e) { return e.kind == TraceEvent::Kind::Violation; }));
        // The backlog is still served in order.
        CHECK(trace.messages[0].completion == 10);
        CHECK(trace.messages[1].completion == 20);
        CHECK(check_trace(trace, fs).ok());
    }
    SUBCASE("deadline exactly at the horizon") {
        FlowSet fs(t, {Flow{1, 1, 6, 10, 10, p}, Flow{2, 2, 6, 10, 10, p}});
        const auto trace = simulate(fs, ReleasePattern::synchronous(fs, 10), 10);
        CHECK(trace.messages[1].missed);
    }
}

TEST_CASE("release patterns") {
    std::mt19937_64 rng(3);
    const auto fs = testing::random_flowset(rng);
    const auto a = ReleasePattern::sporadic(fs, 11, 5000);
    const auto b = ReleasePattern::sporadic(fs, 11, 5000);
    const auto c = ReleasePattern::sporadic(fs, 12, 5000);
    CHECK(a.releases == b.releases);
    CHECK(a.releases != c.releases);
    CHECK_NOTHROW(a.validate(fs));
    for (std::size_t i = 0; i < fs.size(); ++i) {
        REQUIRE_FALSE(a.releases[i].empty());
        CHECK(a.releases[i].front() < fs[i].period);
    }
    std::vector<Cycles> offsets(fs.size(), 3);
    const auto periodic = ReleasePattern::periodic(fs, offsets, 1000);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t k = 1; k < periodic.releases[i].size(); ++k) {
            CHECK(periodic.releases[i][k] - periodic.releases[i][k - 1] == fs[i].period);
        }
    }
    ReleasePattern bad = a;
    bad.releases[0] = {0, fs[0].period - 1};
    CHECK_THROWS_AS(bad.validate(fs), std::invalid_argument);
    CHECK_THROWS_AS((void)simulate(fs, bad, 100), std::invalid_argument);
    CHECK_THROWS_AS((void)ReleasePattern::sporadic(fs, 1, 100, 0.0), std::invalid_argument);
}

TEST_CASE("simulate matches the reference run and passes check_trace") {
    std::mt19937_64 rng(99);
    for (int n = 0; n < 300; ++n) {
        const auto fs = testing::random_flowset(rng);
        const Cycles horizon = 1500;
        const auto rel = n % 2 == 0 ? ReleasePattern::synchronous(fs, horizon)
                                    : ReleasePattern::sporadic(fs, static_cast<std::uint64_t>(n), horizon);
        const auto trace = simulate(fs, rel, horizon);
        REQUIRE(completions(trace, fs.size()) == reference_completions(fs, rel, horizon));
        const auto check = check_trace(trace, fs);
        REQUIRE_MESSAGE(check.ok(), (check.violations.empty() ? "" : check.violations.front()));
        // All-or-nothing, and one owner per link, cycle by cycle.
        for (Cycles t = 0; t < horizon; ++t) {
            for (std::size_t i = 0; i < fs.size(); ++i) {
                std::size_t held = 0;
                for (LinkId l : fs[i].path.links) held += trace.owner(t, l) == std::optional<std::size_t>{i};
                REQUIRE((held == 0 || held == fs[i].eta()));
            }
        }
    }
}

TEST_CASE("check_trace catches forged traces") {
    const auto fs = testing::example1();
    auto good = simulate(fs, ReleasePattern::synchronous(fs, 60), 60);
    const auto col_shared = *good.column_of(fs[2].path.links[0]);  // R(0,1)->R(0,2)
    const auto col_tail = *good.column_of(fs[2].path.links[1]);    // R(0,2)->R(1,2)

    SUBCASE("partial grant") {
        auto forged = good;
        forged.set_owner(45, col_tail, ScheduleTrace::kIdle);
        const auto check = check_trace(forged, fs);
        REQUIRE_FALSE(check.ok());
        CHECK(check.violations.front().find("all-or-nothing") != std::string::npos);
    }
    SUBCASE("idle cycle while unblocked") {
        // A one-flow run with a hole in its grants.
        auto t = std::make_shared<const Topology>(Topology::build_mesh(2, 2, false));
        FlowSet one(t, {Flow{1, 1, 3, 10, 10, testing::router_path(*t, {{0, 0}, {0, 1}})}});
        ScheduleTrace forged(10, one[0].path.links);
        forged.set_owner(0, 0, 0);
        forged.set_owner(2, 0, 0);
        forged.set_owner(3, 0, 0);
        forged.events = {{0, TraceEvent::Kind::Release, 0}, {4, TraceEvent::Kind::Complete, 0}};
        const auto check = check_trace(forged, one);
        REQUIRE(check.violations.size() == 1);
        CHECK(check.violations.front().find("work conservation") != std::string::npos);
    }
    SUBCASE("completion does not match the grant count") {
        auto forged = good;
        for (auto& e : forged.events) {
            if (e.kind == TraceEvent::Kind::Complete && e.flow == 2) e.time = 49;
        }
        CHECK_FALSE(check_trace(forged, fs).ok());
    }
    SUBCASE("link outside the path") {
        auto forged = good;
        forged.set_owner(55, col_shared, 0);
        CHECK_FALSE(check_trace(forged, fs).ok());
    }
}

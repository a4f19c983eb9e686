#include <doctest.h>

#include <random>

#include "episync/tasking.hpp"

using namespace episync;

namespace {

StateClass cls(std::string label, std::vector<std::vector<StateId>> targets) {
    return StateClass(std::move(label), std::move(targets));
}

}  // namespace

TEST_CASE("class membership lifts per-agent target sets") {
    const StateClass c = cls("a", {{1, 2}, {5}});
    CHECK(c.contains({1, 0}));
    CHECK(c.contains({0, 5}));
    CHECK_FALSE(c.contains({0, 0}));
    CHECK(c.satisfying_agent({2, 5}) == 0);  // lowest agent index wins
    CHECK(c.satisfying_agent({0, 5}) == 1);
    CHECK_FALSE(c.satisfying_agent({0, 0}).has_value());
}

TEST_CASE("assignments reject duplicate labels") {
    CHECK_THROWS_AS(TaskSiteAssignment({cls("a", {{1}}), cls("a", {{2}})}), std::invalid_argument);
    const TaskSiteAssignment xi({cls("a", {{1}}), cls("b", {{2}})});
    CHECK(xi.has_label("a"));
    CHECK(xi.find("b") != nullptr);
    CHECK(xi.find("c") == nullptr);
    const TaskSiteAssignment rest = xi.without({"a"});
    CHECK(rest.size() == 1);
    CHECK(rest.at(0).label() == "b");
}

TEST_CASE("task updates remove then add") {
    const TaskSiteAssignment xi({cls("a", {{1}}), cls("b", {{2}})});
    TaskUpdate up;
    up.removed = {"a"};
    up.added = {cls("c", {{3}})};
    const TaskSiteAssignment next = apply_update(xi, up);
    CHECK_FALSE(next.has_label("a"));
    CHECK(next.has_label("b"));
    CHECK(next.has_label("c"));

    TaskUpdate bad_removal;
    bad_removal.removed = {"zzz"};
    CHECK_THROWS_AS(apply_update(xi, bad_removal), std::invalid_argument);
    TaskUpdate collision;
    collision.added = {cls("b", {{9}})};
    CHECK_THROWS_AS(apply_update(xi, collision), std::invalid_argument);
}

TEST_CASE("satisfaction witnesses pick the earliest step and lowest agent") {
    const TaskSiteAssignment xi({cls("a", {{7}, {7}}), cls("b", {{}, {8}})});
    const Trajectory traj(2, {{0, 0}, {7, 7}, {0, 8}});
    const SatisfactionResult res = satisfies(traj, xi);
    CHECK(res.satisfied);
    CHECK(res.witness.at("a") == std::pair<int, int>{0, 3});  // both agents hit at 3; agent 0 wins
    CHECK(res.witness.at("b") == std::pair<int, int>{1, 4});

    const Trajectory partial(2, {{0, 0}, {7, 0}});
    const SatisfactionResult miss = satisfies(partial, xi);
    CHECK_FALSE(miss.satisfied);
    CHECK(miss.witness.count("a") == 1);  // partial witness retained
    CHECK(miss.witness.count("b") == 0);
}

TEST_CASE("first satisfaction times agree with a brute scan") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2;
        std::vector<std::vector<StateId>> ta(static_cast<std::size_t>(n));
        std::vector<std::vector<StateId>> tb(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            for (int v = 0; v < 6; ++v) {
                if (rng() % 3 == 0) ta[static_cast<std::size_t>(i)].push_back(v);
                if (rng() % 3 == 0) tb[static_cast<std::size_t>(i)].push_back(v);
            }
        }
        const TaskSiteAssignment xi({cls("a", ta), cls("b", tb)});
        std::vector<JointState> states;
        for (int k = 0; k < 8; ++k) {
            states.push_back({static_cast<StateId>(rng() % 6), static_cast<StateId>(rng() % 6)});
        }
        const Trajectory traj(0, states);
        const auto times = first_satisfaction_times(traj, xi);
        for (const auto& c : xi.classes()) {
            std::optional<std::pair<int, int>> expect;
            for (int k = 0; k <= traj.end_step() && !expect; ++k) {
                for (int i = 0; i < n && !expect; ++i) {
                    const auto& t = c.targets_for(i);
                    const StateId s = traj.at(k)[static_cast<std::size_t>(i)];
                    if (std::find(t.begin(), t.end(), s) != t.end()) expect = {i, k};
                }
            }
            CHECK(times.at(c.label()) == expect);
        }
    }
}

#include <doctest.h>

#include <random>

#include "episync/solver.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace episync;

namespace {

// Path 0-1-2-3-4 with self loops everywhere.
AgentTransitionSystem corridor(int n = 5) {
    AgentTransitionSystem sys(n);
    for (StateId s = 0; s < n; ++s) {
        sys.add_transition(s, s);
        if (s + 1 < n) {
            sys.add_transition(s, s + 1);
            sys.add_transition(s + 1, s);
        }
    }
    return sys;
}

SyncStates always_sync(int n) { return SyncStates(std::vector<AgentSync>(static_cast<std::size_t>(n), AgentSync{true})); }

StateClass site(std::string label, int num_agents, StateId cell) {
    std::vector<std::vector<StateId>> targets(static_cast<std::size_t>(num_agents), std::vector<StateId>{cell});
    return StateClass(std::move(label), std::move(targets));
}

}  // namespace

TEST_CASE("two corridor agents split two sites optimally") {
    const MultiAgentTransitionSystem sys = compose({corridor(), corridor()});
    const SyncStates sync = always_sync(2);
    SolveRequest req;
    req.system = &sys;
    req.sync = &sync;
    req.start = {0, 4};
    req.assignment = TaskSiteAssignment({site("a", 2, 1), site("b", 2, 3)});
    const SolveResult res = solve(req);
    REQUIRE(res.ok());
    // each agent is one step from its nearest site
    CHECK(res.completion_step == 1);
    CHECK(audit_plan(req, *res.plan) == std::nullopt);
}

TEST_CASE("single agent serializes both sites") {
    const MultiAgentTransitionSystem sys = compose({corridor()});
    const SyncStates sync = always_sync(1);
    SolveRequest req;
    req.system = &sys;
    req.sync = &sync;
    req.start = {0};
    req.assignment = TaskSiteAssignment({site("a", 1, 2), site("b", 1, 4)});
    const SolveResult res = solve(req);
    REQUIRE(res.ok());
    CHECK(res.completion_step == 4);  // 0->1->2->3->4
}

TEST_CASE("pins are honored and reported when impossible") {
    const MultiAgentTransitionSystem sys = compose({corridor()});
    const SyncStates sync = always_sync(1);
    SolveRequest req;
    req.system = &sys;
    req.sync = &sync;
    req.start = {0};
    req.assignment = TaskSiteAssignment({site("a", 1, 2)});
    req.pins = {{0, 1, 0}, {0, 2, 0}};  // forced to idle two steps
    const SolveResult res = solve(req);
    REQUIRE(res.ok());
    CHECK(res.completion_step == 4);
    CHECK(res.plan->at(1) == JointState{0});
    CHECK(res.plan->at(2) == JointState{0});

    req.pins = {{0, 1, 3}};  // unreachable in one step
    const SolveResult bad = solve(req);
    REQUIRE_FALSE(bad.ok());
    CHECK(bad.error->reason == InfeasibleReason::pin);
}

TEST_CASE("sync visits constrain the plan") {
    const MultiAgentTransitionSystem sys = compose({corridor()});
    AgentSync only4;
    only4.own_states = {4};
    const SyncStates sync({only4});
    SolveRequest req;
    req.system = &sys;
    req.sync = &sync;
    req.start = {0};
    req.assignment = TaskSiteAssignment({site("a", 1, 1)});
    req.sync_visits = {{0, 5}};
    const SolveResult res = solve(req);
    REQUIRE(res.ok());
    CHECK(res.completion_step == 1);
    CHECK(res.plan->at(5) == JointState{4});
    CHECK(audit_plan(req, *res.plan) == std::nullopt);
}

TEST_CASE("infeasible tasks are attributed to the task constraint") {
    AgentTransitionSystem oneway(3);  // 0 -> 1 -> 1; state 2 unreachable
    oneway.add_transition(0, 1);
    oneway.add_transition(1, 1);
    oneway.add_transition(2, 2);
    const MultiAgentTransitionSystem sys = compose({oneway});
    const SyncStates sync = always_sync(1);
    SolveRequest req;
    req.system = &sys;
    req.sync = &sync;
    req.start = {0};
    req.assignment = TaskSiteAssignment({site("a", 1, 2)});
    const SolveResult res = solve(req);
    REQUIRE_FALSE(res.ok());
    CHECK(res.error->reason == InfeasibleReason::task);
}

TEST_CASE("malformed requests throw") {
    const MultiAgentTransitionSystem sys = compose({corridor()});
    const SyncStates sync = always_sync(1);
    SolveRequest req;
    req.system = &sys;
    req.sync = &sync;
    req.start = {0};
    SUBCASE("pin at the start step contradicting the start state") {
        req.pins = {{0, 0, 3}};
        CHECK_THROWS_AS((void)solve(req), std::invalid_argument);
    }
    SUBCASE("sync visit not after the start") {
        req.sync_visits = {{0, 0}};
        CHECK_THROWS_AS((void)solve(req), std::invalid_argument);
    }
    SUBCASE("unknown start state") {
        req.start = {99};
        CHECK_THROWS_AS((void)solve(req), std::invalid_argument);
    }
    SUBCASE("missing system") {
        req.system = nullptr;
        CHECK_THROWS_AS((void)solve(req), std::invalid_argument);
    }
}

TEST_CASE("exact search agrees with the explicit joint oracle") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        const int n0 = 3 + static_cast<int>(rng() % 5);
        const int n1 = 3 + static_cast<int>(rng() % 5);
        std::vector<AgentTransitionSystem> agents;
        agents.push_back(testing::random_live_system(rng, n0, 0.1));
        agents.push_back(testing::random_live_system(rng, n1, 0.1));
        const MultiAgentTransitionSystem sys = compose(agents);
        const SyncStates sync = always_sync(2);

        std::vector<StateClass> classes;
        const int num_classes = 1 + static_cast<int>(rng() % 3);
        for (int c = 0; c < num_classes; ++c) {
            std::vector<std::vector<StateId>> targets(2);
            targets[0] = {static_cast<StateId>(rng() % static_cast<std::uint64_t>(n0))};
            targets[1] = {static_cast<StateId>(rng() % static_cast<std::uint64_t>(n1))};
            classes.push_back(StateClass("c" + std::to_string(c), targets));
        }

        SolveRequest req;
        req.system = &sys;
        req.sync = &sync;
        req.start_step = static_cast<int>(rng() % 3);
        req.start = {static_cast<StateId>(rng() % static_cast<std::uint64_t>(n0)),
                     static_cast<StateId>(rng() % static_cast<std::uint64_t>(n1))};
        req.assignment = TaskSiteAssignment(classes);
        req.options.horizon = 12;

        const SolveResult res = solve(req);
        const testing::JointOracleResult oracle = testing::joint_solve_oracle(req);
        REQUIRE(res.ok() == oracle.feasible);
        if (res.ok()) {
            CHECK(res.completion_step == oracle.completion);
            CHECK(audit_plan(req, *res.plan) == std::nullopt);
        }
    }
}

TEST_CASE("prioritized search output is always audit-clean and never beats the optimum") {
    std::mt19937_64 rng(31);
    int solved = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n0 = 3 + static_cast<int>(rng() % 5);
        const int n1 = 3 + static_cast<int>(rng() % 5);
        std::vector<AgentTransitionSystem> agents;
        agents.push_back(testing::random_live_system(rng, n0, 0.1));
        agents.push_back(testing::random_live_system(rng, n1, 0.1));
        const MultiAgentTransitionSystem sys = compose(agents);
        const SyncStates sync = always_sync(2);

        std::vector<StateClass> classes;
        for (int c = 0; c < 2; ++c) {
            std::vector<std::vector<StateId>> targets(2);
            targets[0] = {static_cast<StateId>(rng() % static_cast<std::uint64_t>(n0))};
            targets[1] = {static_cast<StateId>(rng() % static_cast<std::uint64_t>(n1))};
            classes.push_back(StateClass("c" + std::to_string(c), targets));
        }

        SolveRequest req;
        req.system = &sys;
        req.sync = &sync;
        req.start = {static_cast<StateId>(rng() % static_cast<std::uint64_t>(n0)),
                     static_cast<StateId>(rng() % static_cast<std::uint64_t>(n1))};
        req.assignment = TaskSiteAssignment(classes);
        req.options.horizon = 12;
        req.options.exact_state_limit = 1;  // force the per-agent strategy

        const SolveResult res = solve(req);
        const testing::JointOracleResult oracle = testing::joint_solve_oracle(req);
        if (res.ok()) {
            ++solved;
            CHECK(oracle.feasible);
            CHECK(res.completion_step >= oracle.completion);
            CHECK(audit_plan(req, *res.plan) == std::nullopt);
        }
    }
    CHECK(solved > 30);
}

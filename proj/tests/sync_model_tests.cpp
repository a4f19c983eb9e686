#include <doctest.h>

#include "episync/sync_model.hpp"

using namespace episync;

namespace {

// Two agents: agent 0 always in sync, agent 1 syncs in own state 0 or when
// co-located with agent 0 (same numeric state).
SyncStates two_agent_sync() {
    AgentSync a0;
    a0.always = true;
    AgentSync a1;
    a1.own_states = {0};
    a1.partner = 0;
    a1.pair_pred = [](StateId own, StateId partner) { return own == partner; };
    a1.partner_sync_states = [](StateId partner) { return std::vector<StateId>{partner}; };
    return SyncStates({a0, a1});
}

Trajectory plan4() {
    // agent 1: 2 -> 1 -> 0 -> 0; agent 0: 3 -> 3 -> 3 -> 1
    return Trajectory(0, {{3, 2}, {3, 1}, {3, 0}, {1, 0}});
}

}  // namespace

TEST_CASE("sync membership clauses") {
    const SyncStates sync = two_agent_sync();
    CHECK(sync.contains(0, {5, 5}));          // always
    CHECK(sync.contains(1, {9, 0}));          // own state
    CHECK(sync.contains(1, {4, 4}));          // co-located with partner
    CHECK_FALSE(sync.contains(1, {4, 2}));
    CHECK_THROWS_AS((void)sync.contains(2, {0, 0}), std::out_of_range);
}

TEST_CASE("sync construction validates partners") {
    AgentSync self;
    self.partner = 0;
    self.pair_pred = [](StateId, StateId) { return true; };
    CHECK_THROWS_AS(SyncStates({self}), std::invalid_argument);
    AgentSync no_pred;
    no_pred.partner = 1;
    AgentSync other;
    CHECK_THROWS_AS(SyncStates({no_pred, other}), std::invalid_argument);
}

TEST_CASE("initial beliefs are fully synchronized projections") {
    const Trajectory plan = plan4();
    const PlanBeliefs b = PlanBeliefs::initial(plan, 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(b.eigen(i) == project(plan, i, 2));
        CHECK(b.planner_belief(i) == b.eigen(i));
        CHECK(divergence(b, i).empty());
    }
}

TEST_CASE("sync update adopts the plan suffix only for synced agents") {
    const SyncStates sync = two_agent_sync();
    const Trajectory plan = plan4();
    PlanBeliefs b = PlanBeliefs::initial(plan, 2);
    // fake a divergent eigen plan for agent 1
    b.set_eigen(1, AgentTrajectory(1, {9, 9, 9}));

    // x at step 1: agent 1 at state 1, not synced -> keeps divergent eigen
    const PlanBeliefs after = sync_update(b, sync, {3, 1}, 1);
    CHECK(after.eigen(1) == AgentTrajectory(1, {9, 9, 9}));
    CHECK(after.eigen(0) == project(plan, 0, 2).suffix(1));  // agent 0 always syncs

    // x at step 2: agent 1 in own sync state 0 -> adopts plan suffix
    const PlanBeliefs synced = sync_update(b, sync, {3, 0}, 2);
    CHECK(synced.eigen(1) == project(plan, 1, 2).suffix(2));
    CHECK(synced.planner_belief(1) == synced.eigen(1));
    CHECK(divergence(synced, 1).empty());
}

TEST_CASE("step zero forces full synchronization") {
    const SyncStates sync = two_agent_sync();
    const Trajectory plan = plan4();
    PlanBeliefs b = PlanBeliefs::initial(plan, 2);
    b.set_eigen(1, AgentTrajectory(0, {9, 9}));
    const PlanBeliefs after = sync_update(b, sync, {3, 2}, 0);  // agent 1 not in X^1_sync
    CHECK(after.eigen(1) == project(plan, 1, 2));
}

TEST_CASE("sync update is idempotent") {
    const SyncStates sync = two_agent_sync();
    PlanBeliefs b = PlanBeliefs::initial(plan4(), 2);
    b.set_eigen(1, AgentTrajectory(1, {9, 9, 9}));
    const JointState x{3, 0};
    const PlanBeliefs once = sync_update(b, sync, x, 2);
    const PlanBeliefs twice = sync_update(once, sync, x, 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(once.eigen(i) == twice.eigen(i));
        CHECK(once.planner_belief(i) == twice.planner_belief(i));
    }
}

TEST_CASE("future sync steps are strictly after the query step") {
    const SyncStates sync = two_agent_sync();
    const Trajectory plan = plan4();  // agent 1 synced at steps 2 (own 0) and 3 (own 0)
    CHECK(next_sync_step(plan, sync, 1, 0) == 2);
    CHECK(next_sync_step(plan, sync, 1, 2) == 3);
    CHECK_FALSE(next_sync_step(plan, sync, 1, 3).has_value());
    CHECK(future_sync_steps(plan, sync, 1, 0) == std::vector<int>{2, 3});
    CHECK(future_sync_steps(plan, sync, 0, 1) == std::vector<int>{2, 3});  // always-sync agent
}

TEST_CASE("divergence reports exactly the differing overlap steps") {
    PlanBeliefs b = PlanBeliefs::initial(plan4(), 2);
    b.set_eigen(1, AgentTrajectory(1, {1, 7, 0}));  // differs from plan only at step 2
    CHECK(divergence(b, 1) == std::vector<int>{2});
}

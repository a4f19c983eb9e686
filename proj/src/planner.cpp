#include "episync/planner.hpp"

namespace episync {

const char* to_string(PlanMode m) { return m == PlanMode::alg1 ? "alg1" : "alg3"; }

PlannerResult plan_with_sync_mode(const PlanBeliefs& beliefs, const SyncStates& sync,
                                  const MultiAgentTransitionSystem& system, const JointState& x_k,
                                  int k, const TaskSiteAssignment& assignment,
                                  const SolverOptions& options, PlanMode mode) {
    PlannerResult result;
    const Trajectory& old_plan = beliefs.global_plan();
    const int n = system.num_agents();

    for (int i = 0; i < n; ++i) {
        if (sync.contains(i, x_k)) continue;

        const std::vector<int> sync_steps = future_sync_steps(old_plan, sync, i, k);
        if (sync_steps.empty()) {
            result.status = PlannerResult::Status::no_future_sync;
            result.no_sync_agent = i;
            return result;
        }
        if (mode == PlanMode::alg1) {
            result.sync_visits.push_back({i, sync_steps.front()});
        } else {
            for (int step : sync_steps) result.sync_visits.push_back({i, step});
        }

        // Pin the believed trajectory through the next expected sync. The
        // planner's belief may end early; the old plan's projection carries
        // the same states wherever the belief is still in force.
        const AgentTrajectory& belief = beliefs.planner_belief(i);
        for (int step = k; step <= sync_steps.front(); ++step) {
            const StateId pinned = belief.defined_at(step)
                                       ? belief.at(step)
                                       : old_plan.at(step)[static_cast<std::size_t>(i)];
            result.pins.push_back({i, step, pinned});
        }
    }

    SolveRequest req;
    req.system = &system;
    req.sync = &sync;
    req.start_step = k;
    req.start = x_k;
    req.assignment = assignment;
    req.pins = result.pins;
    req.sync_visits = result.sync_visits;
    req.options = options;

    SolveResult solved = solve(req);
    if (!solved.ok()) {
        result.status = PlannerResult::Status::infeasible;
        result.error = std::move(solved.error);
        return result;
    }
    result.plan = std::move(solved.plan);
    result.completion_step = solved.completion_step;
    return result;
}

}  // namespace episync

#include "episync/sync_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace episync {

SyncStates::SyncStates(std::vector<AgentSync> agents) : agents_(std::move(agents)) {
    if (agents_.empty()) throw std::invalid_argument("sync states need at least one agent");
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        auto& a = agents_[i];
        std::sort(a.own_states.begin(), a.own_states.end());
        a.own_states.erase(std::unique(a.own_states.begin(), a.own_states.end()), a.own_states.end());
        if (a.partner >= 0) {
            if (a.partner == static_cast<int>(i) || a.partner >= static_cast<int>(agents_.size())) {
                throw std::invalid_argument("sync partner index out of range");
            }
            if (!a.pair_pred) throw std::invalid_argument("sync partner set without a pair predicate");
        }
    }
}

const AgentSync& SyncStates::spec(int agent) const {
    if (agent < 0 || agent >= num_agents()) throw std::out_of_range("sync agent index out of range");
    return agents_[static_cast<std::size_t>(agent)];
}

bool SyncStates::contains(int agent, const JointState& x) const {
    const AgentSync& a = spec(agent);
    if (a.always) return true;
    const StateId own = x.at(static_cast<std::size_t>(agent));
    if (std::binary_search(a.own_states.begin(), a.own_states.end(), own)) return true;
    if (a.partner >= 0) {
        return a.pair_pred(own, x.at(static_cast<std::size_t>(a.partner)));
    }
    return false;
}

PlanBeliefs::PlanBeliefs(Trajectory global_plan, std::vector<AgentTrajectory> eigen,
                         std::vector<AgentTrajectory> planner_belief, int current_step)
    : global_plan_(std::move(global_plan)),
      eigen_(std::move(eigen)),
      planner_belief_(std::move(planner_belief)),
      current_step_(current_step) {
    if (eigen_.empty() || eigen_.size() != planner_belief_.size()) {
        throw std::invalid_argument("eigen/belief trajectory counts disagree");
    }
}

PlanBeliefs PlanBeliefs::initial(const Trajectory& global_plan, int num_agents) {
    std::vector<AgentTrajectory> eigen;
    eigen.reserve(static_cast<std::size_t>(num_agents));
    for (int i = 0; i < num_agents; ++i) eigen.push_back(project(global_plan, i, num_agents));
    std::vector<AgentTrajectory> belief = eigen;
    return PlanBeliefs(global_plan, std::move(eigen), std::move(belief), global_plan.start_step());
}

const AgentTrajectory& PlanBeliefs::eigen(int agent) const {
    return eigen_.at(static_cast<std::size_t>(agent));
}

const AgentTrajectory& PlanBeliefs::planner_belief(int agent) const {
    return planner_belief_.at(static_cast<std::size_t>(agent));
}

void PlanBeliefs::set_eigen(int agent, AgentTrajectory traj) {
    eigen_.at(static_cast<std::size_t>(agent)) = std::move(traj);
}

void PlanBeliefs::set_planner_belief(int agent, AgentTrajectory traj) {
    planner_belief_.at(static_cast<std::size_t>(agent)) = std::move(traj);
}

PlanBeliefs sync_update(const PlanBeliefs& beliefs, const SyncStates& sync, const JointState& x_k, int k) {
    PlanBeliefs next = beliefs;
    next.set_current_step(k);
    const int n = beliefs.num_agents();
    for (int i = 0; i < n; ++i) {
        const bool in_sync = (k == 0) || sync.contains(i, x_k);
        if (in_sync) {
            AgentTrajectory synced = project(beliefs.global_plan(), i, n);
            if (synced.defined_at(k)) synced = synced.suffix(k);
            next.set_eigen(i, synced);
            next.set_planner_belief(i, std::move(synced));
        }
        // otherwise eigen/belief keep their step-(k-1) values (copied with `next`)
    }
    return next;
}

std::optional<int> next_sync_step(const Trajectory& plan, const SyncStates& sync, int agent, int after) {
    for (int k = std::max(after + 1, plan.start_step()); k <= plan.end_step(); ++k) {
        if (sync.contains(agent, plan.at(k))) return k;
    }
    return std::nullopt;
}

std::vector<int> future_sync_steps(const Trajectory& plan, const SyncStates& sync, int agent, int after) {
    std::vector<int> steps;
    for (int k = std::max(after + 1, plan.start_step()); k <= plan.end_step(); ++k) {
        if (sync.contains(agent, plan.at(k))) steps.push_back(k);
    }
    return steps;
}

std::vector<int> divergence(const PlanBeliefs& beliefs, int agent) {
    const AgentTrajectory planned = project(beliefs.global_plan(), agent, beliefs.num_agents());
    const AgentTrajectory& eigen = beliefs.eigen(agent);
    std::vector<int> steps;
    const int lo = std::max(planned.start_step(), eigen.start_step());
    const int hi = std::min(planned.end_step(), eigen.end_step());
    for (int k = lo; k <= hi; ++k) {
        if (planned.at(k) != eigen.at(k)) steps.push_back(k);
    }
    return steps;
}

}  // namespace episync

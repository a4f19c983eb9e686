#pragma once

#include <algorithm>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace episync {

// Index of a state inside one agent's transition system. The numeric order
// of ids doubles as the fixed state ordering used for deterministic
// tie-breaking everywhere (solver, recovery bridges).
using StateId = int;

// One state per agent, indexed by agent.
using JointState = std::vector<StateId>;

// Explicit-state single-agent transition system. States are opaque ids with
// optional labels; attributes live with whoever built the system.
class AgentTransitionSystem {
public:
    explicit AgentTransitionSystem(int num_states);

    int num_states() const { return static_cast<int>(succ_.size()); }
    bool has_state(StateId s) const { return s >= 0 && s < num_states(); }

    void add_transition(StateId from, StateId to);
    bool has_transition(StateId from, StateId to) const;

    // Sorted ascending.
    std::span<const StateId> successors(StateId s) const;
    std::span<const StateId> predecessors(StateId s) const;

    std::size_t num_transitions() const;

    void set_label(StateId s, std::string label);
    const std::string& label(StateId s) const;

private:
    void check_state(StateId s) const;

    std::vector<std::vector<StateId>> succ_;
    std::vector<std::vector<StateId>> pred_;
    std::vector<std::string> labels_;
};

// Product of agent systems. Joint states are tuples formed on demand; the
// product state space is never materialized. A joint transition exists iff
// every per-agent component pair is a transition of that agent's system.
class MultiAgentTransitionSystem {
public:
    explicit MultiAgentTransitionSystem(std::vector<AgentTransitionSystem> agents);

    int num_agents() const { return static_cast<int>(agents_.size()); }
    const AgentTransitionSystem& agent(int i) const;

    bool has_joint_state(const JointState& x) const;
    bool has_joint_transition(const JointState& from, const JointState& to) const;

private:
    std::vector<AgentTransitionSystem> agents_;
};

MultiAgentTransitionSystem compose(std::vector<AgentTransitionSystem> agents);

// Finite state sequence x_k ... x_{k+N} addressed by absolute time index.
template <class State>
class BasicTrajectory {
public:
    BasicTrajectory() = default;

    BasicTrajectory(int start_step, std::vector<State> states)
        : start_(start_step), states_(std::move(states)) {
        if (start_ < 0) throw std::invalid_argument("trajectory start step must be >= 0");
        if (states_.empty()) throw std::invalid_argument("trajectory needs at least one state");
    }

    bool empty() const { return states_.empty(); }
    int start_step() const { return start_; }
    int end_step() const { return start_ + length(); }
    // Number of transitions; a single state has length 0.
    int length() const { return static_cast<int>(states_.size()) - 1; }

    bool defined_at(int step) const {
        return !states_.empty() && step >= start_ && step <= end_step();
    }

    const State& at(int step) const {
        if (!defined_at(step)) throw std::out_of_range("trajectory index outside [k, k+N]");
        return states_[static_cast<std::size_t>(step - start_)];
    }

    // tau(step+): the suffix starting at `step`.
    BasicTrajectory suffix(int step) const {
        if (!defined_at(step)) throw std::out_of_range("suffix start outside trajectory");
        return BasicTrajectory(step, std::vector<State>(states_.begin() + (step - start_), states_.end()));
    }

    const std::vector<State>& states() const { return states_; }

    friend bool operator==(const BasicTrajectory& a, const BasicTrajectory& b) {
        return a.start_ == b.start_ && a.states_ == b.states_;
    }

private:
    int start_ = 0;
    std::vector<State> states_;
};

using Trajectory = BasicTrajectory<JointState>;
using AgentTrajectory = BasicTrajectory<StateId>;

// True iff every consecutive pair is a transition. A state outside the state
// set is reported by throwing, not by returning false.
bool validate_trajectory(const AgentTransitionSystem& system, std::span<const StateId> seq);
bool validate_trajectory(const MultiAgentTransitionSystem& system, std::span<const JointState> seq);

inline bool validate_trajectory(const AgentTransitionSystem& system, const AgentTrajectory& traj) {
    return validate_trajectory(system, std::span<const StateId>(traj.states()));
}
inline bool validate_trajectory(const MultiAgentTransitionSystem& system, const Trajectory& traj) {
    return validate_trajectory(system, std::span<const JointState>(traj.states()));
}

// Pi_i(tau): componentwise extraction of agent i's trajectory.
AgentTrajectory project(const Trajectory& traj, int agent_index, int num_agents);
inline AgentTrajectory project(const Trajectory& traj, const MultiAgentTransitionSystem& system,
                               int agent_index) {
    return project(traj, agent_index, system.num_agents());
}

// Recompose per-agent trajectories into a joint trajectory. All inputs must
// share start step and length.
Trajectory compose_trajectories(const std::vector<AgentTrajectory>& parts);

// Append-only record of states actually executed, grown from time 0.
class RealizedTrajectory {
public:
    RealizedTrajectory(std::shared_ptr<const MultiAgentTransitionSystem> system, JointState initial);

    void append(JointState next);  // throws on an invalid transition

    int last_step() const { return static_cast<int>(states_.size()) - 1; }
    const JointState& at(int step) const;
    const std::vector<JointState>& states() const { return states_; }

    Trajectory as_trajectory() const { return Trajectory(0, states_); }

private:
    std::shared_ptr<const MultiAgentTransitionSystem> system_;
    std::vector<JointState> states_;
};

}  // namespace episync

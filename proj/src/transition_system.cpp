#include "episync/transition_system.hpp"

namespace episync {

AgentTransitionSystem::AgentTransitionSystem(int num_states) {
    if (num_states <= 0) throw std::invalid_argument("agent system needs at least one state");
    succ_.resize(static_cast<std::size_t>(num_states));
    pred_.resize(static_cast<std::size_t>(num_states));
    labels_.resize(static_cast<std::size_t>(num_states));
}

void AgentTransitionSystem::check_state(StateId s) const {
    if (!has_state(s)) throw std::out_of_range("state id outside the state set");
}

void AgentTransitionSystem::add_transition(StateId from, StateId to) {
    check_state(from);
    check_state(to);
    auto& out = succ_[static_cast<std::size_t>(from)];
    auto it = std::lower_bound(out.begin(), out.end(), to);
    if (it != out.end() && *it == to) return;  // already present
    out.insert(it, to);
    auto& in = pred_[static_cast<std::size_t>(to)];
    in.insert(std::lower_bound(in.begin(), in.end(), from), from);
}

bool AgentTransitionSystem::has_transition(StateId from, StateId to) const {
    check_state(from);
    check_state(to);
    const auto& out = succ_[static_cast<std::size_t>(from)];
    return std::binary_search(out.begin(), out.end(), to);
}

std::span<const StateId> AgentTransitionSystem::successors(StateId s) const {
    check_state(s);
    return succ_[static_cast<std::size_t>(s)];
}

std::span<const StateId> AgentTransitionSystem::predecessors(StateId s) const {
    check_state(s);
    return pred_[static_cast<std::size_t>(s)];
}

std::size_t AgentTransitionSystem::num_transitions() const {
    std::size_t n = 0;
    for (const auto& out : succ_) n += out.size();
    return n;
}

void AgentTransitionSystem::set_label(StateId s, std::string label) {
    check_state(s);
    labels_[static_cast<std::size_t>(s)] = std::move(label);
}

const std::string& AgentTransitionSystem::label(StateId s) const {
    check_state(s);
    return labels_[static_cast<std::size_t>(s)];
}

MultiAgentTransitionSystem::MultiAgentTransitionSystem(std::vector<AgentTransitionSystem> agents)
    : agents_(std::move(agents)) {
    if (agents_.empty()) throw std::invalid_argument("multi-agent system needs at least one agent");
}

const AgentTransitionSystem& MultiAgentTransitionSystem::agent(int i) const {
    if (i < 0 || i >= num_agents()) throw std::out_of_range("agent index out of range");
    return agents_[static_cast<std::size_t>(i)];
}

bool MultiAgentTransitionSystem::has_joint_state(const JointState& x) const {
    if (static_cast<int>(x.size()) != num_agents()) return false;
    for (int i = 0; i < num_agents(); ++i) {
        if (!agents_[static_cast<std::size_t>(i)].has_state(x[static_cast<std::size_t>(i)])) return false;
    }
    return true;
}

bool MultiAgentTransitionSystem::has_joint_transition(const JointState& from, const JointState& to) const {
    if (static_cast<int>(from.size()) != num_agents() || static_cast<int>(to.size()) != num_agents()) {
        throw std::invalid_argument("joint state arity mismatch");
    }
    for (int i = 0; i < num_agents(); ++i) {
        if (!agents_[static_cast<std::size_t>(i)].has_transition(from[static_cast<std::size_t>(i)],
                                                                to[static_cast<std::size_t>(i)])) {
            return false;
        }
    }
    return true;
}

MultiAgentTransitionSystem compose(std::vector<AgentTransitionSystem> agents) {
    return MultiAgentTransitionSystem(std::move(agents));
}

bool validate_trajectory(const AgentTransitionSystem& system, std::span<const StateId> seq) {
    for (StateId s : seq) {
        if (!system.has_state(s)) throw std::out_of_range("trajectory state outside the state set");
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (!system.has_transition(seq[i], seq[i + 1])) return false;
    }
    return true;
}

bool validate_trajectory(const MultiAgentTransitionSystem& system, std::span<const JointState> seq) {
    for (const JointState& x : seq) {
        if (!system.has_joint_state(x)) throw std::out_of_range("joint state outside the state space");
    }
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
        if (!system.has_joint_transition(seq[i], seq[i + 1])) return false;
    }
    return true;
}

AgentTrajectory project(const Trajectory& traj, int agent_index, int num_agents) {
    if (agent_index < 0 || agent_index >= num_agents) {
        throw std::out_of_range("projection agent index out of range");
    }
    std::vector<StateId> states;
    states.reserve(traj.states().size());
    for (const JointState& x : traj.states()) {
        states.push_back(x.at(static_cast<std::size_t>(agent_index)));
    }
    return AgentTrajectory(traj.start_step(), std::move(states));
}

Trajectory compose_trajectories(const std::vector<AgentTrajectory>& parts) {
    if (parts.empty()) throw std::invalid_argument("no trajectories to compose");
    const int start = parts.front().start_step();
    const int len = parts.front().length();
    for (const auto& p : parts) {
        if (p.start_step() != start || p.length() != len) {
            throw std::invalid_argument("trajectories disagree on start step or length");
        }
    }
    std::vector<JointState> states;
    states.reserve(static_cast<std::size_t>(len) + 1);
    for (int k = start; k <= start + len; ++k) {
        JointState x;
        x.reserve(parts.size());
        for (const auto& p : parts) x.push_back(p.at(k));
        states.push_back(std::move(x));
    }
    return Trajectory(start, std::move(states));
}

RealizedTrajectory::RealizedTrajectory(std::shared_ptr<const MultiAgentTransitionSystem> system,
                                       JointState initial)
    : system_(std::move(system)) {
    if (!system_) throw std::invalid_argument("realized trajectory needs a system");
    if (!system_->has_joint_state(initial)) throw std::out_of_range("initial state outside the state space");
    states_.push_back(std::move(initial));
}

void RealizedTrajectory::append(JointState next) {
    if (!system_->has_joint_state(next)) throw std::out_of_range("appended state outside the state space");
    if (!system_->has_joint_transition(states_.back(), next)) {
        throw std::invalid_argument("appended state is not reachable by a joint transition");
    }
    states_.push_back(std::move(next));
}

const JointState& RealizedTrajectory::at(int step) const {
    if (step < 0 || step > last_step()) throw std::out_of_range("realized trajectory index out of range");
    return states_[static_cast<std::size_t>(step)];
}

}  // namespace episync

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "episync/transition_system.hpp"

namespace episync {

// A state class is a region lifted to joint states: the joint state belongs
// to the class iff some agent's own state lies in that agent's target set.
// Membership is pure; the target sets are fixed at construction.
class StateClass {
public:
    StateClass(std::string label, std::vector<std::vector<StateId>> targets_per_agent);

    const std::string& label() const { return label_; }
    int num_agents() const { return static_cast<int>(targets_.size()); }

    bool contains(const JointState& x) const;
    // Lowest agent index whose component satisfies the class, if any.
    std::optional<int> satisfying_agent(const JointState& x) const;

    const std::vector<StateId>& targets_for(int agent) const;

private:
    std::string label_;
    std::vector<std::vector<StateId>> targets_;  // sorted per agent
};

class TaskSiteAssignment {
public:
    TaskSiteAssignment() = default;
    explicit TaskSiteAssignment(std::vector<StateClass> classes);

    int size() const { return static_cast<int>(classes_.size()); }
    bool empty() const { return classes_.empty(); }
    const std::vector<StateClass>& classes() const { return classes_; }
    const StateClass& at(int j) const { return classes_.at(static_cast<std::size_t>(j)); }

    bool has_label(const std::string& label) const;
    const StateClass* find(const std::string& label) const;

    // Assignment restricted to the classes whose labels are not listed.
    TaskSiteAssignment without(const std::vector<std::string>& labels) const;

private:
    std::vector<StateClass> classes_;  // labels unique, insertion order kept
};

struct TaskUpdate {
    std::vector<std::string> removed;
    std::vector<StateClass> added;

    bool empty() const { return removed.empty() && added.empty(); }
};

// (current \ removed) ∪ added. Removing an unknown label or adding a
// colliding label is an error.
TaskSiteAssignment apply_update(const TaskSiteAssignment& current, const TaskUpdate& update);

// Witness for each satisfied class: (agent index, time step), earliest step
// first, ties across agents broken by lowest agent index.
struct SatisfactionResult {
    bool satisfied = false;
    std::map<std::string, std::pair<int, int>> witness;  // label -> (agent, step)
};

SatisfactionResult satisfies(const Trajectory& traj, const TaskSiteAssignment& assignment);

// Earliest (agent, step) per class, or nullopt for classes never visited.
std::map<std::string, std::optional<std::pair<int, int>>> first_satisfaction_times(
    const Trajectory& traj, const TaskSiteAssignment& assignment);

}  // namespace episync

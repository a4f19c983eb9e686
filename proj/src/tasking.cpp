#include "episync/tasking.hpp"

#include <algorithm>
#include <stdexcept>

namespace episync {

StateClass::StateClass(std::string label, std::vector<std::vector<StateId>> targets_per_agent)
    : label_(std::move(label)), targets_(std::move(targets_per_agent)) {
    if (label_.empty()) throw std::invalid_argument("state class needs a label");
    if (targets_.empty()) throw std::invalid_argument("state class needs per-agent target sets");
    for (auto& t : targets_) {
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
    }
}

bool StateClass::contains(const JointState& x) const {
    return satisfying_agent(x).has_value();
}

std::optional<int> StateClass::satisfying_agent(const JointState& x) const {
    if (static_cast<int>(x.size()) != num_agents()) {
        throw std::invalid_argument("joint state arity does not match the class");
    }
    for (int i = 0; i < num_agents(); ++i) {
        const auto& t = targets_[static_cast<std::size_t>(i)];
        if (std::binary_search(t.begin(), t.end(), x[static_cast<std::size_t>(i)])) return i;
    }
    return std::nullopt;
}

const std::vector<StateId>& StateClass::targets_for(int agent) const {
    return targets_.at(static_cast<std::size_t>(agent));
}

TaskSiteAssignment::TaskSiteAssignment(std::vector<StateClass> classes) : classes_(std::move(classes)) {
    for (std::size_t a = 0; a < classes_.size(); ++a) {
        for (std::size_t b = a + 1; b < classes_.size(); ++b) {
            if (classes_[a].label() == classes_[b].label()) {
                throw std::invalid_argument("duplicate class label: " + classes_[a].label());
            }
        }
    }
}

bool TaskSiteAssignment::has_label(const std::string& label) const { return find(label) != nullptr; }

const StateClass* TaskSiteAssignment::find(const std::string& label) const {
    for (const auto& c : classes_) {
        if (c.label() == label) return &c;
    }
    return nullptr;
}

TaskSiteAssignment TaskSiteAssignment::without(const std::vector<std::string>& labels) const {
    std::vector<StateClass> kept;
    for (const auto& c : classes_) {
        if (std::find(labels.begin(), labels.end(), c.label()) == labels.end()) kept.push_back(c);
    }
    return TaskSiteAssignment(std::move(kept));
}

TaskSiteAssignment apply_update(const TaskSiteAssignment& current, const TaskUpdate& update) {
    for (const auto& label : update.removed) {
        if (!current.has_label(label)) {
            throw std::invalid_argument("cannot remove unknown class label: " + label);
        }
    }
    std::vector<StateClass> next;
    for (const auto& c : current.classes()) {
        if (std::find(update.removed.begin(), update.removed.end(), c.label()) == update.removed.end()) {
            next.push_back(c);
        }
    }
    for (const auto& c : update.added) {
        for (const auto& kept : next) {
            if (kept.label() == c.label()) {
                throw std::invalid_argument("cannot add colliding class label: " + c.label());
            }
        }
        next.push_back(c);
    }
    return TaskSiteAssignment(std::move(next));
}

std::map<std::string, std::optional<std::pair<int, int>>> first_satisfaction_times(
    const Trajectory& traj, const TaskSiteAssignment& assignment) {
    std::map<std::string, std::optional<std::pair<int, int>>> out;
    for (const auto& c : assignment.classes()) out[c.label()] = std::nullopt;
    for (int k = traj.start_step(); k <= traj.end_step(); ++k) {
        const JointState& x = traj.at(k);
        for (const auto& c : assignment.classes()) {
            auto& slot = out[c.label()];
            if (slot.has_value()) continue;
            if (auto agent = c.satisfying_agent(x)) slot = std::make_pair(*agent, k);
        }
    }
    return out;
}

SatisfactionResult satisfies(const Trajectory& traj, const TaskSiteAssignment& assignment) {
    SatisfactionResult res;
    res.satisfied = true;
    for (const auto& [label, hit] : first_satisfaction_times(traj, assignment)) {
        if (hit.has_value()) {
            res.witness[label] = *hit;
        } else {
            res.satisfied = false;
        }
    }
    return res;  // witness stays partial when unsatisfied, useful for diagnostics
}

}  // namespace episync

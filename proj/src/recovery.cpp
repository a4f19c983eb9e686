#include "episync/recovery.hpp"

#include <algorithm>
#include <stdexcept>

namespace episync {

namespace {

std::vector<StateId> sorted_unique(std::vector<StateId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// One exact-length expansion level: all predecessors (or successors) of the
// given level set.
std::vector<StateId> expand(const AgentTransitionSystem& system, const std::vector<StateId>& level,
                            bool backward) {
    std::vector<StateId> next;
    for (StateId s : level) {
        auto nbrs = backward ? system.predecessors(s) : system.successors(s);
        next.insert(next.end(), nbrs.begin(), nbrs.end());
    }
    return sorted_unique(std::move(next));
}

}  // namespace

std::vector<StateId> backward_reach(const ReachQuery& q) {
    if (q.system == nullptr) throw std::invalid_argument("reach query needs a system");
    if (!q.system->has_state(q.target)) throw std::out_of_range("reach target outside the state set");
    if (q.depth < 0) throw std::invalid_argument("reach depth must be >= 0");
    if (q.depth > q.max_depth) throw std::invalid_argument("reach depth exceeds the configured bound");
    std::vector<StateId> level{q.target};
    for (int d = 0; d < q.depth; ++d) level = expand(*q.system, level, /*backward=*/true);
    return level;
}

std::optional<int> min_recovery_steps(const AgentTransitionSystem& system, StateId disturbed,
                                      const AgentTrajectory& eigen, int step, int n_max) {
    if (!system.has_state(disturbed)) throw std::out_of_range("disturbed state outside the state set");
    if (!eigen.defined_at(step)) throw std::invalid_argument("eigen plan undefined at the disturbance step");
    if (eigen.at(step) == disturbed) {
        throw std::invalid_argument("state matches the eigen plan; not a disturbance");
    }
    const int limit = std::min(n_max, eigen.end_step() - step);
    // disturbed in Reach_n(eigen(step+n))  <=>  eigen(step+n) in the forward
    // cone of `disturbed` at exactly n steps.
    std::vector<StateId> cone{disturbed};
    for (int n = 1; n <= limit; ++n) {
        cone = expand(system, cone, /*backward=*/false);
        if (cone.empty()) return std::nullopt;
        if (std::binary_search(cone.begin(), cone.end(), eigen.at(step + n))) return n;
    }
    return std::nullopt;
}

std::optional<int> min_recovery_steps(const AgentTransitionSystem& system, StateId disturbed,
                                      const AgentTrajectory& eigen, int step) {
    return min_recovery_steps(system, disturbed, eigen, step, eigen.end_step() - step);
}

std::optional<AgentTrajectory> recover(const AgentTransitionSystem& system, StateId disturbed,
                                       const AgentTrajectory& eigen, int step) {
    const auto n_star = min_recovery_steps(system, disturbed, eigen, step);
    if (!n_star) return std::nullopt;
    const StateId rejoin = eigen.at(step + *n_star);

    // Backward level sets from the rejoin state guide a greedy lexicographic
    // bridge: at each step take the smallest successor that can still reach
    // the rejoin state in the remaining number of steps.
    std::vector<std::vector<StateId>> levels(static_cast<std::size_t>(*n_star) + 1);
    levels[0] = {rejoin};
    for (int d = 1; d <= *n_star; ++d) {
        levels[static_cast<std::size_t>(d)] =
            expand(system, levels[static_cast<std::size_t>(d - 1)], /*backward=*/true);
    }

    std::vector<StateId> states{disturbed};
    StateId cur = disturbed;
    for (int j = 1; j <= *n_star; ++j) {
        const auto& allowed = levels[static_cast<std::size_t>(*n_star - j)];
        StateId chosen = -1;
        for (StateId s : system.successors(cur)) {
            if (std::binary_search(allowed.begin(), allowed.end(), s)) {
                chosen = s;
                break;  // successors are sorted, first hit is the lex minimum
            }
        }
        if (chosen < 0) throw std::logic_error("bridge synthesis lost the rejoin state");
        states.push_back(chosen);
        cur = chosen;
    }

    for (int k = step + *n_star + 1; k <= eigen.end_step(); ++k) states.push_back(eigen.at(k));
    return AgentTrajectory(step, std::move(states));
}

}  // namespace episync

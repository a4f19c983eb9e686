#include "episync/solver.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "temporal_search.hpp"

namespace episync {

namespace {

using detail::TemporalSearchProblem;
using detail::TemporalSearchResult;
using detail::temporal_search;

struct StepConstraints {
    std::map<int, std::map<int, StateId>> pins_by_step;  // step -> agent -> state
    std::map<int, std::vector<int>> sync_by_step;        // step -> agents
    int last_constraint_step = 0;
};

StepConstraints index_constraints(const SolveRequest& req) {
    StepConstraints sc;
    sc.last_constraint_step = req.start_step;
    for (const auto& p : req.pins) {
        sc.pins_by_step[p.step][p.agent] = p.state;
        sc.last_constraint_step = std::max(sc.last_constraint_step, p.step);
    }
    for (const auto& v : req.sync_visits) {
        sc.sync_by_step[v.step].push_back(v.agent);
        sc.last_constraint_step = std::max(sc.last_constraint_step, v.step);
    }
    return sc;
}

void validate_request(const SolveRequest& req) {
    if (req.system == nullptr || req.sync == nullptr) {
        throw std::invalid_argument("solve request needs a system and sync states");
    }
    const int n = req.system->num_agents();
    if (!req.system->has_joint_state(req.start)) {
        throw std::invalid_argument("solve request start state is not a joint state of the system");
    }
    if (req.assignment.size() > 20) throw std::invalid_argument("at most 20 task classes supported");
    for (const auto& p : req.pins) {
        if (p.agent < 0 || p.agent >= n) throw std::invalid_argument("pin agent out of range");
        if (p.step < req.start_step) throw std::invalid_argument("pin step before the current step");
        if (!req.system->agent(p.agent).has_state(p.state)) {
            throw std::invalid_argument("pin state outside the agent state set");
        }
        if (p.step == req.start_step && req.start[static_cast<std::size_t>(p.agent)] != p.state) {
            throw std::invalid_argument("pin at the start step contradicts the start state");
        }
    }
    for (const auto& v : req.sync_visits) {
        if (v.agent < 0 || v.agent >= n) throw std::invalid_argument("sync visit agent out of range");
        if (v.step <= req.start_step) throw std::invalid_argument("sync visit step must be after the current step");
    }
}

std::uint64_t product_size(const MultiAgentTransitionSystem& system, std::uint64_t cap) {
    std::uint64_t prod = 1;
    for (int i = 0; i < system.num_agents(); ++i) {
        prod *= static_cast<std::uint64_t>(system.agent(i).num_states());
        if (prod > cap) return cap + 1;
    }
    return prod;
}

// ---------------------------------------------------------------------------
// Exact joint search (complete within the horizon on small product spaces).

struct JointCodec {
    std::vector<std::uint64_t> place;  // agent 0 most significant: numeric order == lex order
    const MultiAgentTransitionSystem* system;

    explicit JointCodec(const MultiAgentTransitionSystem& s) : system(&s) {
        const int n = s.num_agents();
        place.assign(static_cast<std::size_t>(n), 1);
        for (int i = n - 2; i >= 0; --i) {
            place[static_cast<std::size_t>(i)] =
                place[static_cast<std::size_t>(i + 1)] *
                static_cast<std::uint64_t>(s.agent(i + 1).num_states());
        }
    }

    std::uint64_t encode(const JointState& x) const {
        std::uint64_t id = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            id += static_cast<std::uint64_t>(x[i]) * place[i];
        }
        return id;
    }

    JointState decode(std::uint64_t id) const {
        const int n = system->num_agents();
        JointState x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] = static_cast<StateId>(id / place[static_cast<std::size_t>(i)]);
            id %= place[static_cast<std::size_t>(i)];
        }
        return x;
    }
};

std::optional<TemporalSearchResult> exact_search(const SolveRequest& req, const StepConstraints& sc) {
    const JointCodec codec(*req.system);
    const int n = req.system->num_agents();

    TemporalSearchProblem p;
    p.start = codec.encode(req.start);
    p.start_step = req.start_step;
    p.max_steps = req.options.horizon;
    p.num_classes = req.assignment.size();
    p.min_end_step = sc.last_constraint_step;
    p.successors = [&, n](std::uint64_t id, std::vector<std::uint64_t>& out) {
        out.clear();
        const JointState x = codec.decode(id);
        // Odometer over per-agent successor lists, agent 0 slowest, which
        // emits encodings in ascending order.
        std::vector<std::span<const StateId>> succ(static_cast<std::size_t>(n));
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
            succ[static_cast<std::size_t>(i)] = req.system->agent(i).successors(x[static_cast<std::size_t>(i)]);
            if (succ[static_cast<std::size_t>(i)].empty()) return;
        }
        while (true) {
            std::uint64_t id2 = 0;
            for (int i = 0; i < n; ++i) {
                id2 += static_cast<std::uint64_t>(succ[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]]) *
                       codec.place[static_cast<std::size_t>(i)];
            }
            out.push_back(id2);
            int i = n - 1;
            while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == succ[static_cast<std::size_t>(i)].size()) {
                idx[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
        }
    };
    p.class_bits = [&](std::uint64_t id) {
        const JointState x = codec.decode(id);
        std::uint32_t bits = 0;
        for (int j = 0; j < req.assignment.size(); ++j) {
            if (req.assignment.at(j).contains(x)) bits |= (1u << j);
        }
        return bits;
    };
    p.admissible = [&](int step, std::uint64_t id) {
        const auto pins_it = sc.pins_by_step.find(step);
        const auto sync_it = sc.sync_by_step.find(step);
        if (pins_it == sc.pins_by_step.end() && sync_it == sc.sync_by_step.end()) return true;
        const JointState x = codec.decode(id);
        if (pins_it != sc.pins_by_step.end()) {
            for (const auto& [agent, state] : pins_it->second) {
                if (x[static_cast<std::size_t>(agent)] != state) return false;
            }
        }
        if (sync_it != sc.sync_by_step.end()) {
            for (int agent : sync_it->second) {
                if (!req.sync->contains(agent, x)) return false;
            }
        }
        return true;
    };

    return temporal_search(p);
}

// ---------------------------------------------------------------------------
// Prioritized per-agent search for product spaces too large to enumerate.

struct AgentRoute {
    std::vector<StateId> path;  // absolute steps start_step .. end_step
    int completion_step = 0;
    int end_step = 0;
};

struct PrioritizedContext {
    const SolveRequest* req = nullptr;
    StepConstraints sc;
    std::vector<int> order;                           // planning order (partner-free first)
    std::vector<std::vector<StateId>> paths;          // per agent, absolute indexing from start_step
    std::vector<std::vector<int>> assigned;           // class indices per agent
    InfeasibleReason fail_reason = InfeasibleReason::task;
    std::string fail_detail;
};

std::optional<StateId> path_state_at(const PrioritizedContext& ctx, int agent, int step) {
    const auto& path = ctx.paths[static_cast<std::size_t>(agent)];
    const int idx = step - ctx.req->start_step;
    if (idx < 0 || idx >= static_cast<int>(path.size())) return std::nullopt;
    return path[static_cast<std::size_t>(idx)];
}

// Own-state set satisfying agent's sync clause at `step`, given already
// planned partner paths. Empty optional means "no constraint" (always-sync).
std::optional<std::vector<StateId>> allowed_sync_states(const PrioritizedContext& ctx, int agent, int step) {
    const AgentSync& spec = ctx.req->sync->spec(agent);
    if (spec.always) return std::nullopt;
    std::vector<StateId> allowed = spec.own_states;
    if (spec.partner >= 0 && spec.partner_sync_states) {
        if (auto partner_state = path_state_at(ctx, spec.partner, step)) {
            auto extra = spec.partner_sync_states(*partner_state);
            allowed.insert(allowed.end(), extra.begin(), extra.end());
            std::sort(allowed.begin(), allowed.end());
            allowed.erase(std::unique(allowed.begin(), allowed.end()), allowed.end());
        }
    }
    return allowed;
}

std::optional<AgentRoute> route_agent(const PrioritizedContext& ctx, int agent,
                                      const std::vector<int>& class_indices) {
    const SolveRequest& req = *ctx.req;
    const AgentTransitionSystem& sys = req.system->agent(agent);

    // Per-step own-state filters for this agent.
    std::map<int, StateId> pins;
    for (const auto& [step, by_agent] : ctx.sc.pins_by_step) {
        auto it = by_agent.find(agent);
        if (it != by_agent.end()) pins[step] = it->second;
    }
    std::map<int, std::vector<StateId>> sync_allowed;
    for (const auto& [step, agents] : ctx.sc.sync_by_step) {
        if (std::find(agents.begin(), agents.end(), agent) == agents.end()) continue;
        if (auto allowed = allowed_sync_states(ctx, agent, step)) {
            sync_allowed[step] = std::move(*allowed);
        }
    }

    TemporalSearchProblem p;
    p.start = static_cast<std::uint64_t>(req.start[static_cast<std::size_t>(agent)]);
    p.start_step = req.start_step;
    p.max_steps = req.options.horizon;
    p.num_classes = static_cast<int>(class_indices.size());
    p.min_end_step = ctx.sc.last_constraint_step;
    p.successors = [&](std::uint64_t id, std::vector<std::uint64_t>& out) {
        out.clear();
        for (StateId s : sys.successors(static_cast<StateId>(id))) {
            out.push_back(static_cast<std::uint64_t>(s));
        }
    };
    p.class_bits = [&](std::uint64_t id) {
        std::uint32_t bits = 0;
        for (std::size_t j = 0; j < class_indices.size(); ++j) {
            const auto& targets = req.assignment.at(class_indices[j]).targets_for(agent);
            if (std::binary_search(targets.begin(), targets.end(), static_cast<StateId>(id))) {
                bits |= (1u << j);
            }
        }
        return bits;
    };
    p.admissible = [&](int step, std::uint64_t id) {
        const StateId s = static_cast<StateId>(id);
        if (auto it = pins.find(step); it != pins.end() && it->second != s) return false;
        if (auto it = sync_allowed.find(step); it != sync_allowed.end()) {
            if (!std::binary_search(it->second.begin(), it->second.end(), s)) return false;
        }
        return true;
    };

    auto res = temporal_search(p);
    if (!res) return std::nullopt;
    AgentRoute route;
    route.path.reserve(res->path.size());
    for (std::uint64_t id : res->path) route.path.push_back(static_cast<StateId>(id));
    route.completion_step = res->completion_step;
    route.end_step = res->end_step;
    return route;
}

bool has_self_loop(const AgentTransitionSystem& sys, StateId s) {
    const auto succ = sys.successors(s);
    return std::find(succ.begin(), succ.end(), s) != succ.end();
}

// Extend a route to `target_end`: hold position when the final state loops on
// itself, otherwise take the lexicographic-minimal valid continuation.
bool extend_route(const PrioritizedContext& ctx, int agent, std::vector<StateId>& path, int target_end) {
    const SolveRequest& req = *ctx.req;
    const int end = req.start_step + static_cast<int>(path.size()) - 1;
    if (end >= target_end) return true;
    const AgentTransitionSystem& sys = req.system->agent(agent);
    if (has_self_loop(sys, path.back())) {
        path.resize(static_cast<std::size_t>(target_end - req.start_step + 1), path.back());
        return true;
    }
    TemporalSearchProblem p;
    p.start = static_cast<std::uint64_t>(path.back());
    p.start_step = end;
    p.max_steps = target_end - end;
    p.num_classes = 0;
    p.min_end_step = target_end;
    p.successors = [&](std::uint64_t id, std::vector<std::uint64_t>& out) {
        out.clear();
        for (StateId s : sys.successors(static_cast<StateId>(id))) {
            out.push_back(static_cast<std::uint64_t>(s));
        }
    };
    auto res = temporal_search(p);
    if (!res) return false;
    for (std::size_t j = 1; j < res->path.size(); ++j) path.push_back(static_cast<StateId>(res->path[j]));
    return true;
}

// Best-effort mission close-out: route the agent onward to a sync state it
// can hold so the finished plan parks it in contact. Skipped when no such
// state is reachable (or the agent is always in contact anyway).
void close_out_route(const PrioritizedContext& ctx, int agent, std::vector<StateId>& path) {
    const SolveRequest& req = *ctx.req;
    const AgentSync& spec = req.sync->spec(agent);
    if (spec.always || spec.own_states.empty()) return;
    const AgentTransitionSystem& sys = req.system->agent(agent);
    auto holdable = [&](StateId s) {
        return std::find(spec.own_states.begin(), spec.own_states.end(), s) != spec.own_states.end() &&
               has_self_loop(sys, s);
    };
    if (holdable(path.back())) return;
    const int end = req.start_step + static_cast<int>(path.size()) - 1;
    const int budget = req.options.horizon - (end - req.start_step);
    if (budget <= 0) return;

    TemporalSearchProblem p;
    p.start = static_cast<std::uint64_t>(path.back());
    p.start_step = end;
    p.max_steps = budget;
    p.num_classes = 1;
    p.successors = [&](std::uint64_t id, std::vector<std::uint64_t>& out) {
        out.clear();
        for (StateId s : sys.successors(static_cast<StateId>(id))) {
            out.push_back(static_cast<std::uint64_t>(s));
        }
    };
    p.class_bits = [&](std::uint64_t id) {
        return holdable(static_cast<StateId>(id)) ? 1u : 0u;
    };
    auto res = temporal_search(p);
    if (!res) return;
    for (std::size_t j = 1; j < res->path.size(); ++j) path.push_back(static_cast<StateId>(res->path[j]));
}

std::optional<Trajectory> prioritized_search(const SolveRequest& req, const StepConstraints& sc,
                                             InfeasibleReason& reason, std::string& detail) {
    const int n = req.system->num_agents();
    PrioritizedContext ctx;
    ctx.req = &req;
    ctx.sc = sc;
    ctx.paths.assign(static_cast<std::size_t>(n), {});
    ctx.assigned.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        if (req.sync->spec(i).partner < 0) ctx.order.push_back(i);
    }
    for (int i = 0; i < n; ++i) {
        if (req.sync->spec(i).partner >= 0) ctx.order.push_back(i);
    }

    // Baseline routes: constraints only, no task classes.
    for (int i : ctx.order) {
        auto route = route_agent(ctx, i, {});
        if (!route) {
            reason = InfeasibleReason::pin;
            detail = "agent " + std::to_string(i) + " cannot honor its pinned/sync schedule";
            return std::nullopt;
        }
        ctx.paths[static_cast<std::size_t>(i)] = std::move(route->path);
    }

    // Greedy earliest-completion task allocation.
    std::vector<int> completion(static_cast<std::size_t>(n), req.start_step);
    for (int j = 0; j < req.assignment.size(); ++j) {
        int best_agent = -1;
        int best_completion = 0;
        AgentRoute best_route;
        for (int i : ctx.order) {
            if (req.assignment.at(j).targets_for(i).empty()) continue;
            auto trial = ctx.assigned[static_cast<std::size_t>(i)];
            trial.push_back(j);
            auto route = route_agent(ctx, i, trial);
            if (!route) continue;
            int cand = route->completion_step;
            for (int other = 0; other < n; ++other) {
                if (other != i) cand = std::max(cand, completion[static_cast<std::size_t>(other)]);
            }
            if (best_agent < 0 || cand < best_completion ||
                (cand == best_completion && i < best_agent)) {
                best_agent = i;
                best_completion = cand;
                best_route = std::move(*route);
            }
        }
        if (best_agent < 0) {
            reason = InfeasibleReason::task;
            detail = "no agent can reach task class " + req.assignment.at(j).label();
            return std::nullopt;
        }
        ctx.assigned[static_cast<std::size_t>(best_agent)].push_back(j);
        ctx.paths[static_cast<std::size_t>(best_agent)] = std::move(best_route.path);
        completion[static_cast<std::size_t>(best_agent)] = best_route.completion_step;
    }

    // Final pass in dependency order with settled partner paths.
    for (int i : ctx.order) {
        auto route = route_agent(ctx, i, ctx.assigned[static_cast<std::size_t>(i)]);
        if (!route) {
            reason = InfeasibleReason::sync_visit;
            detail = "agent " + std::to_string(i) + " lost its route against settled partner paths";
            return std::nullopt;
        }
        ctx.paths[static_cast<std::size_t>(i)] = std::move(route->path);
        completion[static_cast<std::size_t>(i)] = route->completion_step;
    }

    if (req.options.close_at_sync) {
        for (int i : ctx.order) close_out_route(ctx, i, ctx.paths[static_cast<std::size_t>(i)]);
    }

    int end = sc.last_constraint_step;
    for (int i = 0; i < n; ++i) {
        end = std::max(end, req.start_step + static_cast<int>(ctx.paths[static_cast<std::size_t>(i)].size()) - 1);
    }
    if (req.options.close_at_sync) {
        end = std::min(end + std::max(0, req.options.close_idle_steps), req.start_step + req.options.horizon);
    }
    std::vector<AgentTrajectory> parts;
    for (int i = 0; i < n; ++i) {
        auto& path = ctx.paths[static_cast<std::size_t>(i)];
        if (!extend_route(ctx, i, path, end)) {
            reason = InfeasibleReason::horizon;
            detail = "agent " + std::to_string(i) + " cannot idle to the common plan end";
            return std::nullopt;
        }
        parts.emplace_back(req.start_step, path);
    }
    return compose_trajectories(parts);
}

std::optional<Trajectory> solve_impl(const SolveRequest& req, InfeasibleReason& reason, std::string& detail) {
    const StepConstraints sc = index_constraints(req);
    if (product_size(*req.system, req.options.exact_state_limit) <= req.options.exact_state_limit) {
        const JointCodec codec(*req.system);
        auto res = exact_search(req, sc);
        if (!res) {
            reason = InfeasibleReason::horizon;
            detail = "no joint trajectory within the horizon";
            return std::nullopt;
        }
        std::vector<JointState> states;
        states.reserve(res->path.size());
        for (std::uint64_t id : res->path) states.push_back(codec.decode(id));
        return Trajectory(req.start_step, std::move(states));
    }
    return prioritized_search(req, sc, reason, detail);
}

// Attribute an infeasibility to the first violated constraint class by
// progressively relaxing the request.
Infeasible diagnose(const SolveRequest& req, InfeasibleReason reason, std::string detail) {
    InfeasibleReason r = reason;
    std::string d = detail;
    SolveRequest relaxed = req;
    relaxed.sync_visits.clear();
    if (solve_impl(relaxed, r, d)) return {InfeasibleReason::sync_visit, std::move(detail)};
    relaxed.pins.clear();
    if (solve_impl(relaxed, r, d)) return {InfeasibleReason::pin, std::move(detail)};
    relaxed.assignment = TaskSiteAssignment();
    if (solve_impl(relaxed, r, d)) return {InfeasibleReason::task, std::move(detail)};
    return {InfeasibleReason::horizon, std::move(detail)};
}

}  // namespace

const char* to_string(InfeasibleReason r) {
    switch (r) {
        case InfeasibleReason::task: return "task";
        case InfeasibleReason::pin: return "pin";
        case InfeasibleReason::sync_visit: return "sync_visit";
        case InfeasibleReason::horizon: return "horizon";
        case InfeasibleReason::internal: return "internal";
    }
    return "unknown";
}

std::optional<std::string> audit_plan(const SolveRequest& req, const Trajectory& plan) {
    if (plan.start_step() != req.start_step) return "plan does not start at the request step";
    if (plan.at(req.start_step) != req.start) return "plan does not start at the request state";
    if (plan.length() > req.options.horizon) return "plan exceeds the horizon";
    if (!validate_trajectory(*req.system, plan)) return "plan is not a trajectory of the system";
    if (!satisfies(plan, req.assignment).satisfied) return "plan does not satisfy the task assignment";
    for (const auto& p : req.pins) {
        if (!plan.defined_at(p.step)) return "plan undefined at a pinned step";
        if (plan.at(p.step)[static_cast<std::size_t>(p.agent)] != p.state) {
            return "pin violated for agent " + std::to_string(p.agent) + " at step " + std::to_string(p.step);
        }
    }
    for (const auto& v : req.sync_visits) {
        if (!plan.defined_at(v.step)) return "plan undefined at a sync visit step";
        if (!req.sync->contains(v.agent, plan.at(v.step))) {
            return "sync visit violated for agent " + std::to_string(v.agent) + " at step " +
                   std::to_string(v.step);
        }
    }
    return std::nullopt;
}

SolveResult solve(const SolveRequest& req) {
    validate_request(req);
    SolveResult result;
    InfeasibleReason reason = InfeasibleReason::task;
    std::string detail;
    auto plan = solve_impl(req, reason, detail);
    if (!plan) {
        result.error = diagnose(req, reason, std::move(detail));
        return result;
    }
    if (auto violation = audit_plan(req, *plan)) {
        result.error = Infeasible{InfeasibleReason::internal, "audit rejected the plan: " + *violation};
        return result;
    }
    int completion = req.start_step;
    for (const auto& [label, hit] : first_satisfaction_times(*plan, req.assignment)) {
        completion = std::max(completion, hit->second);
    }
    result.completion_step = completion;
    result.plan = std::move(*plan);
    return result;
}

}  // namespace episync

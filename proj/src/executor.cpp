#include "episync/executor.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace episync {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a_states(const Trajectory& traj) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFF;
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::uint64_t>(traj.start_step()));
    for (const auto& x : traj.states()) {
        for (StateId s : x) mix(static_cast<std::uint64_t>(s));
    }
    return h;
}

// Equal plan knowledge from step k onward: same end and same states.
bool equal_from(const AgentTrajectory& a, const AgentTrajectory& b, int k) {
    if (a.end_step() != b.end_step()) return false;
    const int lo = std::max({k, a.start_step(), b.start_step()});
    for (int s = lo; s <= a.end_step(); ++s) {
        if (a.at(s) != b.at(s)) return false;
    }
    return true;
}

// Exact-n recoverability per the backward reachable set definition.
bool exactly_recoverable(const AgentTransitionSystem& system, StateId realized,
                         const AgentTrajectory& eigen_before, int gamma, int n) {
    if (n < 1) return false;
    if (!eigen_before.defined_at(gamma + n)) return false;
    const auto reach = backward_reach({&system, eigen_before.at(gamma + n), n});
    return std::binary_search(reach.begin(), reach.end(), realized);
}

}  // namespace

const char* to_string(AbortReason r) {
    switch (r) {
        case AbortReason::none: return "none";
        case AbortReason::infeasible: return "infeasible";
        case AbortReason::unrecoverable: return "unrecoverable";
        case AbortReason::no_future_sync: return "no_future_sync";
        case AbortReason::timeout: return "timeout";
    }
    return "unknown";
}

EpisodeRunner::EpisodeRunner(EpisodeSpec spec, DisturbanceModel disturbance, ExecOptions options,
                             std::uint64_t seed)
    : spec_(std::move(spec)),
      disturbance_(std::move(disturbance)),
      options_(options),
      rng_(seed),
      current_assignment_(spec_.assignment) {
    if (!spec_.system || !spec_.sync) throw std::invalid_argument("episode spec needs system and sync");
    if (disturbance_.prob < 0.0 || disturbance_.prob > 1.0) {
        throw std::invalid_argument("disturbance probability must be within [0, 1]");
    }
    if (disturbance_.magnitude < 1) throw std::invalid_argument("disturbance magnitude must be >= 1");
    disturb_left_.assign(static_cast<std::size_t>(spec_.system->num_agents()), 0);
}

void EpisodeRunner::add_row(EventKind kind, int agent, nlohmann::json payload) {
    pending_.push_back({kind, agent, std::move(payload)});
}

void EpisodeRunner::flush_rows(int step) {
    std::stable_sort(pending_.begin(), pending_.end(), [](const PendingRow& a, const PendingRow& b) {
        return event_priority(a.kind) < event_priority(b.kind);
    });
    for (auto& row : pending_) result_.trace.add(step, row.kind, row.agent, std::move(row.payload));
    pending_.clear();
}

void EpisodeRunner::terminate_done(int step) {
    result_.satisfied = true;
    result_.task_time = step;
    add_row(EventKind::done, -1, {{"task_time", step}});
    flush_rows(step);
    finished_ = true;
}

void EpisodeRunner::terminate_abort(int step, AbortReason reason, std::string detail) {
    result_.aborted = true;
    result_.abort_reason = reason;
    add_row(EventKind::abort, -1, {{"reason", to_string(reason)}, {"detail", std::move(detail)}});
    flush_rows(step);
    finished_ = true;
}

void EpisodeRunner::scan_satisfaction(int step, const JointState& x) {
    for (const auto& cls : current_assignment_.classes()) {
        if (satisfied_.count(cls.label())) continue;
        if (auto agent = cls.satisfying_agent(x)) {
            satisfied_[cls.label()] = {*agent, step};
            add_row(EventKind::task_satisfied, *agent, {{"label", cls.label()}, {"at_step", step}});
        }
    }
}

StateId EpisodeRunner::draw_random_successor(int agent, StateId from) {
    auto succ = spec_.system->agent(agent).successors(from);
    if (succ.empty()) throw std::logic_error("disturbance draw from a dead-end state");
    return succ[static_cast<std::size_t>(rng_() % succ.size())];
}

bool EpisodeRunner::initialize() {
    if (initialized_) throw std::logic_error("episode already initialized");
    initialized_ = true;
    realized_.emplace(spec_.system, spec_.initial);
    add_row(EventKind::state, -1, {{"x", spec_.initial}});
    scan_satisfaction(0, spec_.initial);

    TaskSiteAssignment remaining = current_assignment_;
    std::vector<std::string> done_labels;
    for (const auto& [label, hit] : satisfied_) done_labels.push_back(label);
    remaining = remaining.without(done_labels);
    if (remaining.empty()) {
        result_.undisturbed_task_time = 0;
        terminate_done(0);
        return false;
    }

    SolveRequest req;
    req.system = spec_.system.get();
    req.sync = spec_.sync.get();
    req.start_step = 0;
    req.start = spec_.initial;
    req.assignment = remaining;
    req.options = options_.solver;
    SolveResult solved = solve(req);
    if (!solved.ok()) {
        terminate_abort(0, AbortReason::infeasible,
                        std::string(to_string(solved.error->reason)) + ": " + solved.error->detail);
        return false;
    }
    result_.undisturbed_task_time = solved.completion_step;
    budget_ = std::max(options_.min_step_budget,
                       options_.step_budget_factor * std::max(1, solved.completion_step));
    beliefs_.emplace(PlanBeliefs::initial(*solved.plan, spec_.system->num_agents()));
    result_.epochs.push_back({0, *solved.plan, remaining, {}, {}});
    add_row(EventKind::plan_revision, -1,
            {{"pins", 0},
             {"sync_visits", 0},
             {"hash", fnv1a_states(*solved.plan)},
             {"completion", solved.completion_step}});
    flush_rows(0);
    return true;
}

bool EpisodeRunner::step() {
    if (!initialized_ || finished_) return false;
    const int k = step_ + 1;
    const int n = spec_.system->num_agents();
    if (k > budget_) {
        terminate_abort(k, AbortReason::timeout, "step budget exhausted");
        return false;
    }

    // Task site update for this step, if scheduled.
    if (auto it = spec_.scheduled_updates.find(k); it != spec_.scheduled_updates.end()) {
        current_assignment_ = apply_update(current_assignment_, it->second);
        std::vector<std::string> added;
        for (const auto& c : it->second.added) added.push_back(c.label());
        add_row(EventKind::task_update, -1, {{"removed", it->second.removed}, {"added", added}});
        assignment_changed_ = true;
        // A class added now may already have been visited (visit semantics).
        for (const auto& c : it->second.added) {
            for (int s = 0; s <= step_ && !satisfied_.count(c.label()); ++s) {
                if (auto agent = c.satisfying_agent(realized_->at(s))) {
                    satisfied_[c.label()] = {*agent, s};
                    add_row(EventKind::task_satisfied, *agent, {{"label", c.label()}, {"at_step", s}});
                }
            }
        }
    }

    // Execute step k: eigen plans realize unless the disturbance model fires.
    const JointState& prev = realized_->at(step_);
    JointState next(static_cast<std::size_t>(n));
    std::vector<StateId> planned(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        AgentTrajectory eigen = beliefs_->eigen(i);
        if (!eigen.defined_at(k)) {
            // Plan exhausted: idle forward so the episode can keep stepping
            // until a sync contact triggers a replan.
            std::vector<StateId> states = eigen.states();
            while (eigen.start_step() + static_cast<int>(states.size()) - 1 < k) {
                StateId cur = states.back();
                auto succ = spec_.system->agent(i).successors(cur);
                if (succ.empty()) {
                    terminate_abort(k, AbortReason::unrecoverable,
                                    "agent " + std::to_string(i) + " is stuck with no transitions");
                    return false;
                }
                StateId pick = succ.front();
                if (std::binary_search(succ.begin(), succ.end(), cur)) pick = cur;  // prefer idling
                states.push_back(pick);
            }
            eigen = AgentTrajectory(eigen.start_step(), std::move(states));
            beliefs_->set_eigen(i, eigen);
        }
        planned[static_cast<std::size_t>(i)] = eigen.at(k);

        StateId real = planned[static_cast<std::size_t>(i)];
        const StateId from = prev[static_cast<std::size_t>(i)];
        bool scripted = false;
        for (const auto& s : disturbance_.script) {
            if (s.agent == i && s.step == k) {
                if (!spec_.system->agent(i).has_transition(from, s.forced)) {
                    throw std::invalid_argument("scripted disturbance is not a valid transition");
                }
                real = s.forced;
                scripted = true;
                break;
            }
        }
        if (!scripted && (disturb_left_[static_cast<std::size_t>(i)] > 0 || disturbance_.prob > 0.0)) {
            bool fire = disturb_left_[static_cast<std::size_t>(i)] > 0;
            if (!fire) {
                const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
                if (u < disturbance_.prob) {
                    fire = true;
                    disturb_left_[static_cast<std::size_t>(i)] = disturbance_.magnitude;
                }
            }
            if (fire) {
                real = draw_random_successor(i, from);
                --disturb_left_[static_cast<std::size_t>(i)];
            }
        }
        next[static_cast<std::size_t>(i)] = real;
    }

    realized_->append(next);
    add_row(EventKind::state, -1, {{"x", next}});

    // Agent-side disturbance handling.
    bool unrecoverable = false;
    std::string unrecoverable_detail;
    for (int i = 0; i < n; ++i) {
        const StateId real = next[static_cast<std::size_t>(i)];
        if (real == planned[static_cast<std::size_t>(i)]) continue;
        const AgentTrajectory eigen_before = beliefs_->eigen(i);
        DisturbanceDetail detail;
        detail.record = {i, k, planned[static_cast<std::size_t>(i)], real, std::nullopt};
        detail.eigen_before = eigen_before;
        auto n_star = min_recovery_steps(spec_.system->agent(i), real, eigen_before, k);
        detail.record.n_star = n_star;
        add_row(EventKind::disturbance, i,
                {{"planned", planned[static_cast<std::size_t>(i)]},
                 {"realized", real},
                 {"n_star", n_star ? nlohmann::json(*n_star) : nlohmann::json()}});
        result_.disturbances.push_back(std::move(detail));
        if (!n_star) {
            // Rejoin-or-abort is the rule for agents out of contact. An agent
            // blown into a sync state talks to the planner this very step, so
            // it drops its stale plan and waits for a fresh one instead.
            if (spec_.sync->contains(i, next)) {
                beliefs_->set_eigen(i, AgentTrajectory(k, {real}));
                continue;
            }
            unrecoverable = true;
            unrecoverable_detail = "agent " + std::to_string(i) + " cannot rejoin its plan";
            continue;
        }
        auto recovered = recover(spec_.system->agent(i), real, eigen_before, k);
        beliefs_->set_eigen(i, *recovered);
        add_row(EventKind::recovery, i, {{"n_star", *n_star}, {"rejoin_step", k + *n_star}});
    }
    if (unrecoverable) {
        terminate_abort(k, AbortReason::unrecoverable, unrecoverable_detail);
        return false;
    }

    scan_satisfaction(k, next);
    TaskSiteAssignment remaining = [&] {
        std::vector<std::string> done_labels;
        for (const auto& [label, hit] : satisfied_) done_labels.push_back(label);
        return current_assignment_.without(done_labels);
    }();
    if (remaining.empty()) {
        terminate_done(k);
        return false;
    }

    // Opportunistic synchronization on the realized joint state.
    std::vector<int> contacts;
    for (int i = 0; i < n; ++i) {
        if (spec_.sync->contains(i, next)) contacts.push_back(i);
    }
    if (!contacts.empty()) {
        add_row(EventKind::sync_event, -1, {{"agents", contacts}});
        for (int i : contacts) {
            if (!equal_from(beliefs_->planner_belief(i), beliefs_->eigen(i), k)) {
                recovery_uploaded_ = true;
            }
            beliefs_->set_planner_belief(i, beliefs_->eigen(i));
        }
        bool need = assignment_changed_ || recovery_uploaded_;
        if (!need) {
            const Trajectory& plan = beliefs_->global_plan();
            need = !plan.defined_at(k) || !satisfies(plan.suffix(k), remaining).satisfied;
        }
        if (need) {
            if (!replan(k, next)) return false;
        }
    }

    beliefs_->set_current_step(k);
    step_ = k;
    flush_rows(k);
    return true;
}

bool EpisodeRunner::replan(int k, const JointState& x_k) {
    const int n = spec_.system->num_agents();
    TaskSiteAssignment remaining = [&] {
        std::vector<std::string> done_labels;
        for (const auto& [label, hit] : satisfied_) done_labels.push_back(label);
        return current_assignment_.without(done_labels);
    }();

    // The planner replans from what it knows: the realized state for synced
    // agents, its belief of the eigen plan for absent ones.
    JointState planner_state(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (spec_.sync->contains(i, x_k)) {
            planner_state[static_cast<std::size_t>(i)] = x_k[static_cast<std::size_t>(i)];
        } else {
            const AgentTrajectory& belief = beliefs_->planner_belief(i);
            if (belief.defined_at(k)) {
                planner_state[static_cast<std::size_t>(i)] = belief.at(k);
            } else if (beliefs_->global_plan().defined_at(k)) {
                planner_state[static_cast<std::size_t>(i)] =
                    beliefs_->global_plan().at(k)[static_cast<std::size_t>(i)];
            } else {
                planner_state[static_cast<std::size_t>(i)] = belief.at(belief.end_step());
            }
        }
    }

    PlannerResult outcome = plan_with_sync_mode(*beliefs_, *spec_.sync, *spec_.system, planner_state, k,
                                                remaining, options_.solver, options_.mode);
    if (outcome.status == PlannerResult::Status::no_future_sync) {
        terminate_abort(k, AbortReason::no_future_sync,
                        "agent " + std::to_string(outcome.no_sync_agent) +
                            " has no sync state left in the old plan");
        return false;
    }
    if (outcome.status == PlannerResult::Status::infeasible) {
        terminate_abort(k, AbortReason::infeasible,
                        std::string(to_string(outcome.error->reason)) + ": " + outcome.error->detail);
        return false;
    }

    // Pinned-prefix audit: the new plan must keep every absent agent on its
    // believed trajectory and keep the promised sync visits.
    const Trajectory& plan = *outcome.plan;
    for (const auto& p : outcome.pins) {
        if (!plan.defined_at(p.step) ||
            plan.at(p.step)[static_cast<std::size_t>(p.agent)] != p.state) {
            ++result_.prefix_violations;
        }
    }
    for (const auto& v : outcome.sync_visits) {
        if (!plan.defined_at(v.step) || !spec_.sync->contains(v.agent, plan.at(v.step))) {
            ++result_.prefix_violations;
        }
    }

    add_row(EventKind::plan_revision, -1,
            {{"pins", outcome.pins.size()},
             {"sync_visits", outcome.sync_visits.size()},
             {"hash", fnv1a_states(plan)},
             {"completion", outcome.completion_step}});
    result_.epochs.push_back({k, plan, remaining, outcome.pins, outcome.sync_visits});
    beliefs_->set_global_plan(plan);

    for (int i = 0; i < n; ++i) {
        if (!spec_.sync->contains(i, x_k)) continue;
        AgentTrajectory proj = project(plan, i, n).suffix(k);
        beliefs_->set_eigen(i, proj);
        beliefs_->set_planner_belief(i, std::move(proj));
    }
    assignment_changed_ = false;
    recovery_uploaded_ = false;
    return true;
}

EpisodeResult EpisodeRunner::take_result() {
    if (!finished_) throw std::logic_error("episode still running");
    result_.realized = realized_ ? realized_->as_trajectory() : Trajectory();
    result_.conditions = check_theorem2_conditions(*spec_.system, *spec_.sync, result_);
    return std::move(result_);
}

EpisodeResult run_episode(const EpisodeSpec& spec, const DisturbanceModel& disturbance,
                          const ExecOptions& options, std::uint64_t seed) {
    EpisodeRunner runner(spec, disturbance, options, seed);
    if (runner.initialize()) {
        while (runner.step()) {
        }
    }
    return runner.take_result();
}

ConditionReport check_theorem2_conditions(const MultiAgentTransitionSystem& system,
                                          const SyncStates& sync, const EpisodeResult& result) {
    ConditionReport report;
    if (result.epochs.empty()) {
        report.c1 = report.c2 = report.c3 = false;
        report.details = "trace has no plan epochs";
        return report;
    }

    for (const auto& e : result.trace.events()) {
        if (e.kind == EventKind::task_update && !e.payload.at("added").empty()) {
            report.c1 = false;
            report.details += "classes added at step " + std::to_string(e.step) + "; ";
        }
    }

    for (std::size_t ei = 0; ei < result.epochs.size(); ++ei) {
        const PlanEpoch& epoch = result.epochs[ei];
        const int epoch_end =
            ei + 1 < result.epochs.size() ? result.epochs[ei + 1].step : INT_MAX;
        if (epoch.assignment.empty()) continue;

        // Next sync step and last in-window task visit per agent, from the
        // epoch's plan.
        int i_max = -1;
        int kprime_max = -1;
        std::vector<std::optional<int>> kstar(static_cast<std::size_t>(system.num_agents()));
        for (int i = 0; i < system.num_agents(); ++i) {
            kstar[static_cast<std::size_t>(i)] = next_sync_step(epoch.plan, sync, i, epoch.step);
            if (!kstar[static_cast<std::size_t>(i)]) continue;
            std::optional<int> kprime;
            for (int t = epoch.step; t <= std::min(*kstar[static_cast<std::size_t>(i)], epoch.plan.end_step());
                 ++t) {
                for (const auto& cls : epoch.assignment.classes()) {
                    if (cls.contains(epoch.plan.at(t))) {
                        kprime = t;
                        break;
                    }
                }
            }
            if (kprime && *kprime > kprime_max) {
                kprime_max = *kprime;
                i_max = i;
            }
        }

        auto in_epoch = [&](int step) { return step > epoch.step && step <= epoch_end; };

        if (i_max < 0) {
            for (const auto& d : result.disturbances) {
                if (in_epoch(d.record.step)) {
                    report.c2 = report.c3 = false;
                    report.details += "epoch " + std::to_string(epoch.step) + " has no certified task window; ";
                    break;
                }
            }
            continue;
        }

        const int ks = *kstar[static_cast<std::size_t>(i_max)];
        for (const auto& d : result.disturbances) {
            if (d.record.agent != i_max || !in_epoch(d.record.step)) continue;
            if (d.record.step <= ks) {
                if (!exactly_recoverable(system.agent(i_max), d.record.realized, d.eigen_before,
                                         d.record.step, ks - d.record.step)) {
                    report.c2 = false;
                    report.details += "disturbance at step " + std::to_string(d.record.step) +
                                      " breaks the sync window of epoch " + std::to_string(epoch.step) + "; ";
                }
            }
            if (d.record.step <= kprime_max) {
                if (!exactly_recoverable(system.agent(i_max), d.record.realized, d.eigen_before,
                                         d.record.step, kprime_max - d.record.step)) {
                    report.c3 = false;
                    report.details += "disturbance at step " + std::to_string(d.record.step) +
                                      " breaks the task window of epoch " + std::to_string(epoch.step) + "; ";
                }
            }
        }
    }
    return report;
}

std::uint64_t derive_seed(std::uint64_t base, int level_index, int episode_index) {
    return splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(level_index) * 0x10001ULL +
                                        static_cast<std::uint64_t>(episode_index) + 1));
}

SweepResult sweep(const EpisodeSpec& spec, const std::vector<double>& levels, int episodes_per_level,
                  const ExecOptions& options, std::uint64_t seed, int jobs, int magnitude) {
    if (levels.empty()) throw std::invalid_argument("sweep needs at least one level");
    if (!std::is_sorted(levels.begin(), levels.end())) {
        throw std::invalid_argument("sweep levels must be sorted ascending");
    }
    if (episodes_per_level <= 0) throw std::invalid_argument("sweep needs episodes per level");

    const int total = static_cast<int>(levels.size()) * episodes_per_level;
    std::vector<SweepRow> rows(static_cast<std::size_t>(total));

    int worker_count = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    worker_count = std::max(1, std::min(worker_count, total));

    std::atomic<int> cursor{0};
    auto work = [&]() {
        while (true) {
            const int idx = cursor.fetch_add(1);
            if (idx >= total) break;
            const int li = idx / episodes_per_level;
            const int epi = idx % episodes_per_level;
            DisturbanceModel model;
            model.prob = levels[static_cast<std::size_t>(li)];
            model.magnitude = magnitude;
            const std::uint64_t ep_seed = derive_seed(seed, li, epi);
            EpisodeResult res = run_episode(spec, model, options, ep_seed);
            SweepRow& row = rows[static_cast<std::size_t>(idx)];
            row.level = levels[static_cast<std::size_t>(li)];
            row.episode = epi;
            row.seed = ep_seed;
            row.satisfied = res.satisfied;
            row.aborted = res.aborted;
            row.task_time = res.task_time;
            row.c1 = res.conditions.c1;
            row.c2 = res.conditions.c2;
            row.c3 = res.conditions.c3;
            row.prefix_violations = res.prefix_violations;
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < worker_count; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    SweepResult out;
    out.rows = std::move(rows);
    for (std::size_t li = 0; li < levels.size(); ++li) {
        SweepAggregate agg;
        agg.level = levels[li];
        double task_sum = 0;
        int task_count = 0;
        for (int epi = 0; epi < episodes_per_level; ++epi) {
            const SweepRow& row = out.rows[li * static_cast<std::size_t>(episodes_per_level) +
                                           static_cast<std::size_t>(epi)];
            ++agg.episodes;
            if (row.satisfied) {
                ++agg.satisfied;
                task_sum += row.task_time;
                ++task_count;
            }
            if (row.aborted) ++agg.aborted;
            if (row.c1 && row.c2 && row.c3) {
                ++agg.condition_pass;
                if (row.satisfied) ++agg.condition_pass_satisfied;
            }
        }
        agg.mean_task_time = task_count > 0 ? task_sum / task_count : -1;
        agg.abort_rate = static_cast<double>(agg.aborted) / agg.episodes;
        agg.condition_pass_frac = static_cast<double>(agg.condition_pass) / agg.episodes;
        out.aggregates.push_back(agg);
    }
    return out;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("spearman needs two equally sized samples");
    }
    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[idx[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double num = 0, da = 0, db = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    if (da == 0 || db == 0) return 0;
    return num / std::sqrt(da * db);
}

}  // namespace episync

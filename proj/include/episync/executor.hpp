#pragma once

#include <map>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "episync/planner.hpp"
#include "episync/recovery.hpp"
#include "episync/solver.hpp"
#include "episync/sync_model.hpp"
#include "episync/tasking.hpp"
#include "episync/trace.hpp"
#include "episync/transition_system.hpp"

namespace episync {

struct ScriptedDisturbance {
    int agent = -1;
    int step = 0;
    StateId forced = 0;  // must be reachable by a valid transition
};

// Disturbances are physical: substituted states are always one valid
// transition away from the previous realized state. `magnitude` forces that
// many consecutive random transitions once a disturbance fires.
struct DisturbanceModel {
    double prob = 0.0;
    int magnitude = 1;
    std::vector<ScriptedDisturbance> script;
};

struct ExecOptions {
    PlanMode mode = PlanMode::alg3;
    SolverOptions solver;
    int step_budget_factor = 5;  // budget = factor * undisturbed task time
    int min_step_budget = 20;
};

struct EpisodeSpec {
    std::shared_ptr<const MultiAgentTransitionSystem> system;
    std::shared_ptr<const SyncStates> sync;
    TaskSiteAssignment assignment;
    JointState initial;
    std::map<int, TaskUpdate> scheduled_updates;  // applied at the given step
};

enum class AbortReason { none, infeasible, unrecoverable, no_future_sync, timeout };

const char* to_string(AbortReason r);

struct PlanEpoch {
    int step = 0;
    Trajectory plan;
    TaskSiteAssignment assignment;  // the (remaining) assignment the plan was solved for
    std::vector<PinConstraint> pins;
    std::vector<SyncVisitConstraint> sync_visits;
};

struct DisturbanceDetail {
    DisturbanceRecord record;
    AgentTrajectory eigen_before;  // the agent's plan when the disturbance hit
};

struct ConditionReport {
    bool c1 = true;  // no task classes added after k
    bool c2 = true;  // disturbances on i_max recoverable within the sync window
    bool c3 = true;  // disturbances on i_max recoverable within the task window
    std::string details;

    bool all() const { return c1 && c2 && c3; }
};

struct EpisodeResult {
    bool satisfied = false;
    bool aborted = false;
    AbortReason abort_reason = AbortReason::none;
    int task_time = -1;             // steps to full satisfaction
    int undisturbed_task_time = -1; // completion step of the initial plan
    Trajectory realized;
    EpisodeTrace trace;
    std::vector<PlanEpoch> epochs;
    std::vector<DisturbanceDetail> disturbances;
    int prefix_violations = 0;      // replans breaking the pinned-prefix contract
    ConditionReport conditions;
};

// Step-wise plan-execute loop: execute eigen plans, inject disturbances,
// recover agent-side, synchronize on the realized state, replan when a sync
// contact carries news.
class EpisodeRunner {
public:
    EpisodeRunner(EpisodeSpec spec, DisturbanceModel disturbance, ExecOptions options, std::uint64_t seed);

    // Solves the initial plan under full synchronization. Returns false when
    // the episode terminated immediately (infeasible, or satisfied at k=0).
    bool initialize();

    // Executes one time step; false once the episode is over.
    bool step();

    bool finished() const { return finished_; }
    int current_step() const { return step_; }

    EpisodeResult take_result();

private:
    struct PendingRow {
        EventKind kind;
        int agent;
        nlohmann::json payload;
    };

    void flush_rows(int step);
    void add_row(EventKind kind, int agent, nlohmann::json payload);
    void terminate_done(int step);
    void terminate_abort(int step, AbortReason reason, std::string detail);
    void scan_satisfaction(int step, const JointState& x);
    bool replan(int k, const JointState& x_k);
    StateId draw_random_successor(int agent, StateId from);

    EpisodeSpec spec_;
    DisturbanceModel disturbance_;
    ExecOptions options_;
    std::mt19937_64 rng_;

    bool initialized_ = false;
    bool finished_ = false;
    int step_ = 0;
    int budget_ = 0;
    std::optional<RealizedTrajectory> realized_;
    std::optional<PlanBeliefs> beliefs_;
    TaskSiteAssignment current_assignment_;
    std::map<std::string, std::pair<int, int>> satisfied_;  // label -> (agent, step)
    std::vector<int> disturb_left_;
    bool assignment_changed_ = false;
    bool recovery_uploaded_ = false;
    std::vector<PendingRow> pending_;

    EpisodeResult result_;
};

EpisodeResult run_episode(const EpisodeSpec& spec, const DisturbanceModel& disturbance,
                          const ExecOptions& options, std::uint64_t seed);

// Retrospective audit of the satisfaction-under-disturbance conditions
// against the recorded plan epochs and disturbances.
ConditionReport check_theorem2_conditions(const MultiAgentTransitionSystem& system,
                                          const SyncStates& sync, const EpisodeResult& result);

// ---------------------------------------------------------------------------
// Disturbance sweep.

struct SweepRow {
    double level = 0;
    int episode = 0;
    std::uint64_t seed = 0;
    bool satisfied = false;
    bool aborted = false;
    int task_time = -1;
    bool c1 = false, c2 = false, c3 = false;
    int prefix_violations = 0;
};

struct SweepAggregate {
    double level = 0;
    int episodes = 0;
    int satisfied = 0;
    int aborted = 0;
    double mean_task_time = -1;  // over completed episodes
    double abort_rate = 0;
    double condition_pass_frac = 0;
    int condition_pass = 0;
    int condition_pass_satisfied = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepAggregate> aggregates;
};

SweepResult sweep(const EpisodeSpec& spec, const std::vector<double>& levels, int episodes_per_level,
                  const ExecOptions& options, std::uint64_t seed, int jobs = 0, int magnitude = 1);

// Deterministic per-episode seed derivation shared by sweep and the CLI.
std::uint64_t derive_seed(std::uint64_t base, int level_index, int episode_index);

// Spearman rank correlation (average ranks on ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace episync

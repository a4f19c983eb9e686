// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Run via ctest (target: acceptance) or directly.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "episync/executor.hpp"
#include "episync/recovery.hpp"
#include "episync/scenario.hpp"
#include "episync/trace.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

using namespace episync;
namespace fs = std::filesystem;

namespace {

int failures = 0;
long long suite_prefix_violations = 0;

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, const char* title, bool pass, const std::string& detail) {
    std::printf("criterion %d (%s): %s — %s\n", criterion, title, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++failures;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --------------------------------------------------------------------------
// 1. Undisturbed completeness: every feasible random desk scenario runs to
//    full satisfaction without disturbances.

void criterion_1() {
    Stopwatch sw;
    std::mt19937_64 rng(101);
    int ok = 0;
    const int total = 200;
    std::string first_failure;
    for (int t = 0; t < total; ++t) {
        const Scenario sc = testing::random_feasible_scenario(rng);
        const EpisodeResult r = run_episode(sc.episode_spec(), {}, {}, rng());
        suite_prefix_violations += r.prefix_violations;
        if (r.satisfied && r.task_time == r.undisturbed_task_time) {
            ++ok;
        } else if (first_failure.empty()) {
            first_failure = "trial " + std::to_string(t) + (r.aborted ? " aborted" : " incomplete");
        }
    }
    const double secs = sw.seconds();
    std::ostringstream d;
    d << ok << "/" << total << " satisfied in " << std::fixed << secs << " s";
    if (!first_failure.empty()) d << "; first failure: " << first_failure;
    report(1, "undisturbed completeness", ok == total && secs < 60.0, d.str());
}

// --------------------------------------------------------------------------
// 2. Condition soundness: whenever the retrospective condition checker passes
//    an episode's trace, that episode ended satisfied.

void criterion_2() {
    Stopwatch sw;
    std::mt19937_64 rng(202);
    const std::vector<double> probs{0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.2};
    const int total = 500;
    int passing = 0;
    int counterexamples = 0;
    std::string dump;
    for (int t = 0; t < total; ++t) {
        const Scenario sc = testing::random_feasible_scenario(rng);
        DisturbanceModel model;
        model.prob = probs[static_cast<std::size_t>(t) % probs.size()];
        const EpisodeResult r = run_episode(sc.episode_spec(), model, {}, rng());
        suite_prefix_violations += r.prefix_violations;
        if (!r.conditions.all()) continue;
        ++passing;
        if (!r.satisfied) {
            ++counterexamples;
            if (dump.empty()) {
                const fs::path out = fs::temp_directory_path() / "episync-acceptance-counterexample.jsonl";
                std::ofstream os(out);
                r.trace.write_jsonl(os);
                dump = out.string();
            }
        }
    }
    const double secs = sw.seconds();
    std::ostringstream d;
    d << passing << "/" << total << " episodes passed the checker, " << counterexamples
      << " of those unsatisfied, " << std::fixed << secs << " s";
    if (!dump.empty()) d << "; trace dumped to " << dump;
    report(2, "condition soundness", counterexamples == 0 && secs < 300.0, d.str());
}

// --------------------------------------------------------------------------
// 3. Recovery boundary fixtures: a disturbance exactly as severe as the
//    remaining window keeps the sync contact / the task deadline; one extra
//    step of severity misses it.

AgentTransitionSystem anchor_system() {
    AgentTransitionSystem sys(1);
    sys.add_transition(0, 0);
    return sys;
}

EpisodeSpec boundary_spec(AgentTransitionSystem worker, std::vector<StateId> worker_sync) {
    EpisodeSpec spec;
    spec.system = std::make_shared<MultiAgentTransitionSystem>(
        compose(std::vector<AgentTransitionSystem>{anchor_system(), std::move(worker)}));
    AgentSync anchor;
    anchor.always = true;
    AgentSync contact;
    contact.own_states = std::move(worker_sync);
    spec.sync = std::make_shared<SyncStates>(std::vector<AgentSync>{anchor, contact});
    spec.assignment = TaskSiteAssignment({StateClass("goal", {{}, {4}})});
    spec.initial = {0, 0};
    return spec;
}

bool sync_contains_worker_at(const EpisodeTrace& trace, int step) {
    for (const TraceEvent& e : trace.events()) {
        if (e.kind != EventKind::sync_event || e.step != step) continue;
        for (int a : e.payload.at("agents")) {
            if (a == 1) return true;
        }
    }
    return false;
}

void criterion_3() {
    bool pass = true;
    std::ostringstream d;
    auto require = [&](bool cond, const char* what) {
        if (!cond) {
            pass = false;
            d << " [" << what << "]";
        }
    };

    // Contact window: corridor 0..4 (self loops), the plan passes the contact
    // state 2 at step 2. A push to 5 at step 1 leaves exactly one step to the
    // contact (5 -> 2); a push to 6 needs two (6 -> 7 -> 2/3).
    {
        AgentTransitionSystem worker(8);
        for (StateId s = 0; s <= 4; ++s) {
            worker.add_transition(s, s);
            if (s < 4) worker.add_transition(s, s + 1);
        }
        worker.add_transition(0, 5);
        worker.add_transition(5, 2);
        worker.add_transition(0, 6);
        worker.add_transition(6, 7);
        worker.add_transition(7, 2);
        worker.add_transition(7, 3);

        const auto in = [](const std::vector<StateId>& v, StateId s) {
            return std::binary_search(v.begin(), v.end(), s);
        };
        require(in(backward_reach({&worker, 2, 1}), 5), "5 one step from the contact");
        require(!in(backward_reach({&worker, 2, 1}), 6), "6 not one step from the contact");
        require(in(backward_reach({&worker, 3, 2}), 6), "6 two steps from the plan");

        const EpisodeSpec spec = boundary_spec(worker, {0, 2});

        DisturbanceModel exact;
        exact.script = {{1, 1, 5}};
        const EpisodeResult r = run_episode(spec, exact, {}, 1);
        suite_prefix_violations += r.prefix_violations;
        require(r.satisfied && r.task_time == 4, "exact-severity run satisfied on schedule");
        require(r.disturbances.size() == 1 && r.disturbances[0].record.n_star == 1,
                "exact severity rejoins in one step");
        require(sync_contains_worker_at(r.trace, 2), "contact kept at step 2");

        DisturbanceModel severe;
        severe.script = {{1, 1, 6}};
        const EpisodeResult s = run_episode(spec, severe, {}, 1);
        suite_prefix_violations += s.prefix_violations;
        require(s.satisfied && s.task_time == 4, "over-severe run still completes");
        require(s.disturbances.size() == 1 && s.disturbances[0].record.n_star == 2,
                "over-severe rejoin takes two steps");
        require(!sync_contains_worker_at(s.trace, 2), "contact at step 2 missed");
    }

    // Task window: the goal state 4 is due at step 4. A push to 5 at step 2
    // is exactly two steps from the goal (5 -> 6 -> 4) and meets the deadline;
    // a push to 8 needs three and cannot rejoin the plan at all.
    {
        AgentTransitionSystem worker(11);
        for (StateId s = 0; s <= 4; ++s) {
            worker.add_transition(s, s);
            if (s < 4) worker.add_transition(s, s + 1);
        }
        worker.add_transition(1, 5);
        worker.add_transition(5, 6);
        worker.add_transition(6, 4);
        worker.add_transition(1, 8);
        worker.add_transition(8, 9);
        worker.add_transition(9, 10);
        worker.add_transition(10, 4);

        const auto in = [](const std::vector<StateId>& v, StateId s) {
            return std::binary_search(v.begin(), v.end(), s);
        };
        require(in(backward_reach({&worker, 4, 2}), 5), "5 two steps from the goal");
        require(!in(backward_reach({&worker, 3, 1}), 5), "5 not one step from the plan");
        require(!in(backward_reach({&worker, 4, 2}), 8), "8 not two steps from the goal");
        require(in(backward_reach({&worker, 4, 3}), 8), "8 three steps from the goal");

        const EpisodeSpec spec = boundary_spec(worker, {0});

        DisturbanceModel exact;
        exact.script = {{1, 2, 5}};
        const EpisodeResult r = run_episode(spec, exact, {}, 1);
        suite_prefix_violations += r.prefix_violations;
        require(r.satisfied && r.task_time == 4, "exact-severity run meets the deadline");
        require(r.disturbances.size() == 1 && r.disturbances[0].record.n_star == 2,
                "exact severity rejoins at the goal step");

        DisturbanceModel severe;
        severe.script = {{1, 2, 8}};
        const EpisodeResult s = run_episode(spec, severe, {}, 1);
        require(!s.satisfied && s.aborted && s.abort_reason == AbortReason::unrecoverable,
                "over-severe disturbance misses the deadline");
        require(s.disturbances.size() == 1 && !s.disturbances[0].record.n_star.has_value(),
                "over-severe disturbance has no rejoin");
    }

    report(3, "recovery boundary fixtures", pass, pass ? "all boundary checks exact" : d.str().substr(1));
}

// --------------------------------------------------------------------------
// 4. Reach-set oracle equivalence against exhaustive walk enumeration.

void criterion_4() {
    Stopwatch sw;
    std::mt19937_64 rng(404);
    int mismatches = 0;
    int checked = 0;
    for (int g = 0; g < 100; ++g) {
        const int n_states = 5 + static_cast<int>(rng() % 46);  // up to 50
        const double edge_prob = 0.04 + 0.10 * std::uniform_real_distribution<double>(0, 1)(rng);
        const AgentTransitionSystem sys = testing::random_digraph(rng, n_states, edge_prob, true);
        for (int t = 0; t < 5; ++t) {
            const StateId target = static_cast<StateId>(rng() % static_cast<std::uint64_t>(n_states));
            for (int n = 0; n <= 4; ++n) {
                ++checked;
                if (backward_reach({&sys, target, n}) != testing::reach_oracle(sys, target, n)) ++mismatches;
            }
        }
    }
    std::ostringstream d;
    d << checked << " queries over 100 digraphs, " << mismatches << " mismatches, " << std::fixed
      << sw.seconds() << " s";
    report(4, "reach-set oracle equivalence", mismatches == 0, d.str());
}

// --------------------------------------------------------------------------
// 6. Disturbance sweep trend + 5. prefix preservation across the whole suite.

ScenarioConfig sweep_config() {
    ScenarioConfig cfg;
    cfg.map.width = 8;
    cfg.map.height = 7;
    cfg.map.cell_m = 60.0;
    const int y = 3;
    for (int x = 0; x < cfg.map.width; ++x) cfg.map.road.push_back({x, y});
    cfg.map.depots["A"] = {0, y};
    cfg.map.depots["B"] = {cfg.map.width - 1, y};
    cfg.energy.uav_quantum_j = 20000.0;
    AgentConfig ugv;
    ugv.type = VehicleType::ugv;
    ugv.start = {0, y};
    ugv.capacity_j = ScenarioConfig::default_capacity(VehicleType::ugv);
    cfg.agents.push_back(ugv);
    for (int k = 0; k < 2; ++k) {
        AgentConfig uav;
        uav.type = VehicleType::uav;
        uav.start = {0, y};
        uav.capacity_j = ScenarioConfig::default_capacity(VehicleType::uav);
        uav.coalition = 0;
        cfg.agents.push_back(uav);
    }
    const int sites[] = {2, 3, 5, 6};
    for (int s = 0; s < 4; ++s) {
        cfg.tasks.push_back({"s" + std::to_string(s), {{sites[s], y}}});
    }
    return cfg;
}

const std::vector<double> kSweepLevels{0, 0.02, 0.05, 0.08, 0.11, 0.14, 0.17, 0.2};
constexpr int kSweepEpisodes = 60;
constexpr int kSweepMagnitude = 2;
constexpr std::uint64_t kSweepSeed = 12345;

void criterion_6() {
    Stopwatch sw;
    const Scenario sc = build_scenario(sweep_config());
    const SweepResult r =
        sweep(sc.episode_spec(), kSweepLevels, kSweepEpisodes, {}, kSweepSeed, 0, kSweepMagnitude);
    for (const SweepRow& row : r.rows) suite_prefix_violations += row.prefix_violations;

    std::vector<double> levels, mean_tt;
    int inversions = 0;
    double prev_abort = -1;
    for (const SweepAggregate& a : r.aggregates) {
        levels.push_back(a.level);
        mean_tt.push_back(a.mean_task_time);
        if (prev_abort >= 0 && a.abort_rate < prev_abort) ++inversions;
        prev_abort = a.abort_rate;
    }
    const double rho = spearman(levels, mean_tt);
    std::ostringstream d;
    d << r.aggregates.size() << " levels x " << kSweepEpisodes << " episodes, spearman(level, mean task time) = "
      << rho << ", abort-rate inversions = " << inversions << ", " << std::fixed << sw.seconds() << " s";
    report(6, "disturbance sweep trend", rho > 0.8 && inversions <= 1, d.str());
}

void criterion_5() {
    std::ostringstream d;
    d << suite_prefix_violations << " replan prefix/contact violations across all suite episodes";
    report(5, "prefix preservation", suite_prefix_violations == 0, d.str());
}

// --------------------------------------------------------------------------
// 7. Determinism: the criterion-6 sweep through the CLI, twice, byte-identical.

void criterion_7() {
    Stopwatch sw;
    const fs::path dir = fs::temp_directory_path() / "episync-acceptance-determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path scn = dir / "scenario.json";
    {
        std::ofstream out(scn);
        out << sweep_config().to_json().dump(2) << "\n";
    }
    std::string levels;
    for (double l : kSweepLevels) {
        if (!levels.empty()) levels += ",";
        std::ostringstream ls;
        ls << l;
        levels += ls.str();
    }
    const std::string common = std::string(EPISYNC_CLI_PATH) + " sweep --scenario " + scn.string() +
                               " --levels " + levels + " --episodes " + std::to_string(kSweepEpisodes) +
                               " --seed " + std::to_string(kSweepSeed) + " --magnitude " +
                               std::to_string(kSweepMagnitude) + " --jobs 2 --out ";
    const int rc1 = std::system((common + (dir / "a").string() + " 2>/dev/null").c_str());
    const int rc2 = std::system((common + (dir / "b").string() + " 2>/dev/null").c_str());
    const bool ran = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0;
    const bool episodes_same = ran && slurp(dir / "a" / "episodes.csv") == slurp(dir / "b" / "episodes.csv");
    const bool aggregate_same = ran && slurp(dir / "a" / "aggregate.csv") == slurp(dir / "b" / "aggregate.csv");
    std::ostringstream d;
    if (!ran) {
        d << "sweep runs exited " << WEXITSTATUS(rc1) << "/" << WEXITSTATUS(rc2);
    } else {
        d << "episodes.csv " << (episodes_same ? "identical" : "DIFFER") << ", aggregate.csv "
          << (aggregate_same ? "identical" : "DIFFER") << ", " << std::fixed << sw.seconds() << " s";
    }
    report(7, "sweep determinism", ran && episodes_same && aggregate_same, d.str());
}

// --------------------------------------------------------------------------
// 8. Energy model spot checks.

void criterion_8() {
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
    bool pass = close(power_ugv(0.0), 374.115) && close(power_uav(0.0), 241.08) &&
                close(power_ugv(1.0), 862.155);

    // capacities defaulted by the config reader when capacity_J is omitted
    nlohmann::json j = desk_default().to_json();
    for (auto& a : j["agents"]) a.erase("capacity_J");
    const ScenarioConfig cfg = ScenarioConfig::from_json(j);
    pass = pass && close(cfg.agents[0].capacity_j, 25.01e6) && close(cfg.agents[1].capacity_j, 287.7e3);

    std::ostringstream d;
    d << "power_ugv(0)=" << power_ugv(0.0) << " W, power_uav(0)=" << power_uav(0.0)
      << " W, power_ugv(1)=" << power_ugv(1.0) << " W, default capacities " << cfg.agents[0].capacity_j
      << " J / " << cfg.agents[1].capacity_j << " J";
    report(8, "energy model spot checks", pass, d.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_6();
    criterion_5();  // needs the episode totals from 1, 2, 3 and 6
    criterion_7();
    criterion_8();
    if (failures == 0) {
        std::printf("acceptance: all 8 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}

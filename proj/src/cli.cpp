#include "episync/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "episync/executor.hpp"
#include "episync/scenario.hpp"
#include "episync/trace.hpp"

namespace episync::cli {

namespace {

bool log_enabled() {
    const char* v = std::getenv("EPISYNC_LOG");
    return v != nullptr && *v != '\0';
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[episync] " << msg << '\n';
}

nlohmann::json load_json(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string(what) + " file not readable: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

PlanMode parse_mode(const std::string& mode) {
    if (mode == "alg1") return PlanMode::alg1;
    if (mode == "alg3") return PlanMode::alg3;
    throw std::runtime_error("mode must be alg1 or alg3, got: " + mode);
}

std::vector<ScriptedDisturbance> load_script(const std::string& path, const Scenario& scenario) {
    std::vector<ScriptedDisturbance> script;
    const nlohmann::json j = load_json(path, "disturbance script");
    if (!j.is_array()) throw std::runtime_error("disturbance script must be a JSON array");
    for (const auto& row : j) {
        ScriptedDisturbance d;
        d.agent = row.at("agent").get<int>();
        d.step = row.at("step").get<int>();
        if (d.agent < 0 || d.agent >= static_cast<int>(scenario.codecs.size())) {
            throw std::runtime_error("disturbance script: agent index out of range");
        }
        const auto& codec = scenario.codecs[static_cast<std::size_t>(d.agent)];
        d.forced = codec.encode(row.at("x").get<int>(), row.at("y").get<int>(), row.at("e").get<int>(),
                                row.value("docked", false));
        script.push_back(d);
    }
    return script;
}

nlohmann::json summary_json(const EpisodeResult& r) {
    return {{"satisfied", r.satisfied},
            {"aborted", r.aborted},
            {"abort_reason", to_string(r.abort_reason)},
            {"task_time", r.task_time},
            {"undisturbed_task_time", r.undisturbed_task_time},
            {"prefix_violations", r.prefix_violations},
            {"conditions",
             {{"c1", r.conditions.c1},
              {"c2", r.conditions.c2},
              {"c3", r.conditions.c3},
              {"details", r.conditions.details}}}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace

int cmd_run(const RunArgs& args) {
    try {
        const Scenario scenario = build_scenario(load_json(args.scenario_file, "scenario"));
        DisturbanceModel model;
        model.prob = args.disturbance_prob;
        model.magnitude = args.disturbance_magnitude;
        if (!args.disturbance_script.empty()) model.script = load_script(args.disturbance_script, scenario);
        ExecOptions options;
        options.mode = parse_mode(args.mode);
        options.solver.horizon = args.horizon;

        log_line("running episode, seed " + std::to_string(args.seed));
        const EpisodeResult result = run_episode(scenario.episode_spec(), model, options, args.seed);

        const std::filesystem::path out(args.out_dir.empty() ? "." : args.out_dir);
        std::filesystem::create_directories(out);
        {
            std::ofstream jsonl(out / "trace.jsonl", std::ios::binary);
            result.trace.write_jsonl(jsonl);
            std::ofstream csv(out / "trace.csv", std::ios::binary);
            result.trace.write_csv(csv);
        }
        write_file(out / "summary.json", summary_json(result).dump(2) + "\n");
        log_line(result.satisfied ? "satisfied at step " + std::to_string(result.task_time)
                                  : "aborted: " + std::string(to_string(result.abort_reason)));
        return result.satisfied ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_sweep(const SweepArgs& args) {
    try {
        if (args.levels.empty()) throw std::runtime_error("sweep needs --levels");
        const Scenario scenario = build_scenario(load_json(args.scenario_file, "scenario"));
        ExecOptions options;
        options.mode = parse_mode(args.mode);
        options.solver.horizon = args.horizon;

        log_line("sweeping " + std::to_string(args.levels.size()) + " levels x " +
                 std::to_string(args.episodes) + " episodes");
        const SweepResult result = sweep(scenario.episode_spec(), args.levels, args.episodes, options,
                                         args.seed, args.jobs, args.magnitude);

        const std::filesystem::path out(args.out_dir.empty() ? "." : args.out_dir);
        std::filesystem::create_directories(out);

        std::ostringstream rows;
        rows << "level,episode,seed,satisfied,aborted,task_time,c1,c2,c3\n";
        for (const SweepRow& r : result.rows) {
            rows << fmt(r.level) << ',' << r.episode << ',' << r.seed << ',' << (r.satisfied ? 1 : 0)
                 << ',' << (r.aborted ? 1 : 0) << ',' << r.task_time << ',' << (r.c1 ? 1 : 0) << ','
                 << (r.c2 ? 1 : 0) << ',' << (r.c3 ? 1 : 0) << '\n';
        }
        write_file(out / "episodes.csv", rows.str());

        std::ostringstream agg;
        agg << "level,episodes,satisfied,aborted,mean_task_time,abort_rate,condition_pass_frac\n";
        for (const SweepAggregate& a : result.aggregates) {
            agg << fmt(a.level) << ',' << a.episodes << ',' << a.satisfied << ',' << a.aborted << ','
                << fmt(a.mean_task_time) << ',' << fmt(a.abort_rate) << ','
                << fmt(a.condition_pass_frac) << '\n';
        }
        write_file(out / "aggregate.csv", agg.str());
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_trace_render(const TraceRenderArgs& args) {
    try {
        const Scenario scenario = build_scenario(load_json(args.scenario_file, "scenario"));
        std::ifstream in(args.trace_file);
        if (!in) throw std::runtime_error("trace file not readable: " + args.trace_file);
        const EpisodeTrace trace = EpisodeTrace::read_jsonl(in);

        std::ostringstream out;
        out << "step,agent,x,y,e,docked,synced,events\n";
        const auto& events = trace.events();
        for (std::size_t idx = 0; idx < events.size(); ++idx) {
            const TraceEvent& e = events[idx];
            if (e.kind != EventKind::state) continue;
            const JointState joint = e.payload.at("x").get<JointState>();
            for (std::size_t i = 0; i < joint.size(); ++i) {
                const int agent = static_cast<int>(i);
                const VehicleAgentState v = scenario.codecs[i].decode(joint[i]);
                std::string tags;
                for (const TraceEvent& other : events) {
                    if (other.step != e.step || other.kind == EventKind::state) continue;
                    bool mine = other.agent == agent;
                    if (other.kind == EventKind::sync_event) {
                        for (int a : other.payload.at("agents").get<std::vector<int>>()) {
                            if (a == agent) mine = true;
                        }
                    }
                    if (!mine) continue;
                    if (!tags.empty()) tags += '|';
                    tags += to_string(other.kind);
                }
                out << e.step << ',' << agent << ',' << v.x << ',' << v.y << ',' << v.energy_level
                    << ',' << (v.docked ? 1 : 0) << ',' << (scenario.sync->contains(agent, joint) ? 1 : 0)
                    << ',' << tags << '\n';
            }
        }
        if (args.out_file.empty()) {
            std::cout << out.str();
        } else {
            std::filesystem::path p(args.out_file);
            if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
            write_file(p, out.str());
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int dispatch(int argc, char** argv) {
    CLI::App app{"multi-agent planning with opportunistic synchronization"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "run one episode and write its trace");
    run->add_option("--scenario", run_args.scenario_file, "scenario config file")->required();
    run->add_option("--seed", run_args.seed, "rng seed");
    run->add_option("--mode", run_args.mode, "replanning mode: alg1 | alg3");
    run->add_option("--disturbance-prob", run_args.disturbance_prob, "per-step per-agent probability");
    run->add_option("--disturbance-magnitude", run_args.disturbance_magnitude,
                    "forced random transitions per firing");
    run->add_option("--disturbance-script", run_args.disturbance_script, "scripted disturbance file");
    run->add_option("--horizon", run_args.horizon, "max plan length");
    run->add_option("--out", run_args.out_dir, "output directory");

    SweepArgs sweep_args;
    CLI::App* sw = app.add_subcommand("sweep", "disturbance sweep over probability levels");
    sw->add_option("--scenario", sweep_args.scenario_file, "scenario config file")->required();
    sw->add_option("--seed", sweep_args.seed, "rng seed");
    sw->add_option("--mode", sweep_args.mode, "replanning mode: alg1 | alg3");
    sw->add_option("--levels", sweep_args.levels, "disturbance levels, ascending")
        ->required()
        ->delimiter(',');
    sw->add_option("--episodes", sweep_args.episodes, "episodes per level");
    sw->add_option("--horizon", sweep_args.horizon, "max plan length");
    sw->add_option("--jobs", sweep_args.jobs, "parallel workers (0 = machine)");
    sw->add_option("--magnitude", sweep_args.magnitude, "forced random transitions per firing");
    sw->add_option("--out", sweep_args.out_dir, "output directory");

    TraceRenderArgs render_args;
    CLI::App* render = app.add_subcommand("trace-render", "flatten a trace to a per-step position table");
    render->add_option("--trace", render_args.trace_file, "trace.jsonl file")->required();
    render->add_option("--scenario", render_args.scenario_file, "scenario config file")->required();
    render->add_option("--out", render_args.out_file, "output csv (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (run->parsed()) return cmd_run(run_args);
    if (sw->parsed()) return cmd_sweep(sweep_args);
    if (render->parsed()) return cmd_trace_render(render_args);
    return 1;
}

}  // namespace episync::cli

#pragma once

#include <string>
#include <vector>

namespace episync::cli {

struct RunArgs {
    std::string scenario_file;
    std::string out_dir;
    std::string mode = "alg3";  // alg1 | alg3
    std::uint64_t seed = 0;
    double disturbance_prob = 0.0;
    int disturbance_magnitude = 1;
    std::string disturbance_script;  // optional JSON file
    int horizon = 200;
};

struct SweepArgs {
    std::string scenario_file;
    std::string out_dir;
    std::string mode = "alg3";
    std::uint64_t seed = 0;
    std::vector<double> levels;
    int episodes = 50;
    int horizon = 200;
    int jobs = 0;  // 0 = machine parallelism
    int magnitude = 1;
};

struct TraceRenderArgs {
    std::string trace_file;
    std::string scenario_file;
    std::string out_file;  // empty = stdout
};

// Exit codes: 0 success/satisfied, 2 aborted episode, 1 usage or config error.
int cmd_run(const RunArgs& args);
int cmd_sweep(const SweepArgs& args);
int cmd_trace_render(const TraceRenderArgs& args);

// Argument parsing + dispatch for the `episync` binary.
int dispatch(int argc, char** argv);

}  // namespace episync::cli

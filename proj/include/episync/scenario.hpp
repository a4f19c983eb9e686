#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "episync/executor.hpp"
#include "episync/sync_model.hpp"
#include "episync/tasking.hpp"
#include "episync/transition_system.hpp"

namespace episync {

inline constexpr const char* kScenarioSchema = "episync-scenario-v1";

struct Cell {
    int x = 0;
    int y = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct GridMap {
    int width = 0;
    int height = 0;
    double cell_m = 60.0;
    std::vector<Cell> road;              // sorted, unique
    std::map<std::string, Cell> depots;  // label -> cell

    bool in_bounds(Cell c) const {
        return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
    }
    bool is_road(Cell c) const;
    bool is_depot(Cell c) const;
    int cell_index(Cell c) const { return c.y * width + c.x; }
};

enum class VehicleType { ugv, uav };

const char* to_string(VehicleType t);

// Decoded agent state [p_x, p_y, e, f].
struct VehicleAgentState {
    VehicleType type = VehicleType::uav;
    int x = 0;
    int y = 0;
    int energy_level = 0;   // quantized
    double energy_j = 0.0;  // energy_level * quantum
    bool docked = false;
};

// Ground vehicle drive power at speed v_g (m/s); throws on negative speed.
double power_ugv(double v_g);
// Aerial vehicle flight power at speed v_a (m/s); throws on negative speed.
double power_uav(double v_a);

struct RechargeSpec {
    double uav_fast_w = 1500.0;  // below the knee
    double uav_slow_w = 400.0;   // above the knee
    double ugv_w = 20000.0;
    double knee_frac = 0.8;
};

struct AgentConfig {
    VehicleType type = VehicleType::uav;
    Cell start;
    double capacity_j = 0.0;  // 0 = default for the type
    int coalition = -1;       // partner UGV agent index (UAVs only)
};

struct EnergyConfig {
    double uav_quantum_j = 1000.0;
    double ugv_quantum_j = 100000.0;
    double dt_s = 60.0;
    RechargeSpec recharge;
};

struct TaskConfig {
    std::string label;
    std::vector<Cell> cells;  // road cells to visit
};

struct ScenarioConfig {
    GridMap map;
    std::vector<AgentConfig> agents;
    EnergyConfig energy;
    std::vector<TaskConfig> tasks;

    static double default_capacity(VehicleType t);  // 25.01 MJ / 287.7 kJ

    static ScenarioConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Bijection between one agent's StateId range and decoded vehicle states.
// UGVs enumerate road cells only; UAVs enumerate every cell with a docking
// flag.
class AgentStateCodec {
public:
    AgentStateCodec() = default;
    AgentStateCodec(VehicleType type, const GridMap& map, int levels, double quantum_j);

    int num_states() const;
    int levels() const { return levels_; }
    VehicleType type() const { return type_; }

    StateId encode(int x, int y, int energy_level, bool docked) const;
    VehicleAgentState decode(StateId s) const;

private:
    VehicleType type_ = VehicleType::uav;
    int width_ = 0;
    int height_ = 0;
    int levels_ = 0;
    double quantum_j_ = 0.0;
    std::vector<Cell> road_;  // UGV only
};

// One built instance: immutable, shareable across parallel episodes.
struct Scenario {
    ScenarioConfig config;
    std::shared_ptr<const MultiAgentTransitionSystem> system;
    std::shared_ptr<const SyncStates> sync;
    TaskSiteAssignment assignment;
    JointState initial;
    std::vector<AgentStateCodec> codecs;

    EpisodeSpec episode_spec() const { return {system, sync, assignment, initial, {}}; }
};

Scenario build_scenario(const ScenarioConfig& config);
Scenario build_scenario(const nlohmann::json& config_json);

// Small two-depot corridor instance with 1 UGV and 2 UAVs; the documented
// schema example and the seed for randomized instances in the test suite.
ScenarioConfig desk_default();

}  // namespace episync

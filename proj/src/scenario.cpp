#include "episync/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace episync {

namespace {

int ceil_quanta(double joules, double quantum) {
    return static_cast<int>(std::ceil(joules / quantum - 1e-9));
}

int floor_quanta(double joules, double quantum) {
    return static_cast<int>(std::floor(joules / quantum + 1e-9));
}

Cell cell_from_json(const nlohmann::json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw std::invalid_argument("scenario config: " + key + " must be an [x, y] integer pair");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

nlohmann::json cell_to_json(Cell c) { return nlohmann::json::array({c.x, c.y}); }

}  // namespace

bool GridMap::is_road(Cell c) const { return std::binary_search(road.begin(), road.end(), c); }

bool GridMap::is_depot(Cell c) const {
    for (const auto& [label, cell] : depots) {
        if (cell == c) return true;
    }
    return false;
}

const char* to_string(VehicleType t) { return t == VehicleType::ugv ? "ugv" : "uav"; }

double power_ugv(double v_g) {
    if (v_g < 0) throw std::invalid_argument("ground speed must be nonnegative");
    return 1.05 * (464.8 * v_g + 356.3);
}

double power_uav(double v_a) {
    if (v_a < 0) throw std::invalid_argument("air speed must be nonnegative");
    return 1.05 * (0.0461 * v_a * v_a * v_a - 0.5834 * v_a * v_a - 1.8761 * v_a + 229.6);
}

double ScenarioConfig::default_capacity(VehicleType t) {
    return t == VehicleType::ugv ? 25.01e6 : 287.7e3;
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
    if (!j.contains("schema") || j["schema"] != kScenarioSchema) {
        throw std::invalid_argument(std::string("scenario config: schema must be ") + kScenarioSchema);
    }
    ScenarioConfig cfg;

    if (!j.contains("map") || !j["map"].is_object()) {
        throw std::invalid_argument("scenario config: map section missing");
    }
    const auto& jm = j["map"];
    if (!jm.contains("width") || !jm.contains("height")) {
        throw std::invalid_argument("scenario config: map.width and map.height are required");
    }
    cfg.map.width = jm["width"].get<int>();
    cfg.map.height = jm["height"].get<int>();
    if (cfg.map.width <= 0 || cfg.map.height <= 0) {
        throw std::invalid_argument("scenario config: map.width/map.height must be positive");
    }
    cfg.map.cell_m = jm.value("cell_m", 60.0);
    if (cfg.map.cell_m <= 0) throw std::invalid_argument("scenario config: map.cell_m must be positive");
    if (!jm.contains("road") || !jm["road"].is_array() || jm["road"].empty()) {
        throw std::invalid_argument("scenario config: map.road must be a nonempty cell list");
    }
    for (const auto& rc : jm["road"]) {
        Cell c = cell_from_json(rc, "map.road[]");
        if (!cfg.map.in_bounds(c)) throw std::invalid_argument("scenario config: map.road cell out of bounds");
        cfg.map.road.push_back(c);
    }
    std::sort(cfg.map.road.begin(), cfg.map.road.end());
    cfg.map.road.erase(std::unique(cfg.map.road.begin(), cfg.map.road.end()), cfg.map.road.end());
    if (!jm.contains("depots") || !jm["depots"].is_object() || jm["depots"].empty()) {
        throw std::invalid_argument("scenario config: map.depots must be a nonempty label->cell object");
    }
    for (auto it = jm["depots"].begin(); it != jm["depots"].end(); ++it) {
        Cell c = cell_from_json(it.value(), "map.depots." + it.key());
        if (!cfg.map.in_bounds(c)) {
            throw std::invalid_argument("scenario config: map.depots." + it.key() + " out of bounds");
        }
        cfg.map.depots[it.key()] = c;
    }

    if (!j.contains("agents") || !j["agents"].is_array() || j["agents"].empty()) {
        throw std::invalid_argument("scenario config: agents must be a nonempty list");
    }
    for (const auto& ja : j["agents"]) {
        AgentConfig a;
        const std::string type = ja.value("type", std::string());
        if (type == "ugv") a.type = VehicleType::ugv;
        else if (type == "uav") a.type = VehicleType::uav;
        else throw std::invalid_argument("scenario config: agents[].type must be \"ugv\" or \"uav\"");
        if (!ja.contains("start")) throw std::invalid_argument("scenario config: agents[].start is required");
        a.start = cell_from_json(ja["start"], "agents[].start");
        if (!cfg.map.in_bounds(a.start)) {
            throw std::invalid_argument("scenario config: agents[].start out of bounds");
        }
        a.capacity_j = ja.value("capacity_J", 0.0);
        if (a.capacity_j == 0.0) a.capacity_j = default_capacity(a.type);
        if (a.capacity_j <= 0) throw std::invalid_argument("scenario config: agents[].capacity_J must be positive");
        a.coalition = ja.value("coalition", -1);
        cfg.agents.push_back(a);
    }
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
        const AgentConfig& a = cfg.agents[i];
        if (a.type == VehicleType::ugv) {
            if (!cfg.map.is_road(a.start)) {
                throw std::invalid_argument("scenario config: agents[" + std::to_string(i) +
                                            "].start must be on the road for a ugv");
            }
            if (a.coalition >= 0) {
                throw std::invalid_argument("scenario config: agents[].coalition applies to uavs only");
            }
        } else if (a.coalition >= 0) {
            if (a.coalition >= static_cast<int>(cfg.agents.size()) ||
                cfg.agents[static_cast<std::size_t>(a.coalition)].type != VehicleType::ugv) {
                throw std::invalid_argument("scenario config: agents[" + std::to_string(i) +
                                            "].coalition must index a ugv agent");
            }
        }
    }

    if (j.contains("energy")) {
        const auto& je = j["energy"];
        cfg.energy.uav_quantum_j = je.value("uav_quantum_J", cfg.energy.uav_quantum_j);
        cfg.energy.ugv_quantum_j = je.value("ugv_quantum_J", cfg.energy.ugv_quantum_j);
        cfg.energy.dt_s = je.value("dt_s", cfg.energy.dt_s);
        if (cfg.energy.uav_quantum_j <= 0 || cfg.energy.ugv_quantum_j <= 0 || cfg.energy.dt_s <= 0) {
            throw std::invalid_argument("scenario config: energy quanta and dt_s must be positive");
        }
        if (je.contains("recharge")) {
            const auto& jr = je["recharge"];
            cfg.energy.recharge.uav_fast_w = jr.value("uav_fast_W", cfg.energy.recharge.uav_fast_w);
            cfg.energy.recharge.uav_slow_w = jr.value("uav_slow_W", cfg.energy.recharge.uav_slow_w);
            cfg.energy.recharge.ugv_w = jr.value("ugv_W", cfg.energy.recharge.ugv_w);
            cfg.energy.recharge.knee_frac = jr.value("knee_frac", cfg.energy.recharge.knee_frac);
            if (cfg.energy.recharge.knee_frac <= 0 || cfg.energy.recharge.knee_frac > 1) {
                throw std::invalid_argument("scenario config: energy.recharge.knee_frac must be in (0, 1]");
            }
        }
    }

    if (!j.contains("tasks") || !j["tasks"].is_array() || j["tasks"].empty()) {
        throw std::invalid_argument("scenario config: tasks must be a nonempty list");
    }
    for (const auto& jt : j["tasks"]) {
        TaskConfig t;
        t.label = jt.value("label", std::string());
        if (t.label.empty()) throw std::invalid_argument("scenario config: tasks[].label is required");
        if (!jt.contains("cells") || !jt["cells"].is_array() || jt["cells"].empty()) {
            throw std::invalid_argument("scenario config: tasks[].cells must be a nonempty cell list");
        }
        for (const auto& jc : jt["cells"]) {
            Cell c = cell_from_json(jc, "tasks[].cells[]");
            if (!cfg.map.is_road(c)) {
                throw std::invalid_argument("scenario config: tasks[].cells must be road cells (task " +
                                            t.label + ")");
            }
            t.cells.push_back(c);
        }
        cfg.tasks.push_back(std::move(t));
    }
    return cfg;
}

nlohmann::json ScenarioConfig::to_json() const {
    nlohmann::json j;
    j["schema"] = kScenarioSchema;
    j["map"]["width"] = map.width;
    j["map"]["height"] = map.height;
    j["map"]["cell_m"] = map.cell_m;
    j["map"]["road"] = nlohmann::json::array();
    for (Cell c : map.road) j["map"]["road"].push_back(cell_to_json(c));
    j["map"]["depots"] = nlohmann::json::object();
    for (const auto& [label, cell] : map.depots) j["map"]["depots"][label] = cell_to_json(cell);
    j["agents"] = nlohmann::json::array();
    for (const AgentConfig& a : agents) {
        nlohmann::json ja{{"type", to_string(a.type)}, {"start", cell_to_json(a.start)},
                          {"capacity_J", a.capacity_j}};
        if (a.coalition >= 0) ja["coalition"] = a.coalition;
        j["agents"].push_back(std::move(ja));
    }
    j["energy"] = {{"uav_quantum_J", energy.uav_quantum_j},
                   {"ugv_quantum_J", energy.ugv_quantum_j},
                   {"dt_s", energy.dt_s},
                   {"recharge",
                    {{"uav_fast_W", energy.recharge.uav_fast_w},
                     {"uav_slow_W", energy.recharge.uav_slow_w},
                     {"ugv_W", energy.recharge.ugv_w},
                     {"knee_frac", energy.recharge.knee_frac}}}};
    j["tasks"] = nlohmann::json::array();
    for (const TaskConfig& t : tasks) {
        nlohmann::json jt{{"label", t.label}, {"cells", nlohmann::json::array()}};
        for (Cell c : t.cells) jt["cells"].push_back(cell_to_json(c));
        j["tasks"].push_back(std::move(jt));
    }
    return j;
}

AgentStateCodec::AgentStateCodec(VehicleType type, const GridMap& map, int levels, double quantum_j)
    : type_(type), width_(map.width), height_(map.height), levels_(levels), quantum_j_(quantum_j) {
    if (type_ == VehicleType::ugv) road_ = map.road;
}

int AgentStateCodec::num_states() const {
    if (type_ == VehicleType::ugv) return static_cast<int>(road_.size()) * (levels_ + 1);
    return width_ * height_ * (levels_ + 1) * 2;
}

StateId AgentStateCodec::encode(int x, int y, int energy_level, bool docked) const {
    if (energy_level < 0 || energy_level > levels_) throw std::out_of_range("energy level out of range");
    if (type_ == VehicleType::ugv) {
        auto it = std::lower_bound(road_.begin(), road_.end(), Cell{x, y});
        if (it == road_.end() || !(*it == Cell{x, y})) throw std::out_of_range("ugv cell is not on the road");
        return static_cast<StateId>((it - road_.begin()) * (levels_ + 1) + energy_level);
    }
    if (x < 0 || x >= width_ || y < 0 || y >= height_) throw std::out_of_range("cell out of bounds");
    return static_cast<StateId>(((y * width_ + x) * (levels_ + 1) + energy_level) * 2 + (docked ? 1 : 0));
}

VehicleAgentState AgentStateCodec::decode(StateId s) const {
    if (s < 0 || s >= num_states()) throw std::out_of_range("state id out of range");
    VehicleAgentState v;
    v.type = type_;
    if (type_ == VehicleType::ugv) {
        const Cell c = road_[static_cast<std::size_t>(s / (levels_ + 1))];
        v.x = c.x;
        v.y = c.y;
        v.energy_level = s % (levels_ + 1);
        v.docked = false;
    } else {
        v.docked = (s % 2) == 1;
        const int rest = s / 2;
        v.energy_level = rest % (levels_ + 1);
        const int cell = rest / (levels_ + 1);
        v.x = cell % width_;
        v.y = cell / width_;
    }
    v.energy_j = v.energy_level * quantum_j_;
    return v;
}

namespace {

struct AgentCosts {
    int levels = 0;
    int move = 0;
    int stay = 0;       // flying hover / ugv idle
    int fast_gain = 0;  // per docked step below the knee (uav)
    int slow_gain = 0;
    int ugv_gain = 0;
    int knee_level = 0;
};

AgentCosts costs_for(const AgentConfig& agent, const ScenarioConfig& cfg) {
    AgentCosts c;
    const double dt = cfg.energy.dt_s;
    const double v = cfg.map.cell_m / dt;
    if (agent.type == VehicleType::ugv) {
        const double q = cfg.energy.ugv_quantum_j;
        c.levels = floor_quanta(agent.capacity_j, q);
        c.move = ceil_quanta(power_ugv(v) * dt, q);
        c.stay = ceil_quanta(power_ugv(0.0) * dt, q);
        c.ugv_gain = floor_quanta(cfg.energy.recharge.ugv_w * dt, q);
    } else {
        const double q = cfg.energy.uav_quantum_j;
        c.levels = floor_quanta(agent.capacity_j, q);
        c.move = ceil_quanta(power_uav(v) * dt, q);
        c.stay = ceil_quanta(power_uav(0.0) * dt, q);
        c.fast_gain = floor_quanta(cfg.energy.recharge.uav_fast_w * dt, q);
        c.slow_gain = floor_quanta(cfg.energy.recharge.uav_slow_w * dt, q);
        c.knee_level = ceil_quanta(cfg.energy.recharge.knee_frac * agent.capacity_j, q);
    }
    if (c.levels < 1) throw std::invalid_argument("scenario config: capacity below one energy quantum");
    return c;
}

const std::array<Cell, 4> kNeighborOffsets = {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}};

AgentTransitionSystem build_ugv_system(const GridMap& map, const AgentStateCodec& codec,
                                       const AgentCosts& costs) {
    AgentTransitionSystem sys(codec.num_states());
    for (StateId s = 0; s < codec.num_states(); ++s) {
        const VehicleAgentState v = codec.decode(s);
        const Cell here{v.x, v.y};
        for (Cell d : kNeighborOffsets) {
            const Cell to{here.x + d.x, here.y + d.y};
            if (!map.in_bounds(to) || !map.is_road(to)) continue;
            if (v.energy_level >= costs.move) {
                sys.add_transition(s, codec.encode(to.x, to.y, v.energy_level - costs.move, false));
            }
        }
        if (map.is_depot(here)) {
            // stationed at a depot: recharging idle
            const int e2 = std::min(costs.levels, v.energy_level + costs.ugv_gain);
            sys.add_transition(s, codec.encode(here.x, here.y, e2, false));
        } else if (v.energy_level >= costs.stay) {
            sys.add_transition(s, codec.encode(here.x, here.y, v.energy_level - costs.stay, false));
        }
    }
    return sys;
}

AgentTransitionSystem build_uav_system(const GridMap& map, const AgentStateCodec& codec,
                                       const AgentCosts& costs) {
    AgentTransitionSystem sys(codec.num_states());
    for (StateId s = 0; s < codec.num_states(); ++s) {
        const VehicleAgentState v = codec.decode(s);
        const Cell here{v.x, v.y};
        if (!v.docked) {
            for (Cell d : kNeighborOffsets) {
                const Cell to{here.x + d.x, here.y + d.y};
                if (!map.in_bounds(to)) continue;
                if (v.energy_level >= costs.move) {
                    sys.add_transition(s, codec.encode(to.x, to.y, v.energy_level - costs.move, false));
                }
            }
            if (v.energy_level >= costs.stay) {
                sys.add_transition(s, codec.encode(here.x, here.y, v.energy_level - costs.stay, false));
                // landing is possible at depots and on the road (rendezvous)
                if (map.is_depot(here) || map.is_road(here)) {
                    sys.add_transition(s, codec.encode(here.x, here.y, v.energy_level - costs.stay, true));
                }
            }
        } else {
            sys.add_transition(s, codec.encode(here.x, here.y, v.energy_level, false));  // take off
            int e2 = v.energy_level;
            if (map.is_depot(here)) {
                const int gain = v.energy_level < costs.knee_level ? costs.fast_gain : costs.slow_gain;
                e2 = std::min(costs.levels, v.energy_level + gain);
            }
            sys.add_transition(s, codec.encode(here.x, here.y, e2, true));
        }
    }
    return sys;
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
    Scenario out;
    out.config = config;
    const int n = static_cast<int>(config.agents.size());

    std::vector<AgentCosts> costs;
    std::vector<AgentTransitionSystem> systems;
    for (int i = 0; i < n; ++i) {
        const AgentConfig& a = config.agents[static_cast<std::size_t>(i)];
        costs.push_back(costs_for(a, config));
        const double q = a.type == VehicleType::ugv ? config.energy.ugv_quantum_j
                                                    : config.energy.uav_quantum_j;
        out.codecs.emplace_back(a.type, config.map, costs.back().levels, q);
        systems.push_back(a.type == VehicleType::ugv
                              ? build_ugv_system(config.map, out.codecs.back(), costs.back())
                              : build_uav_system(config.map, out.codecs.back(), costs.back()));
    }
    out.system = std::make_shared<MultiAgentTransitionSystem>(compose(std::move(systems)));

    // Sync structure: UGVs are always connected; a UAV synchronizes docked at
    // a depot, or docked at the current cell of its coalition UGV.
    std::vector<AgentSync> sync_specs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const AgentConfig& a = config.agents[static_cast<std::size_t>(i)];
        AgentSync& s = sync_specs[static_cast<std::size_t>(i)];
        if (a.type == VehicleType::ugv) {
            s.always = true;
            continue;
        }
        const AgentStateCodec codec = out.codecs[static_cast<std::size_t>(i)];
        for (const auto& [label, cell] : config.map.depots) {
            for (int e = 0; e <= codec.levels(); ++e) {
                s.own_states.push_back(codec.encode(cell.x, cell.y, e, true));
            }
        }
        if (a.coalition >= 0) {
            s.partner = a.coalition;
            const AgentStateCodec partner_codec = out.codecs[static_cast<std::size_t>(a.coalition)];
            s.pair_pred = [codec, partner_codec](StateId own, StateId partner_state) {
                const VehicleAgentState v = codec.decode(own);
                if (!v.docked) return false;
                const VehicleAgentState p = partner_codec.decode(partner_state);
                return v.x == p.x && v.y == p.y;
            };
            s.partner_sync_states = [codec, partner_codec](StateId partner_state) {
                const VehicleAgentState p = partner_codec.decode(partner_state);
                std::vector<StateId> own;
                for (int e = 0; e <= codec.levels(); ++e) {
                    own.push_back(codec.encode(p.x, p.y, e, true));
                }
                return own;
            };
        }
    }
    out.sync = std::make_shared<SyncStates>(std::move(sync_specs));

    // Task classes: any agent occupying one of the listed road cells, at any
    // energy and docking status, satisfies the class.
    std::vector<StateClass> classes;
    for (const TaskConfig& t : config.tasks) {
        std::vector<std::vector<StateId>> targets(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            const AgentStateCodec& codec = out.codecs[static_cast<std::size_t>(i)];
            for (Cell c : t.cells) {
                for (int e = 0; e <= codec.levels(); ++e) {
                    if (codec.type() == VehicleType::ugv) {
                        targets[static_cast<std::size_t>(i)].push_back(codec.encode(c.x, c.y, e, false));
                    } else {
                        targets[static_cast<std::size_t>(i)].push_back(codec.encode(c.x, c.y, e, false));
                        targets[static_cast<std::size_t>(i)].push_back(codec.encode(c.x, c.y, e, true));
                    }
                }
            }
        }
        classes.emplace_back(t.label, std::move(targets));
    }
    out.assignment = TaskSiteAssignment(std::move(classes));

    out.initial.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const AgentConfig& a = config.agents[static_cast<std::size_t>(i)];
        const AgentStateCodec& codec = out.codecs[static_cast<std::size_t>(i)];
        const bool docked = a.type == VehicleType::uav && config.map.is_depot(a.start);
        out.initial[static_cast<std::size_t>(i)] =
            codec.encode(a.start.x, a.start.y, codec.levels(), docked);
    }
    return out;
}

Scenario build_scenario(const nlohmann::json& config_json) {
    return build_scenario(ScenarioConfig::from_json(config_json));
}

ScenarioConfig desk_default() {
    ScenarioConfig cfg;
    cfg.map.width = 5;
    cfg.map.height = 5;
    cfg.map.cell_m = 60.0;
    for (int x = 0; x < 5; ++x) cfg.map.road.push_back({x, 2});
    std::sort(cfg.map.road.begin(), cfg.map.road.end());
    cfg.map.depots["A"] = {0, 2};
    cfg.map.depots["B"] = {4, 2};
    cfg.energy.uav_quantum_j = 20000.0;   // coarse desk-scale quantum
    cfg.energy.ugv_quantum_j = 100000.0;
    cfg.energy.dt_s = 60.0;

    AgentConfig ugv;
    ugv.type = VehicleType::ugv;
    ugv.start = {0, 2};
    ugv.capacity_j = ScenarioConfig::default_capacity(VehicleType::ugv);
    cfg.agents.push_back(ugv);
    for (int k = 0; k < 2; ++k) {
        AgentConfig uav;
        uav.type = VehicleType::uav;
        uav.start = {0, 2};
        uav.capacity_j = ScenarioConfig::default_capacity(VehicleType::uav);
        uav.coalition = 0;
        cfg.agents.push_back(uav);
    }

    cfg.tasks.push_back({"site-1", {{2, 2}}});
    cfg.tasks.push_back({"site-2", {{3, 2}}});
    return cfg;
}

}  // namespace episync

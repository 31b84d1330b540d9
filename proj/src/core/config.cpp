#include "crowdgame/core/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace crowdgame {

using nlohmann::json;

namespace {

Vec2 vec2_from(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError(what + " must be a [x, y] number array");
    }
    return Vec2(j[0].get<double>(), j[1].get<double>());
}

json vec2_to(const Vec2& v) { return json::array({v.x(), v.y()}); }

Eigen::MatrixXd pair_matrix_from(const json& j, int m, const std::string& what) {
    if (j.is_number()) {
        return Eigen::MatrixXd::Constant(m, m, j.get<double>());
    }
    if (j.is_array()) {
        if (static_cast<int>(j.size()) != m) {
            throw ConfigError(what + " must be a scalar or an MxM array (M=" + std::to_string(m) + ")");
        }
        Eigen::MatrixXd out(m, m);
        for (int r = 0; r < m; ++r) {
            if (!j[r].is_array() || static_cast<int>(j[r].size()) != m) {
                throw ConfigError(what + " row " + std::to_string(r) + " must have M entries");
            }
            for (int c = 0; c < m; ++c) out(r, c) = j[r][c].get<double>();
        }
        return out;
    }
    throw ConfigError(what + " must be a scalar or an MxM array");
}

json pair_matrix_to(const Eigen::MatrixXd& m) {
    // Collapse a uniform matrix back to its scalar form.
    bool uniform = true;
    const double v0 = m.size() > 0 ? m(0, m.cols() > 1 ? 1 : 0) : 0.0;
    for (Eigen::Index i = 0; i < m.rows() && uniform; ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i != j && m(i, j) != v0) { uniform = false; break; }
        }
    }
    if (uniform) return json(v0);
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

CostParams params_from(const json& j, int num_robots) {
    CostParams p = CostParams::defaults(num_robots);
    read_if(j, "H", p.H);
    read_if(j, "L", p.L);
    read_if(j, "tau", p.tau);
    read_if(j, "v_max", p.v_max);
    read_if(j, "a_max", p.a_max);
    read_if(j, "d_min", p.d_min);
    read_if(j, "rho", p.rho);
    read_if(j, "mu", p.mu);
    read_if(j, "delta_norm", p.delta_norm);
    read_if(j, "delta_goal", p.delta_goal);
    read_if(j, "omega_goal", p.omega_goal);
    read_if(j, "omega_acce", p.omega_acce);
    read_if(j, "omega_jerk", p.omega_jerk);
    read_if(j, "omega_coll_human", p.omega_coll_human);
    read_if(j, "omega_vel", p.omega_vel);
    if (j.contains("omega_coll_robot")) {
        p.omega_coll_robot = pair_matrix_from(j.at("omega_coll_robot"), num_robots, "omega_coll_robot");
    }
    if (j.contains("omega_floc")) {
        p.omega_floc = pair_matrix_from(j.at("omega_floc"), num_robots, "omega_floc");
    }
    if (j.contains("d_flock")) {
        p.d_flock = pair_matrix_from(j.at("d_flock"), num_robots, "d_flock");
    }
    read_if(j, "j_max", p.j_max);
    read_if(j, "xi", p.xi);
    read_if(j, "epsilon", p.epsilon);
    read_if(j, "T_max", p.t_max);
    return p;
}

json params_to(const CostParams& p) {
    json j;
    j["H"] = p.H;
    j["L"] = p.L;
    j["tau"] = p.tau;
    j["v_max"] = p.v_max;
    j["a_max"] = p.a_max;
    j["d_min"] = p.d_min;
    j["rho"] = p.rho;
    j["mu"] = p.mu;
    j["delta_norm"] = p.delta_norm;
    j["delta_goal"] = p.delta_goal;
    j["omega_goal"] = p.omega_goal;
    j["omega_acce"] = p.omega_acce;
    j["omega_jerk"] = p.omega_jerk;
    j["omega_coll_human"] = p.omega_coll_human;
    j["omega_vel"] = p.omega_vel;
    j["omega_coll_robot"] = pair_matrix_to(p.omega_coll_robot);
    j["omega_floc"] = pair_matrix_to(p.omega_floc);
    j["d_flock"] = pair_matrix_to(p.d_flock);
    j["j_max"] = p.j_max;
    j["xi"] = p.xi;
    j["epsilon"] = p.epsilon;
    j["T_max"] = p.t_max;
    return j;
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    Config c;
    if (j.contains("layout")) c.scenario.layout = layout_from_name(j.at("layout").get<std::string>());
    if (j.contains("seed")) c.scenario.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("robots")) {
        for (const auto& r : j.at("robots")) {
            RobotSpec spec;
            spec.position = vec2_from(r.at("position"), "robot position");
            if (r.contains("velocity")) spec.velocity = vec2_from(r.at("velocity"), "robot velocity");
            spec.goal = vec2_from(r.at("goal"), "robot goal");
            c.scenario.robots.push_back(spec);
        }
    }
    if (j.contains("humans")) {
        for (const auto& h : j.at("humans")) {
            HumanSpec spec;
            spec.position = vec2_from(h.at("position"), "human position");
            spec.goal = vec2_from(h.at("goal"), "human goal");
            read_if(h, "radius", spec.radius);
            read_if(h, "preferred_speed", spec.preferred_speed);
            c.scenario.humans.push_back(spec);
        }
    }

    c.num_robots = c.scenario.num_robots();
    c.num_humans = c.scenario.num_humans();
    read_if(j, "num_robots", c.num_robots);
    read_if(j, "num_humans", c.num_humans);
    if (!c.scenario.robots.empty() && c.num_robots != c.scenario.num_robots()) {
        throw ConfigError("num_robots contradicts the explicit robots list");
    }
    if (!c.scenario.humans.empty() && c.num_humans != c.scenario.num_humans()) {
        throw ConfigError("num_humans contradicts the explicit humans list");
    }
    if (c.scenario.layout == Layout::Custom && c.scenario.robots.empty()) {
        throw ConfigError("custom layout requires an explicit robots list");
    }

    const json params_json = j.contains("params") ? j.at("params") : json::object();
    try {
        c.params = params_from(params_json, c.num_robots);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad params block: ") + e.what());
    }

    const auto violations = validate_params(c.params);
    if (!violations.empty()) {
        std::ostringstream oss;
        oss << "invalid params:";
        for (const auto& v : violations) oss << "\n  - " << v;
        throw ConfigError(oss.str());
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const Config& config) {
    json j;
    j["params"] = params_to(config.params);
    j["layout"] = layout_name(config.scenario.layout);
    j["seed"] = config.scenario.seed;
    json robots = json::array();
    for (const auto& r : config.scenario.robots) {
        robots.push_back({{"position", vec2_to(r.position)},
                          {"velocity", vec2_to(r.velocity)},
                          {"goal", vec2_to(r.goal)}});
    }
    j["robots"] = robots;
    json humans = json::array();
    for (const auto& h : config.scenario.humans) {
        humans.push_back({{"position", vec2_to(h.position)},
                          {"goal", vec2_to(h.goal)},
                          {"radius", h.radius},
                          {"preferred_speed", h.preferred_speed}});
    }
    j["humans"] = humans;
    if (config.scenario.robots.empty()) j["num_robots"] = config.num_robots;
    if (config.scenario.humans.empty()) j["num_humans"] = config.num_humans;
    return j.dump(2) + "\n";
}

void save_config(const Config& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file '" + path + "'");
    out << config_to_json(config);
}

}  // namespace crowdgame

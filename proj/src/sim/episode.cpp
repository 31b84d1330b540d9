#include "crowdgame/sim/episode.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "crowdgame/dynamics/dynamics.hpp"

namespace crowdgame {

using nlohmann::json;

std::vector<Vec2> World::positions_slice() const {
    std::vector<Vec2> slice;
    slice.reserve(robots.size() + humans.size());
    for (const auto& r : robots) slice.push_back(r.position);
    for (const auto& h : humans) slice.push_back(h.position);
    return slice;
}

World make_world(const Scenario& scenario, const CostParams& params) {
    World world;
    world.history = PositionHistory(params.L, scenario.num_agents());
    for (const auto& spec : scenario.robots) {
        world.robots.push_back(RobotState{spec.position, spec.velocity});
        world.robot_goals.push_back(spec.goal);
        world.robot_u_prev.push_back(Vec2::Zero());
    }
    for (const auto& spec : scenario.humans) {
        OrcaAgent agent;
        agent.position = spec.position;
        agent.goal = spec.goal;
        agent.radius = spec.radius;
        agent.preferred_speed = spec.preferred_speed;
        agent.max_speed = 1.5 * spec.preferred_speed;
        world.humans.push_back(agent);
    }
    const auto initial = world.positions_slice();
    for (int k = 0; k < params.L; ++k) world.history.push(initial);
    return world;
}

StepRecord snapshot(const World& world, int ibr_iterations) {
    StepRecord rec;
    rec.time = world.time;
    rec.ibr_iterations = ibr_iterations;
    for (const auto& r : world.robots) {
        rec.robot_pos.push_back(r.position);
        rec.robot_vel.push_back(r.velocity);
    }
    for (const auto& h : world.humans) {
        rec.human_pos.push_back(h.position);
        rec.human_vel.push_back(h.velocity);
    }
    for (const auto& rp : rec.robot_pos) {
        for (const auto& hp : rec.human_pos) {
            rec.min_robot_human_distance =
                std::min(rec.min_robot_human_distance, (rp - hp).norm());
        }
    }
    return rec;
}

StepRecord step_episode(World& world, const std::vector<Control>& robot_controls,
                        double tau, int ibr_iterations) {
    if (robot_controls.size() != world.robots.size()) {
        throw std::invalid_argument("step_episode: one control per robot required");
    }

    std::vector<OrcaObstacle> robot_obstacles;
    robot_obstacles.reserve(world.robots.size());
    for (const auto& r : world.robots) {
        robot_obstacles.push_back(OrcaObstacle{r.position, r.velocity, kRobotObstacleRadius});
    }
    const std::vector<Vec2> human_velocities =
        world.humans.empty() ? std::vector<Vec2>{}
                             : orca_step(world.humans, robot_obstacles, tau);

    for (std::size_t i = 0; i < world.robots.size(); ++i) {
        world.robots[i] = dynamics_step(world.robots[i], robot_controls[i], tau);
        world.robot_u_prev[i] = robot_controls[i];
    }
    for (std::size_t h = 0; h < world.humans.size(); ++h) {
        world.humans[h].velocity = human_velocities[h];
        world.humans[h].position += tau * human_velocities[h];
    }
    world.time += tau;
    world.history.push(world.positions_slice());
    return snapshot(world, ibr_iterations);
}

std::string method_name(Method m) { return m == Method::Cmpc ? "cmpc" : "dmpc"; }

Method method_from_name(const std::string& name) {
    if (name == "cmpc") return Method::Cmpc;
    if (name == "dmpc") return Method::Dmpc;
    throw std::invalid_argument("unknown method '" + name + "' (expected cmpc or dmpc)");
}

namespace {

JointStrategy shift_warm_start(const JointStrategy& joint) {
    JointStrategy shifted = joint;
    for (auto& strat : shifted.per_robot) {
        if (strat.controls.empty()) continue;
        strat.controls.erase(strat.controls.begin());
        strat.controls.push_back(strat.controls.empty() ? Vec2::Zero() : strat.controls.back());
    }
    return shifted;
}

}  // namespace

SimRecord run_episode(const Scenario& scenario, const CostParams& params,
                      const Predictor& predictor, const EpisodeOptions& options) {
    World world = make_world(scenario, params);

    SimRecord record;
    record.tau = params.tau;
    record.num_robots = scenario.num_robots();
    record.robot_goals = world.robot_goals;
    for (const auto& h : scenario.humans) {
        record.human_goals.push_back(h.goal);
        record.human_radii.push_back(h.radius);
    }
    record.steps.push_back(snapshot(world, 0));

    const int num_robots = scenario.num_robots();
    std::vector<bool> arrived(static_cast<std::size_t>(num_robots), false);
    auto update_arrivals = [&]() {
        bool all = true;
        for (int i = 0; i < num_robots; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            if (!arrived[iu] &&
                (world.robots[iu].position - world.robot_goals[iu]).norm() <= kGoalArrivalRadius) {
                arrived[iu] = true;
            }
            all = all && arrived[iu];
        }
        return all;
    };

    bool done = num_robots > 0 ? update_arrivals() : false;
    JointStrategy warm = JointStrategy::zeros(num_robots, params.H);
    const int max_steps = static_cast<int>(std::floor(params.t_max / params.tau + 1e-9));

    for (int step = 0; step < max_steps && !done; ++step) {
        std::vector<Control> controls;
        int ibr_iterations = 0;
        if (num_robots > 0) {
            std::vector<LocalContext> contexts;
            contexts.reserve(static_cast<std::size_t>(num_robots));
            for (int i = 0; i < num_robots; ++i) {
                const auto iu = static_cast<std::size_t>(i);
                contexts.push_back(
                    LocalContext{world.robots[iu], world.robot_goals[iu], world.robot_u_prev[iu]});
            }

            JointStrategy plan;
            if (options.method == Method::Cmpc) {
                CmpcResult result =
                    solve_cmpc(contexts, world.history, predictor, params, warm, options.cmpc);
                plan = std::move(result.strategy);
                ibr_iterations = static_cast<int>(result.trace.size());
            } else {
                DmpcResult result =
                    options.dmpc_solver
                        ? options.dmpc_solver(contexts, world.history, predictor, params, warm)
                        : solve_dmpc(contexts, world.history, predictor, params, warm,
                                     options.dmpc);
                plan = std::move(result.strategy);
                ibr_iterations = static_cast<int>(result.trace.size());
            }

            controls.reserve(static_cast<std::size_t>(num_robots));
            for (const auto& strat : plan.per_robot) controls.push_back(strat.controls.front());
            warm = shift_warm_start(plan);
        }

        record.steps.push_back(step_episode(world, controls, params.tau, ibr_iterations));
        if (num_robots > 0) done = update_arrivals();
    }
    return record;
}

namespace {

json positions_json(const std::vector<Vec2>& v) {
    json out = json::array();
    for (const auto& p : v) out.push_back(json::array({p.x(), p.y()}));
    return out;
}

std::vector<Vec2> positions_parse(const json& j) {
    std::vector<Vec2> out;
    out.reserve(j.size());
    for (const auto& p : j) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

}  // namespace

void write_trajectory_log(const SimRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trajectory log '" + path + "'");

    json header;
    header["type"] = "header";
    header["tau"] = record.tau;
    header["num_robots"] = record.num_robots;
    header["robot_goals"] = positions_json(record.robot_goals);
    header["human_goals"] = positions_json(record.human_goals);
    header["human_radii"] = record.human_radii;
    out << header.dump() << "\n";

    for (const auto& step : record.steps) {
        json row;
        row["type"] = "step";
        row["t"] = step.time;
        row["robot_pos"] = positions_json(step.robot_pos);
        row["robot_vel"] = positions_json(step.robot_vel);
        row["human_pos"] = positions_json(step.human_pos);
        row["human_vel"] = positions_json(step.human_vel);
        row["ibr"] = step.ibr_iterations;
        out << row.dump() << "\n";
    }
}

SimRecord read_trajectory_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory log '" + path + "'");

    SimRecord record;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        const std::string type = j.at("type").get<std::string>();
        if (type == "header") {
            record.tau = j.at("tau").get<double>();
            record.num_robots = j.at("num_robots").get<int>();
            record.robot_goals = positions_parse(j.at("robot_goals"));
            record.human_goals = positions_parse(j.at("human_goals"));
            record.human_radii = j.at("human_radii").get<std::vector<double>>();
            have_header = true;
        } else if (type == "step") {
            StepRecord step;
            step.time = j.at("t").get<double>();
            step.robot_pos = positions_parse(j.at("robot_pos"));
            step.robot_vel = positions_parse(j.at("robot_vel"));
            step.human_pos = positions_parse(j.at("human_pos"));
            step.human_vel = positions_parse(j.at("human_vel"));
            step.ibr_iterations = j.at("ibr").get<int>();
            for (const auto& rp : step.robot_pos) {
                for (const auto& hp : step.human_pos) {
                    step.min_robot_human_distance =
                        std::min(step.min_robot_human_distance, (rp - hp).norm());
                }
            }
            record.steps.push_back(std::move(step));
        }
    }
    if (!have_header) throw std::runtime_error("trajectory log '" + path + "' has no header line");
    return record;
}

}  // namespace crowdgame

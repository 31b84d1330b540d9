#ifndef CROWDGAME_SIM_EPISODE_HPP
#define CROWDGAME_SIM_EPISODE_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "crowdgame/cmpc/cmpc.hpp"
#include "crowdgame/core/types.hpp"
#include "crowdgame/dmpc/dmpc.hpp"
#include "crowdgame/predictor/predictor.hpp"
#include "crowdgame/sim/orca.hpp"

namespace crowdgame {

/// Robots count as arrived inside this goal disc [m].
inline constexpr double kGoalArrivalRadius = 0.3;

/// Radius robots present to the pedestrians' avoidance [m] (d_min / 2).
inline constexpr double kRobotObstacleRadius = 0.4;

/// Mutable simulation state of one episode.
struct World {
    std::vector<RobotState> robots;
    std::vector<Vec2> robot_goals;
    std::vector<Vec2> robot_u_prev;
    std::vector<OrcaAgent> humans;
    PositionHistory history;
    double time = 0.0;

    World() : history(0, 0) {}
    std::vector<Vec2> positions_slice() const;
};

/// Initial world; the history window starts filled with the initial
/// positions.
World make_world(const Scenario& scenario, const CostParams& params);

/// One per-step row of the episode log.
struct StepRecord {
    double time = 0.0;
    std::vector<Vec2> robot_pos;
    std::vector<Vec2> robot_vel;
    std::vector<Vec2> human_pos;
    std::vector<Vec2> human_vel;
    double min_robot_human_distance = std::numeric_limits<double>::infinity();
    int ibr_iterations = 0;
};

/// Full per-step log of one episode; input to all evaluation metrics.
struct SimRecord {
    double tau = 0.0;
    int num_robots = 0;
    std::vector<Vec2> robot_goals;
    std::vector<Vec2> human_goals;
    std::vector<double> human_radii;
    std::vector<StepRecord> steps;  // steps[0] is the initial state
};

StepRecord snapshot(const World& world, int ibr_iterations);

/// Advances every agent by one sampling period: robots follow the given
/// accelerations exactly, pedestrians follow their avoidance velocities,
/// and the observation window slides forward.
StepRecord step_episode(World& world, const std::vector<Control>& robot_controls,
                        double tau, int ibr_iterations = 0);

enum class Method { Cmpc, Dmpc };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct EpisodeOptions {
    Method method = Method::Cmpc;
    CmpcOptions cmpc;
    DmpcOptions dmpc;
    /// Replaces the in-process best-response solver for DMPC episodes
    /// (used to run the protocol over TCP).
    std::function<DmpcResult(const std::vector<LocalContext>&, const PositionHistory&,
                             const Predictor&, const CostParams&, const JointStrategy&)>
        dmpc_solver;
};

/// Runs one full receding-horizon episode: each control step re-solves
/// the game, applies the first control of every robot, and steps the
/// crowd. Stops once every robot has entered its goal disc or the time
/// limit is reached.
SimRecord run_episode(const Scenario& scenario, const CostParams& params,
                      const Predictor& predictor, const EpisodeOptions& options = {});

/// Line-delimited JSON trajectory log (one header line, one line per step).
void write_trajectory_log(const SimRecord& record, const std::string& path);
SimRecord read_trajectory_log(const std::string& path);

}  // namespace crowdgame

#endif  // CROWDGAME_SIM_EPISODE_HPP

#ifndef CROWDGAME_OBJECTIVES_OBJECTIVES_HPP
#define CROWDGAME_OBJECTIVES_OBJECTIVES_HPP

#include <span>
#include <vector>

#include <Eigen/Core>

#include "crowdgame/core/types.hpp"
#include "crowdgame/predictor/predictor.hpp"

namespace crowdgame {

/// Straight-line reference: each step advances by at most tau*v_max along
/// the fixed direction from `start` to `goal`, clamping at the goal.
/// If start == goal the reference is H copies of the goal.
std::vector<Vec2> make_reference(const Vec2& start, const Vec2& goal, int horizon,
                                 double tau, double v_max);

/// Sum of squared tracking errors, normalized by the current distance to
/// the goal (plus delta_goal, which keeps the cost finite at the goal).
double j_goal(std::span<const Vec2> traj, std::span<const Vec2> reference,
              const Vec2& current_position, const Vec2& goal, double delta_goal);

double j_acce(const Strategy& strat);

/// Sum of squared control differences; u_prev is the control applied in
/// the previous MPC step (zero at episode start).
double j_jerk(const Strategy& strat, const Vec2& u_prev);

/// Speed-dependent human clearance constraint value; <= 0 means safe.
double g_human(const RobotState& x, const Vec2& s_human, double d_min, double rho);

/// Inter-robot clearance constraint value; <= 0 means safe.
double g_robot(const Vec2& s_i, const Vec2& s_j, double d_min);

/// Smoothed max penalty (1/mu)*log(exp(mu*z) + 1), evaluated without
/// overflow for large |mu*z|. Always strictly greater than max(z, 0).
double smax(double z, double mu);

/// d smax / d z, the logistic sigmoid of mu*z.
double smax_slope(double z, double mu);

/// Horizon positions and velocities of one robot (steps t+1..t+H).
struct HorizonStates {
    std::vector<Vec2> pos;
    std::vector<Vec2> vel;
};

HorizonStates rollout_states(const RobotState& x_t, const Strategy& strat, double tau);

/// Smoothed-max penalty summed over the horizon against one predicted
/// human track; uses the robot velocity at the same step.
double j_coll_human(const HorizonStates& traj_i, std::span<const Vec2> human_track,
                    double d_min, double rho, double mu);

double j_coll_robot(std::span<const Vec2> pos_i, std::span<const Vec2> pos_j,
                    double d_min, double mu);

/// Flocking distance-keeping cost with the delta-smoothed norm.
double j_floc(std::span<const Vec2> pos_i, std::span<const Vec2> pos_j, double d_desired,
              double delta_norm);

/// Soft per-axis speed-bound penalty summed over the horizon.
double j_vel(std::span<const Vec2> vel_i, double v_max, double mu);

/// Unweighted cost features plus their weighted total.
struct CostBreakdown {
    double goal = 0.0;
    double acce = 0.0;
    double jerk = 0.0;
    double coll_human = 0.0;
    double coll_robot = 0.0;
    double floc = 0.0;
    double vel = 0.0;
    double total = 0.0;
};

/// Everything needed to evaluate one robot's costs at time t.
struct LocalContext {
    RobotState state;
    Vec2 goal{0.0, 0.0};
    Vec2 u_prev{0.0, 0.0};
};

/// Shared evaluation context for a full game step: per-robot contexts and
/// the frozen crowd prediction.
struct GameContext {
    std::vector<LocalContext> robots;
    PredictedCrowd pred;

    int num_robots() const { return static_cast<int>(robots.size()); }
};

/// Individual objective of one robot (goal, acceleration, jerk, human
/// collision and speed-bound terms). Shared fields stay zero.
CostBreakdown individual_cost(const Strategy& strat, const LocalContext& ctx,
                              const PredictedCrowd& pred, const CostParams& params);

/// Pairwise shared objective between robots i and j, evaluated on their
/// horizon positions. Exactly symmetric under (i,a) <-> (j,b) when the
/// pairwise parameter matrices are symmetric.
double shared_cost(int i, int j, std::span<const Vec2> pos_i, std::span<const Vec2> pos_j,
                   const CostParams& params);

/// Robot i's cumulative game cost: individual total plus the shared
/// objective against every other robot, evaluated with the other robots'
/// horizon positions frozen.
double local_player_cost(int i, const Strategy& strat, const LocalContext& ctx,
                         const std::vector<std::vector<Vec2>>& robot_positions,
                         const PredictedCrowd& pred, const CostParams& params);

/// Gradient of local_player_cost with respect to robot i's stacked
/// controls (2H vector).
Eigen::VectorXd grad_local_player_cost(int i, const Strategy& strat, const LocalContext& ctx,
                                       const std::vector<std::vector<Vec2>>& robot_positions,
                                       const PredictedCrowd& pred, const CostParams& params,
                                       double tau);

double player_cost(int i, const JointStrategy& joint, const GameContext& ctx,
                   const CostParams& params);

Eigen::VectorXd grad_player_cost(int i, const JointStrategy& joint, const GameContext& ctx,
                                 const CostParams& params);

/// Exact potential of the multi-robot game: the sum of all individual
/// objectives plus every unordered robot pair's shared objective counted
/// once. With symmetric shared costs, a unilateral change of robot i
/// moves this function by exactly the change of robot i's own cost.
double potential(const JointStrategy& joint, const GameContext& ctx, const CostParams& params);

/// Gradient of the potential with respect to the robot-major stacked
/// controls (2MH vector); block i equals grad_player_cost(i, ...).
Eigen::VectorXd grad_potential(const JointStrategy& joint, const GameContext& ctx,
                               const CostParams& params);

/// Horizon positions of every robot under a joint strategy.
std::vector<std::vector<Vec2>> joint_positions(const JointStrategy& joint,
                                               const GameContext& ctx, double tau);

}  // namespace crowdgame

#endif  // CROWDGAME_OBJECTIVES_OBJECTIVES_HPP

#ifndef CROWDGAME_DYNAMICS_DYNAMICS_HPP
#define CROWDGAME_DYNAMICS_DYNAMICS_HPP

#include <vector>

#include <Eigen/Core>

#include "crowdgame/core/types.hpp"

namespace crowdgame {

/// Exact discrete double-integrator update over one sampling period:
///   s' = s + tau*v + 0.5*tau^2*a,  v' = v + tau*a.
/// Throws std::invalid_argument on non-finite input.
RobotState dynamics_step(const RobotState& x, const Control& u, double tau);

/// States x_{t+1}..x_{t+H} obtained by iterating dynamics_step.
std::vector<RobotState> rollout(const RobotState& x_t, const Strategy& strat, double tau);

/// Stacked affine horizon map: with x stacked as [s;v] per step, the
/// horizon states satisfy  X = state_map * x_t + input_map * U  where
/// U is the stacked control vector. input_map is block-lower-triangular
/// in time (controls cannot affect earlier states).
struct RolloutMatrices {
    Eigen::MatrixXd state_map;  // 4H x 4
    Eigen::MatrixXd input_map;  // 4H x 2H
    int horizon = 0;
    double tau = 0.0;
};

RolloutMatrices build_rollout_matrices(int horizon, double tau);

/// Applies the affine map; returns the stacked [s;v] horizon vector (4H).
Eigen::VectorXd affine_rollout(const RolloutMatrices& m, const RobotState& x_t,
                               const Strategy& strat);

/// d s_{t+k+1} / d u_{t+m} is this scalar times the 2x2 identity (m <= k).
inline double position_influence(int k, int m, double tau) {
    return 0.5 * tau * tau + static_cast<double>(k - m) * tau * tau;
}

/// d v_{t+k+1} / d u_{t+m} is tau times the identity for m <= k.
inline double velocity_influence(double tau) { return tau; }

/// Stacks a strategy as [u0x, u0y, u1x, u1y, ...].
Eigen::VectorXd flatten(const Strategy& s);
Strategy strategy_from_vector(const Eigen::VectorXd& u);

/// Robot-major stacking of a joint strategy (2MH entries).
Eigen::VectorXd flatten(const JointStrategy& j);
JointStrategy joint_from_vector(const Eigen::VectorXd& u, int num_robots, int horizon);

}  // namespace crowdgame

#endif  // CROWDGAME_DYNAMICS_DYNAMICS_HPP

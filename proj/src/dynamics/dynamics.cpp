#include "crowdgame/dynamics/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace crowdgame {

RobotState dynamics_step(const RobotState& x, const Control& u, double tau) {
    if (!(x.position.allFinite() && x.velocity.allFinite() && u.allFinite() &&
          std::isfinite(tau))) {
        throw std::invalid_argument("dynamics_step: non-finite input");
    }
    RobotState next;
    next.position = x.position + tau * x.velocity + 0.5 * tau * tau * u;
    next.velocity = x.velocity + tau * u;
    return next;
}

std::vector<RobotState> rollout(const RobotState& x_t, const Strategy& strat, double tau) {
    std::vector<RobotState> out;
    out.reserve(strat.controls.size());
    RobotState x = x_t;
    for (const auto& u : strat.controls) {
        x = dynamics_step(x, u, tau);
        out.push_back(x);
    }
    return out;
}

RolloutMatrices build_rollout_matrices(int horizon, double tau) {
    if (horizon < 1) throw std::invalid_argument("build_rollout_matrices: horizon must be >= 1");
    RolloutMatrices m;
    m.horizon = horizon;
    m.tau = tau;
    m.state_map = Eigen::MatrixXd::Zero(4 * horizon, 4);
    m.input_map = Eigen::MatrixXd::Zero(4 * horizon, 2 * horizon);

    const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
    for (int k = 0; k < horizon; ++k) {
        // state_map block k is F^(k+1) for F = [[I, tau*I], [0, I]].
        const double steps = static_cast<double>(k + 1);
        m.state_map.block<2, 2>(4 * k, 0) = eye;
        m.state_map.block<2, 2>(4 * k, 2) = steps * tau * eye;
        m.state_map.block<2, 2>(4 * k + 2, 2) = eye;
        for (int col = 0; col <= k; ++col) {
            m.input_map.block<2, 2>(4 * k, 2 * col) = position_influence(k, col, tau) * eye;
            m.input_map.block<2, 2>(4 * k + 2, 2 * col) = tau * eye;
        }
    }
    return m;
}

Eigen::VectorXd affine_rollout(const RolloutMatrices& m, const RobotState& x_t,
                               const Strategy& strat) {
    if (strat.horizon() != m.horizon) {
        throw std::invalid_argument("affine_rollout: strategy horizon mismatch");
    }
    Eigen::Vector4d x0;
    x0 << x_t.position, x_t.velocity;
    return m.state_map * x0 + m.input_map * flatten(strat);
}

Eigen::VectorXd flatten(const Strategy& s) {
    Eigen::VectorXd u(2 * s.horizon());
    for (int k = 0; k < s.horizon(); ++k) u.segment<2>(2 * k) = s.controls[static_cast<std::size_t>(k)];
    return u;
}

Strategy strategy_from_vector(const Eigen::VectorXd& u) {
    if (u.size() % 2 != 0) throw std::invalid_argument("strategy_from_vector: odd length");
    Strategy s;
    s.controls.resize(static_cast<std::size_t>(u.size() / 2));
    for (Eigen::Index k = 0; 2 * k < u.size(); ++k) {
        s.controls[static_cast<std::size_t>(k)] = u.segment<2>(2 * k);
    }
    return s;
}

Eigen::VectorXd flatten(const JointStrategy& j) {
    const int m = j.num_robots();
    const int h = m > 0 ? j.per_robot.front().horizon() : 0;
    Eigen::VectorXd u(2 * m * h);
    for (int i = 0; i < m; ++i) u.segment(2 * h * i, 2 * h) = flatten(j.per_robot[static_cast<std::size_t>(i)]);
    return u;
}

JointStrategy joint_from_vector(const Eigen::VectorXd& u, int num_robots, int horizon) {
    if (u.size() != 2 * num_robots * horizon) {
        throw std::invalid_argument("joint_from_vector: size mismatch");
    }
    JointStrategy j;
    j.per_robot.reserve(static_cast<std::size_t>(num_robots));
    for (int i = 0; i < num_robots; ++i) {
        j.per_robot.push_back(strategy_from_vector(u.segment(2 * horizon * i, 2 * horizon)));
    }
    return j;
}

}  // namespace crowdgame

#include "crowdgame/objectives/objectives.hpp"

#include <cmath>
#include <stdexcept>

#include "crowdgame/dynamics/dynamics.hpp"

namespace crowdgame {

std::vector<Vec2> make_reference(const Vec2& start, const Vec2& goal, int horizon,
                                 double tau, double v_max) {
    std::vector<Vec2> ref;
    ref.reserve(static_cast<std::size_t>(horizon));
    const Vec2 to_goal = goal - start;
    const double total = to_goal.norm();
    if (total < 1e-12) {
        ref.assign(static_cast<std::size_t>(horizon), goal);
        return ref;
    }
    // Direction is fixed at time t; only the step length adapts.
    const Vec2 dir = to_goal / total;
    Vec2 point = start;
    for (int k = 0; k < horizon; ++k) {
        const double remaining = (goal - point).norm();
        point += std::min(tau * v_max, remaining) * dir;
        ref.push_back(point);
    }
    return ref;
}

double j_goal(std::span<const Vec2> traj, std::span<const Vec2> reference,
              const Vec2& current_position, const Vec2& goal, double delta_goal) {
    if (traj.size() != reference.size()) {
        throw std::invalid_argument("j_goal: trajectory/reference length mismatch");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        sum += (traj[k] - reference[k]).squaredNorm();
    }
    return sum / ((current_position - goal).norm() + delta_goal);
}

double j_acce(const Strategy& strat) {
    double sum = 0.0;
    for (const auto& u : strat.controls) sum += u.squaredNorm();
    return sum;
}

double j_jerk(const Strategy& strat, const Vec2& u_prev) {
    double sum = 0.0;
    Vec2 prev = u_prev;
    for (const auto& u : strat.controls) {
        sum += (u - prev).squaredNorm();
        prev = u;
    }
    return sum;
}

double g_human(const RobotState& x, const Vec2& s_human, double d_min, double rho) {
    return d_min * d_min + rho * x.velocity.squaredNorm() -
           (x.position - s_human).squaredNorm();
}

double g_robot(const Vec2& s_i, const Vec2& s_j, double d_min) {
    return d_min * d_min - (s_i - s_j).squaredNorm();
}

double smax(double z, double mu) {
    const double a = mu * z;
    if (a > 30.0) return z + std::log1p(std::exp(-a)) / mu;
    return std::log1p(std::exp(a)) / mu;
}

double smax_slope(double z, double mu) {
    const double a = mu * z;
    if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
    const double e = std::exp(a);
    return e / (1.0 + e);
}

HorizonStates rollout_states(const RobotState& x_t, const Strategy& strat, double tau) {
    HorizonStates out;
    out.pos.reserve(strat.controls.size());
    out.vel.reserve(strat.controls.size());
    for (const auto& x : rollout(x_t, strat, tau)) {
        out.pos.push_back(x.position);
        out.vel.push_back(x.velocity);
    }
    return out;
}

double j_coll_human(const HorizonStates& traj_i, std::span<const Vec2> human_track,
                    double d_min, double rho, double mu) {
    if (human_track.size() != traj_i.pos.size()) {
        throw std::invalid_argument("j_coll_human: horizon mismatch");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < traj_i.pos.size(); ++k) {
        const double z = d_min * d_min + rho * traj_i.vel[k].squaredNorm() -
                         (traj_i.pos[k] - human_track[k]).squaredNorm();
        sum += smax(z, mu);
    }
    return sum;
}

double j_coll_robot(std::span<const Vec2> pos_i, std::span<const Vec2> pos_j,
                    double d_min, double mu) {
    if (pos_i.size() != pos_j.size()) throw std::invalid_argument("j_coll_robot: horizon mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < pos_i.size(); ++k) {
        sum += smax(d_min * d_min - (pos_i[k] - pos_j[k]).squaredNorm(), mu);
    }
    return sum;
}

double j_floc(std::span<const Vec2> pos_i, std::span<const Vec2> pos_j, double d_desired,
              double delta_norm) {
    if (pos_i.size() != pos_j.size()) throw std::invalid_argument("j_floc: horizon mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < pos_i.size(); ++k) {
        const double dist = std::sqrt((pos_i[k] - pos_j[k]).squaredNorm() + delta_norm);
        const double dev = dist - d_desired;
        sum += dev * dev;
    }
    return sum;
}

double j_vel(std::span<const Vec2> vel_i, double v_max, double mu) {
    double sum = 0.0;
    for (const auto& v : vel_i) {
        sum += smax(v.x() * v.x() - v_max * v_max, mu);
        sum += smax(v.y() * v.y() - v_max * v_max, mu);
    }
    return sum;
}

namespace {

/// Per-step cost partials of one robot, prior to the chain rule through
/// the rollout. d_u collects terms that hit the controls directly.
struct Partials {
    std::vector<Vec2> d_pos;
    std::vector<Vec2> d_vel;
    std::vector<Vec2> d_u;

    explicit Partials(int horizon)
        : d_pos(static_cast<std::size_t>(horizon), Vec2::Zero()),
          d_vel(static_cast<std::size_t>(horizon), Vec2::Zero()),
          d_u(static_cast<std::size_t>(horizon), Vec2::Zero()) {}
};

Eigen::VectorXd pull_back(const Partials& p, double tau) {
    const int horizon = static_cast<int>(p.d_pos.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(2 * horizon);
    for (int m = 0; m < horizon; ++m) {
        Vec2 g = p.d_u[static_cast<std::size_t>(m)];
        for (int k = m; k < horizon; ++k) {
            g += position_influence(k, m, tau) * p.d_pos[static_cast<std::size_t>(k)];
            g += tau * p.d_vel[static_cast<std::size_t>(k)];
        }
        grad.segment<2>(2 * m) = g;
    }
    return grad;
}

void add_individual_partials(const Strategy& strat, const HorizonStates& traj,
                             const LocalContext& ctx, const PredictedCrowd& pred,
                             const CostParams& params, Partials& out) {
    const int horizon = strat.horizon();
    const auto ref = make_reference(ctx.state.position, ctx.goal, horizon, params.tau,
                                    params.v_max);
    const double denom = (ctx.state.position - ctx.goal).norm() + params.delta_goal;
    for (int k = 0; k < horizon; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        out.d_pos[ku] += params.omega_goal * 2.0 * (traj.pos[ku] - ref[ku]) / denom;
    }
    for (int m = 0; m < horizon; ++m) {
        const auto mu_ = static_cast<std::size_t>(m);
        out.d_u[mu_] += params.omega_acce * 2.0 * strat.controls[mu_];
        const Vec2 prev = m == 0 ? ctx.u_prev : strat.controls[mu_ - 1];
        out.d_u[mu_] += params.omega_jerk * 2.0 * (strat.controls[mu_] - prev);
        if (m + 1 < horizon) {
            out.d_u[mu_] -= params.omega_jerk * 2.0 * (strat.controls[mu_ + 1] - strat.controls[mu_]);
        }
    }
    for (int h = 0; h < pred.num_humans(); ++h) {
        for (int k = 0; k < horizon; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const Vec2 diff = traj.pos[ku] - pred.human(k, h);
            const double z = params.d_min * params.d_min +
                             params.rho * traj.vel[ku].squaredNorm() - diff.squaredNorm();
            const double slope = smax_slope(z, params.mu);
            out.d_pos[ku] += params.omega_coll_human * slope * -2.0 * diff;
            out.d_vel[ku] += params.omega_coll_human * slope * 2.0 * params.rho * traj.vel[ku];
        }
    }
    const double v2 = params.v_max * params.v_max;
    for (int k = 0; k < horizon; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const Vec2& v = traj.vel[ku];
        out.d_vel[ku].x() += params.omega_vel *
                             smax_slope(v.x() * v.x() - v2, params.mu) * 2.0 * v.x();
        out.d_vel[ku].y() += params.omega_vel *
                             smax_slope(v.y() * v.y() - v2, params.mu) * 2.0 * v.y();
    }
}

/// Position partials of shared_cost(i, j, ...) with respect to both
/// robots' positions. Either output may be null.
void add_shared_partials(int i, int j, std::span<const Vec2> pos_i,
                         std::span<const Vec2> pos_j, const CostParams& params,
                         std::vector<Vec2>* d_pos_i, std::vector<Vec2>* d_pos_j) {
    const double w_coll = params.omega_coll_robot(i, j);
    const double w_floc = params.omega_floc(i, j);
    const double d_des = params.d_flock(i, j);
    for (std::size_t k = 0; k < pos_i.size(); ++k) {
        const Vec2 diff = pos_i[k] - pos_j[k];
        const double z = params.d_min * params.d_min - diff.squaredNorm();
        Vec2 g = w_coll * smax_slope(z, params.mu) * -2.0 * diff;
        const double dist = std::sqrt(diff.squaredNorm() + params.delta_norm);
        g += w_floc * 2.0 * (dist - d_des) * diff / dist;
        if (d_pos_i != nullptr) (*d_pos_i)[k] += g;
        if (d_pos_j != nullptr) (*d_pos_j)[k] -= g;
    }
}

}  // namespace

CostBreakdown individual_cost(const Strategy& strat, const LocalContext& ctx,
                              const PredictedCrowd& pred, const CostParams& params) {
    const HorizonStates traj = rollout_states(ctx.state, strat, params.tau);
    const auto ref = make_reference(ctx.state.position, ctx.goal, strat.horizon(),
                                    params.tau, params.v_max);

    CostBreakdown b;
    b.goal = j_goal(traj.pos, ref, ctx.state.position, ctx.goal, params.delta_goal);
    b.acce = j_acce(strat);
    b.jerk = j_jerk(strat, ctx.u_prev);
    std::vector<Vec2> track(static_cast<std::size_t>(pred.horizon()));
    for (int h = 0; h < pred.num_humans(); ++h) {
        for (int k = 0; k < pred.horizon(); ++k) track[static_cast<std::size_t>(k)] = pred.human(k, h);
        b.coll_human += j_coll_human(traj, track, params.d_min, params.rho, params.mu);
    }
    b.vel = j_vel(traj.vel, params.v_max, params.mu);
    b.total = params.omega_goal * b.goal + params.omega_acce * b.acce +
              params.omega_jerk * b.jerk + params.omega_coll_human * b.coll_human +
              params.omega_vel * b.vel;
    return b;
}

double shared_cost(int i, int j, std::span<const Vec2> pos_i, std::span<const Vec2> pos_j,
                   const CostParams& params) {
    return params.omega_coll_robot(i, j) * j_coll_robot(pos_i, pos_j, params.d_min, params.mu) +
           params.omega_floc(i, j) * j_floc(pos_i, pos_j, params.d_flock(i, j), params.delta_norm);
}

double local_player_cost(int i, const Strategy& strat, const LocalContext& ctx,
                         const std::vector<std::vector<Vec2>>& robot_positions,
                         const PredictedCrowd& pred, const CostParams& params) {
    const CostBreakdown own = individual_cost(strat, ctx, pred, params);

    const HorizonStates traj = rollout_states(ctx.state, strat, params.tau);
    double shared = 0.0;
    for (std::size_t j = 0; j < robot_positions.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        shared += shared_cost(i, static_cast<int>(j), traj.pos, robot_positions[j], params);
    }
    return own.total + shared;
}

Eigen::VectorXd grad_local_player_cost(int i, const Strategy& strat, const LocalContext& ctx,
                                       const std::vector<std::vector<Vec2>>& robot_positions,
                                       const PredictedCrowd& pred, const CostParams& params,
                                       double tau) {
    const int horizon = strat.horizon();
    const HorizonStates traj = rollout_states(ctx.state, strat, tau);
    Partials partials(horizon);
    add_individual_partials(strat, traj, ctx, pred, params, partials);
    for (std::size_t j = 0; j < robot_positions.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        add_shared_partials(i, static_cast<int>(j), traj.pos, robot_positions[j], params,
                            &partials.d_pos, nullptr);
    }
    return pull_back(partials, tau);
}

std::vector<std::vector<Vec2>> joint_positions(const JointStrategy& joint,
                                               const GameContext& ctx, double tau) {
    std::vector<std::vector<Vec2>> out;
    out.reserve(joint.per_robot.size());
    for (std::size_t i = 0; i < joint.per_robot.size(); ++i) {
        out.push_back(rollout_states(ctx.robots[i].state, joint.per_robot[i], tau).pos);
    }
    return out;
}

double player_cost(int i, const JointStrategy& joint, const GameContext& ctx,
                   const CostParams& params) {
    const auto positions = joint_positions(joint, ctx, params.tau);
    return local_player_cost(i, joint.per_robot.at(static_cast<std::size_t>(i)),
                             ctx.robots.at(static_cast<std::size_t>(i)), positions, ctx.pred,
                             params);
}

Eigen::VectorXd grad_player_cost(int i, const JointStrategy& joint, const GameContext& ctx,
                                 const CostParams& params) {
    const auto positions = joint_positions(joint, ctx, params.tau);
    return grad_local_player_cost(i, joint.per_robot.at(static_cast<std::size_t>(i)),
                                  ctx.robots.at(static_cast<std::size_t>(i)), positions,
                                  ctx.pred, params, params.tau);
}

double potential(const JointStrategy& joint, const GameContext& ctx, const CostParams& params) {
    const int m = joint.num_robots();
    const auto positions = joint_positions(joint, ctx, params.tau);
    double f = 0.0;
    for (int i = 0; i < m; ++i) {
        f += individual_cost(joint.per_robot[static_cast<std::size_t>(i)],
                             ctx.robots[static_cast<std::size_t>(i)], ctx.pred, params)
                 .total;
    }
    // Each unordered pair's shared objective enters once so that a
    // unilateral deviation changes the potential by exactly the deviating
    // robot's cost change.
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            f += shared_cost(i, j, positions[static_cast<std::size_t>(i)],
                             positions[static_cast<std::size_t>(j)], params);
        }
    }
    return f;
}

Eigen::VectorXd grad_potential(const JointStrategy& joint, const GameContext& ctx,
                               const CostParams& params) {
    const int m = joint.num_robots();
    const int horizon = m > 0 ? joint.per_robot.front().horizon() : 0;
    std::vector<HorizonStates> trajs;
    trajs.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        trajs.push_back(rollout_states(ctx.robots[static_cast<std::size_t>(i)].state,
                                       joint.per_robot[static_cast<std::size_t>(i)], params.tau));
    }

    std::vector<Partials> partials(static_cast<std::size_t>(m), Partials(horizon));
    for (int i = 0; i < m; ++i) {
        add_individual_partials(joint.per_robot[static_cast<std::size_t>(i)],
                                trajs[static_cast<std::size_t>(i)],
                                ctx.robots[static_cast<std::size_t>(i)], ctx.pred, params,
                                partials[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            add_shared_partials(i, j, trajs[static_cast<std::size_t>(i)].pos,
                                trajs[static_cast<std::size_t>(j)].pos, params,
                                &partials[static_cast<std::size_t>(i)].d_pos,
                                &partials[static_cast<std::size_t>(j)].d_pos);
        }
    }

    Eigen::VectorXd grad(2 * m * horizon);
    for (int i = 0; i < m; ++i) {
        grad.segment(2 * horizon * i, 2 * horizon) =
            pull_back(partials[static_cast<std::size_t>(i)], params.tau);
    }
    return grad;
}

}  // namespace crowdgame

#include "crowdgame/cmpc/cmpc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "crowdgame/dynamics/dynamics.hpp"

namespace crowdgame {

CmpcResult solve_cmpc(const std::vector<LocalContext>& robots, const PositionHistory& history,
                      const Predictor& predictor, const CostParams& params,
                      const JointStrategy& u_init, const CmpcOptions& options) {
    const int num_robots = static_cast<int>(robots.size());
    const int horizon = params.H;
    if (u_init.num_robots() != num_robots) {
        throw std::invalid_argument("solve_cmpc: u_init robot count mismatch");
    }
    if (!history.warm()) throw std::invalid_argument("solve_cmpc: history is not warm");

    const Eigen::Index dim = 2 * num_robots * horizon;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -params.a_max);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, params.a_max);
    const Eigen::VectorXd u_start = flatten(u_init).cwiseMax(lo).cwiseMin(hi);
    const JointStrategy init = joint_from_vector(u_start, num_robots, horizon);

    GameContext ctx;
    ctx.robots = robots;

    auto plan_of = [&](const JointStrategy& joint) {
        return joint_positions(joint, ctx, params.tau);
    };

    auto solve_under = [&](const PredictedCrowd& pred, const Eigen::VectorXd& warm) {
        GameContext iter_ctx;
        iter_ctx.robots = robots;
        iter_ctx.pred = pred;
        const BoxObjective objective = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
            const JointStrategy joint = joint_from_vector(u, num_robots, horizon);
            if (grad != nullptr) *grad = grad_potential(joint, iter_ctx, params);
            return potential(joint, iter_ctx, params);
        };
        return minimize_box(objective, lo, hi, warm, options.solver);
    };

    CmpcResult result;
    std::vector<std::vector<Vec2>> robot_plan = plan_of(init);
    Eigen::VectorXd u_current = u_start;
    double f_prev = 0.0;

    JointStrategy best_strategy = init;
    double best_value = std::numeric_limits<double>::infinity();
    PredictedCrowd best_pred;
    JointStrategy last_strategy = init;
    PredictedCrowd last_pred;

    for (int j = 1; j <= params.j_max; ++j) {
        const PredictedCrowd pred =
            rollout_prediction(predictor, history, robot_plan, horizon);
        ctx.pred = pred;
        if (j == 1) f_prev = potential(init, ctx, params);

        auto [u_sol, report] = solve_under(pred, u_current);
        const JointStrategy joint_sol = joint_from_vector(u_sol, num_robots, horizon);
        const double f_j = report.objective;

        result.trace.push_back(CmpcIteration{j, f_j, report});
        if (f_j < best_value) {
            best_value = f_j;
            best_strategy = joint_sol;
            best_pred = pred;
        }
        last_strategy = joint_sol;
        last_pred = pred;

        robot_plan = plan_of(joint_sol);
        u_current = u_sol;
        const bool settled = std::abs(f_j - f_prev) <= params.xi;
        f_prev = f_j;
        if (settled) {
            result.converged = true;
            break;
        }
    }

    if (options.strict_last_iterate || result.converged) {
        result.strategy = last_strategy;
        result.final_prediction = last_pred;
    } else {
        result.strategy = best_strategy;
        result.final_prediction = best_pred;
    }

    // The warm start chain does not by itself bound the returned iterate
    // against u_init once predictions have moved; re-solve from u_init in
    // the rare case it still scores better under the final prediction.
    ctx.pred = result.final_prediction;
    const double f_returned = potential(result.strategy, ctx, params);
    const double f_init = potential(init, ctx, params);
    if (f_init < f_returned - 1e-12) {
        auto [u_sol, report] = solve_under(result.final_prediction, u_start);
        (void)report;
        const JointStrategy resolved = joint_from_vector(u_sol, num_robots, horizon);
        if (potential(resolved, ctx, params) < f_returned) result.strategy = resolved;
    }
    return result;
}

double eval_interaction_cost(const PredictedCrowd& pred,
                             const std::vector<std::vector<Vec2>>& candidate) {
    if (static_cast<int>(candidate.size()) != pred.horizon()) {
        throw std::invalid_argument("eval_interaction_cost: horizon mismatch");
    }
    double total = 0.0;
    for (int k = 0; k < pred.horizon(); ++k) {
        const auto& slice = candidate[static_cast<std::size_t>(k)];
        if (static_cast<int>(slice.size()) != pred.num_humans()) {
            throw std::invalid_argument("eval_interaction_cost: crowd arity mismatch");
        }
        double step = 0.0;
        for (int h = 0; h < pred.num_humans(); ++h) {
            step += (slice[static_cast<std::size_t>(h)] - pred.human(k, h)).squaredNorm();
        }
        total += std::sqrt(step);
    }
    return total;
}

}  // namespace crowdgame

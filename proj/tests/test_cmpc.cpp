#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crowdgame/cmpc/cmpc.hpp"
#include "crowdgame/dynamics/dynamics.hpp"
#include "helpers/test_util.hpp"

using namespace crowdgame;
using namespace crowdgame::testutil;

namespace {

PositionHistory still_history(const std::vector<Vec2>& positions, int length) {
    PositionHistory h(length, static_cast<int>(positions.size()));
    for (int k = 0; k < length; ++k) h.push(positions);
    return h;
}

}  // namespace

TEST_CASE("a robot already at its goal converges in one outer iteration") {
    CostParams p = CostParams::defaults(1);
    std::vector<LocalContext> robots(1);
    robots[0].state.position = Vec2(2.0, -1.0);
    robots[0].goal = Vec2(2.0, -1.0);
    const PositionHistory h = still_history({robots[0].state.position}, p.L);

    const CmpcResult result = solve_cmpc(robots, h, ConstantVelocityPredictor{}, p,
                                         JointStrategy::zeros(1, p.H));
    CHECK(result.converged);
    CHECK(result.trace.size() == 1);
    CHECK(result.trace.back().potential_value < 1e-5);
    CHECK(flatten(result.strategy).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("mirror-symmetric scene produces mirrored strategies") {
    CostParams p = CostParams::defaults(2);
    std::vector<LocalContext> robots(2);
    robots[0].state.position = Vec2(0.0, 1.0);
    robots[1].state.position = Vec2(0.0, -1.0);
    robots[0].goal = Vec2(5.0, 1.0);
    robots[1].goal = Vec2(5.0, -1.0);
    const PositionHistory h =
        still_history({robots[0].state.position, robots[1].state.position}, p.L);

    const CmpcResult result = solve_cmpc(robots, h, ConstantVelocityPredictor{}, p,
                                         JointStrategy::zeros(2, p.H));
    for (int k = 0; k < p.H; ++k) {
        const Vec2 top = result.strategy.per_robot[0].controls[static_cast<std::size_t>(k)];
        const Vec2 bottom = result.strategy.per_robot[1].controls[static_cast<std::size_t>(k)];
        CHECK(std::abs(top.x() - bottom.x()) < 1e-6);
        CHECK(std::abs(top.y() + bottom.y()) < 1e-6);
    }
}

TEST_CASE("plan-independent prediction settles at the second outer iteration") {
    CostParams p = CostParams::defaults(2);
    std::vector<LocalContext> robots(2);
    robots[0].state.position = Vec2(-3.0, 0.8);
    robots[1].state.position = Vec2(-3.0, -0.8);
    robots[0].goal = Vec2(3.0, 0.8);
    robots[1].goal = Vec2(3.0, -0.8);
    // One distant human wandering along +y.
    PositionHistory h(p.L, 3);
    for (int k = 0; k < p.L; ++k) {
        h.push({robots[0].state.position, robots[1].state.position,
                Vec2(8.0, 0.05 * static_cast<double>(k))});
    }

    const CmpcResult result = solve_cmpc(robots, h, ConstantVelocityPredictor{}, p,
                                         JointStrategy::zeros(2, p.H));
    CHECK(result.converged);
    CHECK(result.trace.size() == 2);
    CHECK(std::abs(result.trace[1].potential_value - result.trace[0].potential_value) <= p.xi);
}

TEST_CASE("returned strategy is feasible and no worse than the warm start") {
    std::mt19937_64 rng(71);
    CostParams p = CostParams::defaults(3);
    for (int trial = 0; trial < 5; ++trial) {
        const RandomGame game = random_game(rng, 3, 3, p, 1.2);
        std::vector<Vec2> agents;
        for (const auto& r : game.ctx.robots) agents.push_back(r.state.position);
        for (int hu = 0; hu < 3; ++hu) {
            agents.push_back(game.ctx.pred.slices[0][static_cast<std::size_t>(hu)]);
        }
        const PositionHistory h = still_history(agents, p.L);

        const JointStrategy u_init = JointStrategy::zeros(3, p.H);
        const CmpcResult result =
            solve_cmpc(game.ctx.robots, h, ConstantVelocityPredictor{}, p, u_init);

        const Eigen::VectorXd flat = flatten(result.strategy);
        CHECK(flat.lpNorm<Eigen::Infinity>() <= p.a_max + 1e-12);

        GameContext final_ctx;
        final_ctx.robots = game.ctx.robots;
        final_ctx.pred = result.final_prediction;
        CHECK(potential(result.strategy, final_ctx, p) <=
              potential(u_init, final_ctx, p) + 1e-9);
    }
}

TEST_CASE("strict mode returns the literal last iterate") {
    CostParams p = CostParams::defaults(1);
    std::vector<LocalContext> robots(1);
    robots[0].state.position = Vec2(-2.0, 0.0);
    robots[0].goal = Vec2(2.0, 0.0);
    const PositionHistory h = still_history({robots[0].state.position}, p.L);

    CmpcOptions strict;
    strict.strict_last_iterate = true;
    const CmpcResult a =
        solve_cmpc(robots, h, ConstantVelocityPredictor{}, p, JointStrategy::zeros(1, p.H), strict);
    const CmpcResult b =
        solve_cmpc(robots, h, ConstantVelocityPredictor{}, p, JointStrategy::zeros(1, p.H));
    // With a well-behaved convex-ish instance both modes agree.
    CHECK((flatten(a.strategy) - flatten(b.strategy)).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("interaction cost measures deviation from the prediction") {
    PredictedCrowd pred;
    pred.slices = {{Vec2(0.1, 0.0)}, {Vec2(0.2, 0.0)}, {Vec2(0.3, 0.0)}, {Vec2(0.4, 0.0)}};

    SUBCASE("following the prediction is free") {
        CHECK(eval_interaction_cost(pred, pred.slices) == doctest::Approx(0.0));
    }
    SUBCASE("a constant offset accumulates per step") {
        auto candidate = pred.slices;
        for (auto& slice : candidate) slice[0] += Vec2(0.1, 0.0);
        CHECK(eval_interaction_cost(pred, candidate) == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("only the deviating human contributes") {
        PredictedCrowd two;
        two.slices = {{Vec2(0.0, 0.0), Vec2(5.0, 0.0)}, {Vec2(0.0, 0.1), Vec2(5.0, 0.1)}};
        auto candidate = two.slices;
        candidate[0][1] += Vec2(0.0, 0.2);
        candidate[1][1] += Vec2(0.0, 0.2);
        CHECK(eval_interaction_cost(two, candidate) == doctest::Approx(0.4).epsilon(1e-12));
    }
}

#ifndef CROWDGAME_TESTS_HELPERS_TEST_UTIL_HPP
#define CROWDGAME_TESTS_HELPERS_TEST_UTIL_HPP

#include <random>
#include <vector>

#include "crowdgame/core/types.hpp"
#include "crowdgame/objectives/objectives.hpp"

namespace crowdgame::testutil {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Vec2 random_vec(std::mt19937_64& rng, double lo, double hi) {
    return Vec2(uniform(rng, lo, hi), uniform(rng, lo, hi));
}

inline Strategy random_strategy(std::mt19937_64& rng, int horizon, double a_max) {
    Strategy s;
    for (int k = 0; k < horizon; ++k) {
        s.controls.push_back(random_vec(rng, -0.9 * a_max, 0.9 * a_max));
    }
    return s;
}

inline JointStrategy random_joint(std::mt19937_64& rng, int num_robots, int horizon,
                                  double a_max) {
    JointStrategy joint;
    for (int i = 0; i < num_robots; ++i) joint.per_robot.push_back(random_strategy(rng, horizon, a_max));
    return joint;
}

/// Random game configuration with all agents spread over a disk but no
/// closer than `min_spacing`, keeping the collision penalties in their
/// smooth sub-threshold regime (well-conditioned for identity checks).
struct RandomGame {
    GameContext ctx;
    JointStrategy joint;
};

inline RandomGame random_game(std::mt19937_64& rng, int num_robots, int num_humans,
                              const CostParams& params, double min_spacing = 1.5,
                              double box = 4.0) {
    RandomGame game;
    std::vector<Vec2> placed;
    auto place = [&]() {
        for (;;) {
            const Vec2 candidate = random_vec(rng, -box, box);
            bool ok = true;
            for (const auto& p : placed) {
                if ((candidate - p).norm() < min_spacing) { ok = false; break; }
            }
            if (ok) {
                placed.push_back(candidate);
                return candidate;
            }
        }
    };

    for (int i = 0; i < num_robots; ++i) {
        LocalContext local;
        local.state.position = place();
        local.state.velocity = random_vec(rng, -params.v_max, params.v_max);
        local.goal = random_vec(rng, -box, box);
        local.u_prev = random_vec(rng, -0.5 * params.a_max, 0.5 * params.a_max);
        game.ctx.robots.push_back(local);
    }

    // Humans drift along straight tracks over the horizon.
    for (int h = 0; h < num_humans; ++h) {
        const Vec2 start = place();
        const Vec2 vel = random_vec(rng, -1.0, 1.0);
        if (static_cast<int>(game.ctx.pred.slices.size()) != params.H) {
            game.ctx.pred.slices.assign(static_cast<std::size_t>(params.H), {});
        }
        for (int k = 0; k < params.H; ++k) {
            game.ctx.pred.slices[static_cast<std::size_t>(k)].push_back(
                start + (k + 1) * params.tau * vel);
        }
    }
    if (num_humans == 0) {
        game.ctx.pred.slices.assign(static_cast<std::size_t>(params.H), {});
    }

    game.joint = random_joint(rng, num_robots, params.H, params.a_max);
    return game;
}

/// Sup-norm comparison scaled by the larger magnitude (floored at 1).
inline double relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double scale = std::max({1.0, a.lpNorm<Eigen::Infinity>(), b.lpNorm<Eigen::Infinity>()});
    return (a - b).lpNorm<Eigen::Infinity>() / scale;
}

inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace crowdgame::testutil

#endif  // CROWDGAME_TESTS_HELPERS_TEST_UTIL_HPP

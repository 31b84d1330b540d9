#include "crowdgame/predictor/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace crowdgame {

PredictedCrowd rollout_prediction(const Predictor& predictor, PositionHistory history,
                                  const std::vector<std::vector<Vec2>>& robot_plan,
                                  int horizon) {
    const int num_robots = static_cast<int>(robot_plan.size());
    const int num_humans = history.num_agents() - num_robots;
    if (num_humans < 0) {
        throw std::invalid_argument("rollout_prediction: more planned robots than agents");
    }
    for (const auto& plan : robot_plan) {
        if (static_cast<int>(plan.size()) != horizon) {
            throw std::invalid_argument("rollout_prediction: robot plan length != horizon");
        }
    }

    PredictedCrowd out;
    out.slices.reserve(static_cast<std::size_t>(horizon));
    for (int k = 0; k < horizon; ++k) {
        std::vector<Vec2> humans = predictor.predict_step(history, num_humans);
        if (static_cast<int>(humans.size()) != num_humans) {
            throw std::runtime_error("predictor returned " + std::to_string(humans.size()) +
                                     " positions, expected " + std::to_string(num_humans));
        }
        std::vector<Vec2> slice;
        slice.reserve(static_cast<std::size_t>(history.num_agents()));
        for (int i = 0; i < num_robots; ++i) {
            slice.push_back(robot_plan[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        }
        for (const auto& h : humans) slice.push_back(h);
        history.push(slice);
        out.slices.push_back(std::move(humans));
    }
    return out;
}

std::vector<Vec2> ConstantVelocityPredictor::predict_step(const PositionHistory& history,
                                                          int num_humans) const {
    if (history.size() < 2) {
        throw std::invalid_argument("constant-velocity predictor needs at least 2 slices");
    }
    const auto& last = history.slice(history.size() - 1);
    const auto& prev = history.slice(history.size() - 2);
    const int offset = history.num_agents() - num_humans;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(num_humans));
    for (int h = 0; h < num_humans; ++h) {
        const auto idx = static_cast<std::size_t>(offset + h);
        out.push_back(last[idx] + (last[idx] - prev[idx]));
    }
    return out;
}

SocialPredictor::SocialPredictor(double gain, double radius, double tau, double v_max)
    : gain_(gain), radius_(radius), tau_(tau), v_max_(v_max) {
    if (gain < 0.0 || radius < 0.0) {
        throw std::invalid_argument("SocialPredictor: gains must be nonnegative");
    }
}

std::vector<Vec2> SocialPredictor::predict_step(const PositionHistory& history,
                                                int num_humans) const {
    if (history.size() < 2) {
        throw std::invalid_argument("social predictor needs at least 2 slices");
    }
    const auto& last = history.slice(history.size() - 1);
    const auto& prev = history.slice(history.size() - 2);
    const int offset = history.num_agents() - num_humans;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(num_humans));
    for (int h = 0; h < num_humans; ++h) {
        const auto idx = static_cast<std::size_t>(offset + h);
        Vec2 displacement = last[idx] - prev[idx];
        for (std::size_t other = 0; other < last.size(); ++other) {
            if (other == idx) continue;
            const Vec2 away = last[idx] - last[other];
            const double d = away.norm();
            if (d >= radius_ || d < 1e-12) continue;
            displacement += gain_ * (1.0 - d / radius_) * tau_ * (away / d);
        }
        const double step_cap = v_max_ * tau_;
        const double step = displacement.norm();
        if (step > step_cap) displacement *= step_cap / step;
        out.push_back(last[idx] + displacement);
    }
    return out;
}

}  // namespace crowdgame

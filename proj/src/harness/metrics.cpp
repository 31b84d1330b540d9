#include "crowdgame/harness/harness.hpp"

#include <algorithm>
#include <cmath>

namespace crowdgame {

namespace {

constexpr double kPersonalSpace = 0.8;  // [m]

/// First time each robot is inside its goal disc; empty entry = never.
std::vector<std::optional<double>> arrival_times(const SimRecord& rec) {
    std::vector<std::optional<double>> arrivals(static_cast<std::size_t>(rec.num_robots));
    for (const auto& step : rec.steps) {
        for (int i = 0; i < rec.num_robots; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            if (arrivals[iu].has_value()) continue;
            if ((step.robot_pos[iu] - rec.robot_goals[iu]).norm() <= kGoalArrivalRadius) {
                arrivals[iu] = step.time;
            }
        }
    }
    return arrivals;
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    return std::min(a.x(), b.x()) - 1e-12 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-12 &&
           std::min(a.y(), b.y()) - 1e-12 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-12;
}

}  // namespace

bool segments_intersect(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1) {
    const double d1 = cross(a1 - a0, b0 - a0);
    const double d2 = cross(a1 - a0, b1 - a0);
    const double d3 = cross(b1 - b0, a0 - b0);
    const double d4 = cross(b1 - b0, a1 - b0);

    if (((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
        ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))) {
        return true;
    }
    // Collinear and degenerate cases, endpoints inclusive.
    if (d1 == 0.0 && on_segment(b0, a0, a1)) return true;
    if (d2 == 0.0 && on_segment(b1, a0, a1)) return true;
    if (d3 == 0.0 && on_segment(a0, b0, b1)) return true;
    if (d4 == 0.0 && on_segment(a1, b0, b1)) return true;
    return false;
}

bool metric_success(const SimRecord& rec, double t_max) {
    if (rec.num_robots == 0) return true;
    for (const auto& arrival : arrival_times(rec)) {
        if (!arrival.has_value() || *arrival > t_max) return false;
    }
    return true;
}

std::optional<double> metric_travel_time(const SimRecord& rec) {
    double last = 0.0;
    for (const auto& arrival : arrival_times(rec)) {
        if (!arrival.has_value()) return std::nullopt;
        last = std::max(last, *arrival);
    }
    return last;
}

bool metric_collision(const SimRecord& rec) {
    for (const auto& step : rec.steps) {
        if (step.min_robot_human_distance < kPersonalSpace) return true;
    }
    return false;
}

bool metric_discomfort(const SimRecord& rec, double factor) {
    for (const auto& step : rec.steps) {
        for (std::size_t r = 0; r < step.robot_pos.size(); ++r) {
            const Vec2 r0 = step.robot_pos[r];
            const Vec2 r1 = r0 + factor * step.robot_vel[r];
            for (std::size_t h = 0; h < step.human_pos.size(); ++h) {
                const Vec2 h0 = step.human_pos[h];
                const Vec2 h1 = h0 + factor * step.human_vel[h];
                if (segments_intersect(r0, r1, h0, h1)) return true;
            }
        }
    }
    return false;
}

EpisodeResult evaluate_episode(const SimRecord& rec, const CostParams& params) {
    EpisodeResult result;
    result.success = metric_success(rec, params.t_max);
    if (const auto travel = metric_travel_time(rec); travel.has_value()) {
        result.travel_time = *travel;
    }
    result.collision = metric_collision(rec);
    result.discomfort = metric_discomfort(rec);
    for (std::size_t i = 1; i < rec.steps.size(); ++i) {
        result.ibr_iterations.push_back(rec.steps[i].ibr_iterations);
        result.min_robot_human_distance =
            std::min(result.min_robot_human_distance, rec.steps[i].min_robot_human_distance);
    }
    if (!rec.steps.empty()) {
        result.min_robot_human_distance =
            std::min(result.min_robot_human_distance, rec.steps.front().min_robot_human_distance);
    }
    if (!result.ibr_iterations.empty()) {
        double sum = 0.0;
        for (int n : result.ibr_iterations) sum += n;
        result.mean_ibr_iterations = sum / static_cast<double>(result.ibr_iterations.size());
    }
    return result;
}

}  // namespace crowdgame

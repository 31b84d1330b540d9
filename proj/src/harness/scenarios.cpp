#include "crowdgame/harness/harness.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace crowdgame {

namespace {

/// Deterministic uniform draws independent of the standard library's
/// distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) {
        const double unit = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * unit;
    }

private:
    std::mt19937_64 gen_;
};

bool spacing_ok(const std::vector<Vec2>& starts, double d_min) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
        for (std::size_t j = i + 1; j < starts.size(); ++j) {
            if ((starts[i] - starts[j]).norm() < d_min) return false;
        }
    }
    return true;
}

constexpr int kMaxAttempts = 1000;

}  // namespace

Scenario gen_circular(std::uint64_t seed, int num_robots, int num_humans, double radius,
                      double d_min) {
    Rng rng(seed);

    // The robot team starts bunched on one side of the circle so that the
    // antipodal goals point the whole team the same way (a flock that has
    // to cross the crowd). Humans spread over the remaining arc.
    const double robot_step = 0.4;  // [rad] between teammates
    const double cluster_halfwidth =
        0.5 * robot_step * static_cast<double>(std::max(0, num_robots - 1)) + 0.35;
    std::vector<double> angles;
    for (int i = 0; i < num_robots; ++i) {
        angles.push_back(M_PI + (static_cast<double>(i) -
                                 static_cast<double>(num_robots - 1) / 2.0) *
                                    robot_step);
    }
    const double arc_start = M_PI + (num_robots > 0 ? cluster_halfwidth : 0.0);
    const double arc_span = 2.0 * M_PI - (num_robots > 0 ? 2.0 * cluster_halfwidth : 0.0);
    for (int h = 0; h < num_humans; ++h) {
        angles.push_back(arc_start +
                         arc_span * (static_cast<double>(h) + 0.5) / static_cast<double>(num_humans));
    }

    std::vector<Vec2> starts;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        starts.clear();
        for (const double theta : angles) {
            const Vec2 radial(std::cos(theta), std::sin(theta));
            const Vec2 tangent(-std::sin(theta), std::cos(theta));
            const double dr = rng.uniform(-0.5, 0.5);
            const double dt = rng.uniform(-0.5, 0.5);
            starts.push_back((radius + dr) * radial + dt * tangent);
        }
        if (spacing_ok(starts, d_min)) break;
        starts.clear();
    }
    if (starts.empty()) {
        throw std::runtime_error("gen_circular: could not satisfy spacing after resampling");
    }

    Scenario s;
    s.layout = Layout::CircularCrossing;
    s.seed = seed;
    for (int i = 0; i < num_robots; ++i) {
        RobotSpec spec;
        spec.position = starts[static_cast<std::size_t>(i)];
        spec.goal = -spec.position;
        s.robots.push_back(spec);
    }
    for (int h = 0; h < num_humans; ++h) {
        HumanSpec spec;
        spec.position = starts[static_cast<std::size_t>(num_robots + h)];
        spec.goal = -spec.position;
        s.humans.push_back(spec);
    }
    return s;
}

Scenario gen_perpendicular(std::uint64_t seed, int num_robots, int num_humans, double d_min,
                           double robot_spacing) {
    Rng rng(seed);

    std::vector<Vec2> robot_starts;
    for (int i = 0; i < num_robots; ++i) {
        const double y =
            (static_cast<double>(i) - static_cast<double>(num_robots - 1) / 2.0) * robot_spacing;
        robot_starts.emplace_back(-4.0, y);
    }

    std::vector<Vec2> starts;
    std::vector<double> sides;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        starts = robot_starts;
        sides.clear();
        for (int h = 0; h < num_humans; ++h) {
            const double x = rng.uniform(-3.0, 3.0);
            const double side = rng.uniform(0.0, 1.0) < 0.5 ? 1.0 : -1.0;
            const double y = side * (4.0 + rng.uniform(0.0, 1.0));
            starts.emplace_back(x, y);
            sides.push_back(side);
        }
        if (spacing_ok(starts, d_min)) break;
        starts.clear();
    }
    if (starts.empty()) {
        throw std::runtime_error("gen_perpendicular: could not satisfy spacing after resampling");
    }

    Scenario s;
    s.layout = Layout::PerpendicularCrossing;
    s.seed = seed;
    for (int i = 0; i < num_robots; ++i) {
        RobotSpec spec;
        spec.position = starts[static_cast<std::size_t>(i)];
        spec.goal = Vec2(4.0, spec.position.y());
        s.robots.push_back(spec);
    }
    for (int h = 0; h < num_humans; ++h) {
        HumanSpec spec;
        spec.position = starts[static_cast<std::size_t>(num_robots + h)];
        spec.goal = Vec2(spec.position.x() + rng.uniform(-0.5, 0.5),
                         -sides[static_cast<std::size_t>(h)] * 4.5);
        s.humans.push_back(spec);
    }
    return s;
}

Scenario gen_layout(Layout layout, std::uint64_t seed, int num_robots, int num_humans,
                    double d_min) {
    switch (layout) {
        case Layout::CircularCrossing:
            return gen_circular(seed, num_robots, num_humans, 4.0, d_min);
        case Layout::PerpendicularCrossing:
            return gen_perpendicular(seed, num_robots, num_humans, d_min);
        case Layout::Custom:
            break;
    }
    throw std::invalid_argument("gen_layout: custom layouts cannot be generated");
}

}  // namespace crowdgame

#include "crowdgame/sim/orca.hpp"

#include <cmath>
#include <limits>

namespace crowdgame {

namespace {

constexpr double kEpsilon = 1e-10;

double det(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Internal line form of a half-plane: feasible velocities lie to the
/// left of the directed line through `point`.
struct Line {
    Vec2 point{0.0, 0.0};
    Vec2 direction{1.0, 0.0};
};

Line to_line(const HalfPlane& plane) {
    return Line{plane.point, Vec2(-plane.normal.y(), plane.normal.x())};
}

bool linear_program1(const std::vector<Line>& lines, std::size_t line_no, double radius,
                     const Vec2& opt_velocity, bool direction_opt, Vec2& result) {
    const Line& line = lines[line_no];
    const double dot_product = line.point.dot(line.direction);
    const double discriminant =
        dot_product * dot_product + radius * radius - line.point.squaredNorm();
    if (discriminant < 0.0) return false;  // max-speed disc misses this line

    const double sqrt_discriminant = std::sqrt(discriminant);
    double t_left = -dot_product - sqrt_discriminant;
    double t_right = -dot_product + sqrt_discriminant;

    for (std::size_t i = 0; i < line_no; ++i) {
        const double denominator = det(line.direction, lines[i].direction);
        const double numerator = det(lines[i].direction, line.point - lines[i].point);
        if (std::fabs(denominator) <= kEpsilon) {
            if (numerator < 0.0) return false;  // parallel and fully infeasible
            continue;
        }
        const double t = numerator / denominator;
        if (denominator >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) return false;
    }

    double t = 0.0;
    if (direction_opt) {
        t = opt_velocity.dot(line.direction) > 0.0 ? t_right : t_left;
    } else {
        t = line.direction.dot(opt_velocity - line.point);
        t = std::min(std::max(t, t_left), t_right);
    }
    result = line.point + t * line.direction;
    return true;
}

std::size_t linear_program2(const std::vector<Line>& lines, double radius,
                            const Vec2& opt_velocity, bool direction_opt, Vec2& result) {
    if (direction_opt) {
        result = opt_velocity * radius;  // opt_velocity is a unit direction
    } else if (opt_velocity.squaredNorm() > radius * radius) {
        result = opt_velocity.normalized() * radius;
    } else {
        result = opt_velocity;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (det(lines[i].direction, lines[i].point - result) > 0.0) {
            const Vec2 temp = result;
            if (!linear_program1(lines, i, radius, opt_velocity, direction_opt, result)) {
                result = temp;
                return i;
            }
        }
    }
    return lines.size();
}

/// Least-violation fallback when the constraints are jointly infeasible:
/// progressively relaxes every constraint by the same margin.
void linear_program3(const std::vector<Line>& lines, std::size_t begin_line, double radius,
                     Vec2& result) {
    double distance = 0.0;
    for (std::size_t i = begin_line; i < lines.size(); ++i) {
        if (det(lines[i].direction, lines[i].point - result) <= distance) continue;
        std::vector<Line> proj_lines;
        for (std::size_t j = 0; j < i; ++j) {
            Line line;
            const double determinant = det(lines[i].direction, lines[j].direction);
            if (std::fabs(determinant) <= kEpsilon) {
                if (lines[i].direction.dot(lines[j].direction) > 0.0) continue;
                line.point = 0.5 * (lines[i].point + lines[j].point);
            } else {
                line.point = lines[i].point +
                             (det(lines[j].direction, lines[i].point - lines[j].point) /
                              determinant) *
                                 lines[i].direction;
            }
            line.direction = (lines[j].direction - lines[i].direction).normalized();
            proj_lines.push_back(line);
        }
        const Vec2 temp = result;
        if (linear_program2(proj_lines, radius,
                            Vec2(-lines[i].direction.y(), lines[i].direction.x()), true,
                            result) < proj_lines.size()) {
            result = temp;
        }
        distance = det(lines[i].direction, lines[i].point - result);
    }
}

}  // namespace

bool orca_half_plane(const OrcaAgent& agent, const Vec2& other_position,
                     const Vec2& other_velocity, double other_radius,
                     double responsibility, double tau, HalfPlane& out) {
    const Vec2 relative_position = other_position - agent.position;
    if (relative_position.norm() > agent.neighbor_distance) return false;
    const Vec2 relative_velocity = agent.velocity - other_velocity;
    const double dist_sq = relative_position.squaredNorm();
    const double combined_radius = agent.radius + other_radius + agent.safety_buffer;
    const double combined_radius_sq = combined_radius * combined_radius;

    Vec2 direction;
    Vec2 u;
    if (dist_sq > combined_radius_sq) {
        // No current overlap: clip the velocity obstacle at the horizon.
        const double inv_horizon = 1.0 / agent.time_horizon;
        const Vec2 w = relative_velocity - inv_horizon * relative_position;
        const double w_length_sq = w.squaredNorm();
        const double dot1 = w.dot(relative_position);
        if (dot1 < 0.0 && dot1 * dot1 > combined_radius_sq * w_length_sq) {
            // Closest to the cut-off arc.
            const double w_length = std::sqrt(w_length_sq);
            const Vec2 unit_w = w / w_length;
            direction = Vec2(unit_w.y(), -unit_w.x());
            u = (combined_radius * inv_horizon - w_length) * unit_w;
        } else {
            // Closest to one of the legs.
            const double leg = std::sqrt(dist_sq - combined_radius_sq);
            if (det(relative_position, w) > 0.0) {
                direction = Vec2(relative_position.x() * leg - relative_position.y() * combined_radius,
                                 relative_position.x() * combined_radius + relative_position.y() * leg) /
                            dist_sq;
            } else {
                direction = -Vec2(relative_position.x() * leg + relative_position.y() * combined_radius,
                                  -relative_position.x() * combined_radius + relative_position.y() * leg) /
                            dist_sq;
            }
            u = relative_velocity.dot(direction) * direction - relative_velocity;
        }
    } else {
        // Already overlapping: push apart within one sampling period.
        const double inv_tau = 1.0 / tau;
        const Vec2 w = relative_velocity - inv_tau * relative_position;
        const double w_length = w.norm();
        const Vec2 unit_w = w_length > kEpsilon ? Vec2(w / w_length) : Vec2(1.0, 0.0);
        direction = Vec2(unit_w.y(), -unit_w.x());
        u = (combined_radius * inv_tau - w_length) * unit_w;
    }

    out.point = agent.velocity + responsibility * u;
    out.normal = Vec2(direction.y(), -direction.x());
    return true;
}

Vec2 orca_velocity(const OrcaAgent& agent, const std::vector<HalfPlane>& planes,
                   const Vec2& preferred_velocity) {
    std::vector<Line> lines;
    lines.reserve(planes.size());
    for (const auto& plane : planes) lines.push_back(to_line(plane));

    Vec2 result;
    const std::size_t failed =
        linear_program2(lines, agent.max_speed, preferred_velocity, false, result);
    if (failed < lines.size()) {
        linear_program3(lines, failed, agent.max_speed, result);
    }
    return result;
}

std::vector<Vec2> orca_step(const std::vector<OrcaAgent>& agents,
                            const std::vector<OrcaObstacle>& obstacles, double tau) {
    std::vector<Vec2> new_velocities;
    new_velocities.reserve(agents.size());

    for (std::size_t a = 0; a < agents.size(); ++a) {
        const OrcaAgent& agent = agents[a];

        std::vector<HalfPlane> planes;
        HalfPlane plane;
        for (const auto& obstacle : obstacles) {
            if (orca_half_plane(agent, obstacle.position, obstacle.velocity, obstacle.radius,
                                1.0, tau, plane)) {
                planes.push_back(plane);
            }
        }
        for (std::size_t b = 0; b < agents.size(); ++b) {
            if (b == a) continue;
            if (orca_half_plane(agent, agents[b].position, agents[b].velocity,
                                agents[b].radius, 0.5, tau, plane)) {
                planes.push_back(plane);
            }
        }

        const Vec2 to_goal = agent.goal - agent.position;
        const double dist = to_goal.norm();
        Vec2 preferred = Vec2::Zero();
        if (dist > 1e-9) {
            preferred = to_goal / dist * std::min(agent.preferred_speed, dist / tau);
            // Deterministic tie-break: nudge the preference off exact
            // head-on symmetry.
            const Vec2 perp(-preferred.y(), preferred.x());
            preferred += 1e-6 * perp.normalized();
        }

        new_velocities.push_back(orca_velocity(agent, planes, preferred));
    }
    return new_velocities;
}

}  // namespace crowdgame

#ifndef CROWDGAME_SIM_ORCA_HPP
#define CROWDGAME_SIM_ORCA_HPP

#include <vector>

#include "crowdgame/core/types.hpp"

namespace crowdgame {

/// A circular agent stepped by reciprocal collision avoidance.
struct OrcaAgent {
    Vec2 position{0.0, 0.0};
    Vec2 velocity{0.0, 0.0};
    Vec2 goal{0.0, 0.0};
    double radius = 0.3;
    double preferred_speed = 1.0;
    double max_speed = 1.5;
    double time_horizon = 5.0;     // [s] look-ahead for velocity obstacles
    double neighbor_distance = 10.0;
    /// Extra clearance used while avoiding. The discrete step size and the
    /// least-violation fallback of jointly infeasible programs can shave
    /// fractions of a millimeter off the true radii; the buffer absorbs
    /// that so actual bodies never touch.
    double safety_buffer = 0.03;
};

/// Non-cooperating obstacle (a robot, from the pedestrians' view): the
/// avoiding agent takes full responsibility.
struct OrcaObstacle {
    Vec2 position{0.0, 0.0};
    Vec2 velocity{0.0, 0.0};
    double radius = 0.4;
};

/// Velocity-space constraint: feasible velocities v satisfy
/// dot(v - point, normal) <= 0.
struct HalfPlane {
    Vec2 point{0.0, 0.0};
    Vec2 normal{0.0, 1.0};  // outward unit normal
};

/// Builds the avoidance half-plane of `agent` against one neighbor.
/// `responsibility` is the fraction of the evasive correction this agent
/// takes (0.5 between reciprocating agents, 1.0 against obstacles).
/// Returns false when the neighbor is beyond the neighbor distance.
bool orca_half_plane(const OrcaAgent& agent, const Vec2& other_position,
                     const Vec2& other_velocity, double other_radius,
                     double responsibility, double tau, HalfPlane& out);

/// New velocity of one agent: the closest point to its preferred velocity
/// inside all half-planes and the max-speed disc, or the least-violation
/// velocity when the constraints are infeasible.
Vec2 orca_velocity(const OrcaAgent& agent, const std::vector<HalfPlane>& planes,
                   const Vec2& preferred_velocity);

/// One synchronous avoidance step for all agents: every pedestrian builds
/// half-planes against other pedestrians (shared responsibility) and the
/// obstacles (full responsibility), then picks its new velocity. Always
/// returns one velocity per agent.
std::vector<Vec2> orca_step(const std::vector<OrcaAgent>& agents,
                            const std::vector<OrcaObstacle>& obstacles, double tau);

}  // namespace crowdgame

#endif  // CROWDGAME_SIM_ORCA_HPP

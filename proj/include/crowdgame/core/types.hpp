#ifndef CROWDGAME_CORE_TYPES_HPP
#define CROWDGAME_CORE_TYPES_HPP

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace crowdgame {

using Vec2 = Eigen::Vector2d;

/// Acceleration command for one control interval [m/s^2].
using Control = Vec2;

enum class AgentKind { Robot, Human };

/// Global agent index: robots occupy 0..M-1, humans M..N-1.
struct AgentId {
    int index = 0;
    AgentKind kind = AgentKind::Robot;
};

inline AgentId agent_id_from_index(int global_index, int num_robots) {
    return AgentId{global_index,
                   global_index < num_robots ? AgentKind::Robot : AgentKind::Human};
}

struct RobotState {
    Vec2 position{0.0, 0.0};   // [m]
    Vec2 velocity{0.0, 0.0};   // [m/s]
};

/// One robot's control sequence over the horizon (length H).
struct Strategy {
    std::vector<Control> controls;

    int horizon() const { return static_cast<int>(controls.size()); }
    static Strategy zeros(int horizon) {
        Strategy s;
        s.controls.assign(static_cast<std::size_t>(horizon), Vec2::Zero());
        return s;
    }
};

/// The M-robot stacked strategy.
struct JointStrategy {
    std::vector<Strategy> per_robot;

    int num_robots() const { return static_cast<int>(per_robot.size()); }
    static JointStrategy zeros(int num_robots, int horizon) {
        JointStrategy j;
        j.per_robot.assign(static_cast<std::size_t>(num_robots), Strategy::zeros(horizon));
        return j;
    }
};

/// Rolling window of the last L position slices of all N agents,
/// ordered robots first, then humans. Oldest slice first.
class PositionHistory {
public:
    PositionHistory(int capacity, int num_agents)
        : capacity_(capacity), num_agents_(num_agents) {}

    /// Appends a slice of N positions, evicting the oldest once full.
    /// Throws std::invalid_argument if the slice arity is not N.
    void push(const std::vector<Vec2>& slice);

    bool warm() const { return static_cast<int>(slices_.size()) == capacity_; }
    int size() const { return static_cast<int>(slices_.size()); }
    int capacity() const { return capacity_; }
    int num_agents() const { return num_agents_; }

    /// k = 0 is the oldest stored slice, k = size()-1 the newest.
    const std::vector<Vec2>& slice(int k) const { return slices_.at(static_cast<std::size_t>(k)); }
    const std::vector<Vec2>& newest() const { return slices_.back(); }

private:
    int capacity_;
    int num_agents_;
    std::deque<std::vector<Vec2>> slices_;
};

/// All weights and physical constants of the MPC problem.
/// Pairwise quantities are stored as MxM symmetric matrices; the diagonal
/// is unused. Symmetry of omega_coll_robot and omega_floc is required for
/// the game to admit an exact potential.
struct CostParams {
    int H = 4;                      // control/prediction horizon [steps]
    int L = 8;                      // observation window [steps]
    double tau = 0.4;               // sampling period [s]
    double v_max = 1.0;             // speed bound per axis [m/s]
    double a_max = 2.0;             // acceleration bound per axis [m/s^2]
    double d_min = 0.8;             // minimum allowed distance [m]
    double rho = 0.5;               // speed-dependent margin factor
    double mu = 30.0;               // smoothed-max sharpness
    double delta_norm = 1e-6;       // norm smoothing [m^2]
    double delta_goal = 1e-3;       // goal-normalization offset [m]
    double omega_goal = 10.0;
    double omega_acce = 0.1;
    double omega_jerk = 0.1;
    double omega_coll_human = 1e7;
    double omega_vel = 1e7;         // weight of the soft speed-bound penalty
    Eigen::MatrixXd omega_coll_robot;  // MxM, symmetric
    Eigen::MatrixXd omega_floc;        // MxM, symmetric
    Eigen::MatrixXd d_flock;           // desired inter-robot distance [m], MxM, symmetric
    int j_max = 10;                 // iteration cap of the best-response loops
    double xi = 1e-3;               // potential-difference stopping tolerance
    double epsilon = 1e-3;          // epsilon-Nash tolerance
    double t_max = 25.0;            // episode time limit [s]

    /// Reference parameter set for a team of `num_robots` robots.
    static CostParams defaults(int num_robots);

    int num_robots() const { return static_cast<int>(omega_coll_robot.rows()); }
};

/// Checks every CostParams invariant; returns one message per violation.
std::vector<std::string> validate_params(const CostParams& p);

enum class Layout { CircularCrossing, PerpendicularCrossing, Custom };

std::string layout_name(Layout layout);
Layout layout_from_name(const std::string& name);

struct RobotSpec {
    Vec2 position{0.0, 0.0};
    Vec2 velocity{0.0, 0.0};
    Vec2 goal{0.0, 0.0};
};

struct HumanSpec {
    Vec2 position{0.0, 0.0};
    Vec2 goal{0.0, 0.0};
    double radius = 0.3;
    double preferred_speed = 1.0;
};

struct Scenario {
    std::vector<RobotSpec> robots;
    std::vector<HumanSpec> humans;
    Layout layout = Layout::Custom;
    std::uint64_t seed = 0;

    int num_robots() const { return static_cast<int>(robots.size()); }
    int num_humans() const { return static_cast<int>(humans.size()); }
    int num_agents() const { return num_robots() + num_humans(); }
};

/// Checks pairwise spacing of initial positions against d_min.
std::vector<std::string> validate_scenario(const Scenario& s, const CostParams& p);

}  // namespace crowdgame

#endif  // CROWDGAME_CORE_TYPES_HPP

#include "crowdgame/core/types.hpp"

#include <cmath>
#include <stdexcept>

namespace crowdgame {

void PositionHistory::push(const std::vector<Vec2>& slice) {
    if (static_cast<int>(slice.size()) != num_agents_) {
        throw std::invalid_argument("PositionHistory::push: slice has " +
                                    std::to_string(slice.size()) + " entries, expected " +
                                    std::to_string(num_agents_));
    }
    slices_.push_back(slice);
    while (static_cast<int>(slices_.size()) > capacity_) {
        slices_.pop_front();
    }
}

CostParams CostParams::defaults(int num_robots) {
    CostParams p;
    p.omega_coll_robot = Eigen::MatrixXd::Constant(num_robots, num_robots, 1e7);
    p.omega_floc = Eigen::MatrixXd::Constant(num_robots, num_robots, 10.0);
    p.d_flock = Eigen::MatrixXd::Constant(num_robots, num_robots, 1.2);
    return p;
}

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void check_symmetric_matrix(const Eigen::MatrixXd& m, const std::string& name,
                            bool strictly_positive, std::vector<std::string>& out) {
    if (m.rows() != m.cols()) {
        out.push_back(name + " must be square");
        return;
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (i == j) continue;
            const double v = m(i, j);
            if (!std::isfinite(v) || v < 0.0 || (strictly_positive && v == 0.0)) {
                out.push_back(name + "[" + std::to_string(i) + "][" + std::to_string(j) +
                              "] must be " + (strictly_positive ? "positive" : "nonnegative"));
            }
            if (j > i && m(i, j) != m(j, i)) {
                out.push_back(name + " must be symmetric: [" + std::to_string(i) + "][" +
                              std::to_string(j) + "] != [" + std::to_string(j) + "][" +
                              std::to_string(i) + "]");
            }
        }
    }
}

}  // namespace

std::vector<std::string> validate_params(const CostParams& p) {
    std::vector<std::string> v;
    if (p.H < 1) v.push_back("H must be >= 1");
    if (p.L < 2) v.push_back("L must be >= 2");
    if (!finite_positive(p.tau)) v.push_back("tau must be positive");
    if (!finite_positive(p.v_max)) v.push_back("v_max must be positive");
    if (!finite_positive(p.a_max)) v.push_back("a_max must be positive");
    if (!finite_positive(p.d_min)) v.push_back("d_min must be positive");
    if (!finite_positive(p.rho)) v.push_back("rho must be positive");
    if (!finite_positive(p.mu)) v.push_back("mu must be positive");
    if (!finite_positive(p.delta_norm)) v.push_back("delta_norm must be positive");
    if (!finite_positive(p.delta_goal)) v.push_back("delta_goal must be positive");
    if (!(std::isfinite(p.omega_goal) && p.omega_goal >= 0.0)) v.push_back("omega_goal must be nonnegative");
    if (!(std::isfinite(p.omega_acce) && p.omega_acce >= 0.0)) v.push_back("omega_acce must be nonnegative");
    if (!(std::isfinite(p.omega_jerk) && p.omega_jerk >= 0.0)) v.push_back("omega_jerk must be nonnegative");
    if (!(std::isfinite(p.omega_coll_human) && p.omega_coll_human >= 0.0)) {
        v.push_back("omega_coll_human must be nonnegative");
    }
    if (!(std::isfinite(p.omega_vel) && p.omega_vel >= 0.0)) v.push_back("omega_vel must be nonnegative");
    check_symmetric_matrix(p.omega_coll_robot, "omega_coll_robot", false, v);
    check_symmetric_matrix(p.omega_floc, "omega_floc", false, v);
    check_symmetric_matrix(p.d_flock, "d_flock", true, v);
    if (p.j_max < 1) v.push_back("j_max must be >= 1");
    if (!finite_positive(p.xi)) v.push_back("xi must be positive");
    if (!finite_positive(p.epsilon)) v.push_back("epsilon must be positive");
    if (!finite_positive(p.t_max)) v.push_back("T_max must be positive");
    return v;
}

std::string layout_name(Layout layout) {
    switch (layout) {
        case Layout::CircularCrossing: return "circular";
        case Layout::PerpendicularCrossing: return "perpendicular";
        case Layout::Custom: return "custom";
    }
    return "custom";
}

Layout layout_from_name(const std::string& name) {
    if (name == "circular") return Layout::CircularCrossing;
    if (name == "perpendicular") return Layout::PerpendicularCrossing;
    if (name == "custom") return Layout::Custom;
    throw std::invalid_argument("unknown layout '" + name +
                                "' (expected circular, perpendicular or custom)");
}

std::vector<std::string> validate_scenario(const Scenario& s, const CostParams& p) {
    std::vector<std::string> v;
    std::vector<Vec2> starts;
    for (const auto& r : s.robots) starts.push_back(r.position);
    for (const auto& h : s.humans) starts.push_back(h.position);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        for (std::size_t j = i + 1; j < starts.size(); ++j) {
            const double d = (starts[i] - starts[j]).norm();
            if (d < p.d_min) {
                v.push_back("agents " + std::to_string(i) + " and " + std::to_string(j) +
                            " start " + std::to_string(d) + " m apart (< d_min)");
            }
        }
    }
    if (p.num_robots() != s.num_robots()) {
        v.push_back("pairwise parameter matrices are sized for " +
                    std::to_string(p.num_robots()) + " robots, scenario has " +
                    std::to_string(s.num_robots()));
    }
    return v;
}

}  // namespace crowdgame

#ifndef CROWDGAME_SOLVER_SOLVER_HPP
#define CROWDGAME_SOLVER_SOLVER_HPP

#include <functional>
#include <stdexcept>
#include <utility>

#include <Eigen/Core>

namespace crowdgame {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Objective callback: returns f(u); fills *grad with the gradient when
/// grad is non-null.
using BoxObjective = std::function<double(const Eigen::VectorXd& u, Eigen::VectorXd* grad)>;

struct SolveOptions {
    double gtol = 1e-6;        // sup-norm of the projected gradient step
    int max_iterations = 200;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int memory = 8;            // limited-memory curvature pairs
};

struct SolveReport {
    double objective = 0.0;
    int iterations = 0;
    double projected_gradient_norm = 0.0;
    bool converged = false;
    double wall_time_s = 0.0;
    int function_evals = 0;
    bool monotone = true;      // accepted iterates never increased f
};

/// Projected-gradient descent with limited-memory quasi-Newton scaling and
/// Armijo backtracking on the box lo <= u <= hi. Deterministic: identical
/// inputs produce identical iterates. Every iterate is feasible.
///
/// Throws SolverError if the objective or gradient turns non-finite at a
/// visited point.
std::pair<Eigen::VectorXd, SolveReport> minimize_box(const BoxObjective& f,
                                                     const Eigen::VectorXd& lo,
                                                     const Eigen::VectorXd& hi,
                                                     const Eigen::VectorXd& u0,
                                                     const SolveOptions& options = {});

/// Central finite differences; test oracle for analytic gradients.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& u, double h = 1e-5);

}  // namespace crowdgame

#endif  // CROWDGAME_SOLVER_SOLVER_HPP

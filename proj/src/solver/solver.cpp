#include "crowdgame/solver/solver.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <string>

namespace crowdgame {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& u, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
    return u.cwiseMax(lo).cwiseMin(hi);
}

struct CurvaturePair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

/// Standard two-loop recursion on the masked gradient. Components listed
/// in `blocked` are frozen at their bounds and excluded from the step.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& grad,
                                const Eigen::Array<bool, Eigen::Dynamic, 1>& blocked,
                                const std::deque<CurvaturePair>& pairs) {
    Eigen::VectorXd q = blocked.select(Eigen::VectorXd::Zero(grad.size()), grad);
    std::vector<double> alpha(pairs.size(), 0.0);
    for (std::size_t idx = pairs.size(); idx-- > 0;) {
        const auto& p = pairs[idx];
        alpha[idx] = p.rho * p.s.dot(q);
        q -= alpha[idx] * p.y;
    }
    if (!pairs.empty()) {
        const auto& last = pairs.back();
        const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
        q *= gamma;
    }
    for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
        const auto& p = pairs[idx];
        const double beta = p.rho * p.y.dot(q);
        q += (alpha[idx] - beta) * p.s;
    }
    q = blocked.select(Eigen::VectorXd::Zero(grad.size()), q);
    return -q;
}

}  // namespace

std::pair<Eigen::VectorXd, SolveReport> minimize_box(const BoxObjective& f,
                                                     const Eigen::VectorXd& lo,
                                                     const Eigen::VectorXd& hi,
                                                     const Eigen::VectorXd& u0,
                                                     const SolveOptions& options) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::Index n = u0.size();
    if (lo.size() != n || hi.size() != n) throw SolverError("minimize_box: bound size mismatch");
    if ((lo.array() > hi.array()).any()) throw SolverError("minimize_box: lo > hi");

    SolveReport report;
    auto check_finite = [&](double value, const Eigen::VectorXd* grad) {
        if (!std::isfinite(value) || (grad != nullptr && !grad->allFinite())) {
            throw SolverError("minimize_box: non-finite objective or gradient at iteration " +
                              std::to_string(report.iterations));
        }
    };
    auto eval = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
        ++report.function_evals;
        const double value = f(u, grad);
        check_finite(value, grad);
        return value;
    };

    Eigen::VectorXd u = clamp(u0, lo, hi);
    Eigen::VectorXd grad(n);
    double fu = eval(u, &grad);
    std::deque<CurvaturePair> pairs;

    auto projected_gradient_norm = [&](const Eigen::VectorXd& point, const Eigen::VectorXd& g) {
        return (clamp(point - g, lo, hi) - point).lpNorm<Eigen::Infinity>();
    };

    const double tiny = 1e-10;
    for (; report.iterations < options.max_iterations; ++report.iterations) {
        report.projected_gradient_norm = projected_gradient_norm(u, grad);
        if (report.projected_gradient_norm <= options.gtol) {
            report.converged = true;
            break;
        }

        Eigen::Array<bool, Eigen::Dynamic, 1> blocked(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            blocked(i) = (u(i) <= lo(i) + tiny && grad(i) > 0.0) ||
                         (u(i) >= hi(i) - tiny && grad(i) < 0.0);
        }

        Eigen::VectorXd direction = lbfgs_direction(grad, blocked, pairs);
        bool steepest = false;
        if (!direction.allFinite() || grad.dot(direction) >= 0.0) {
            direction = -blocked.select(Eigen::VectorXd::Zero(n), grad);
            steepest = true;
        }
        if (direction.lpNorm<Eigen::Infinity>() == 0.0) {
            report.converged = report.projected_gradient_norm <= options.gtol;
            break;
        }

        // Armijo search along the projected arc: backtrack on failure,
        // and when the first trial already passes, expand the step while
        // it keeps improving (short quasi-Newton steps would otherwise
        // stall the memory with non-descent secant pairs).
        auto armijo_at = [&](const Eigen::VectorXd& dir, double alpha,
                             Eigen::VectorXd& candidate, double& f_cand) {
            candidate = clamp(u + alpha * dir, lo, hi);
            const Eigen::VectorXd step = candidate - u;
            if (step.lpNorm<Eigen::Infinity>() == 0.0) return false;
            f_cand = eval(candidate, nullptr);
            // min(0, .) keeps descent strict even when clamping bends the
            // step against the gradient.
            return f_cand <= fu + options.armijo_c * std::min(0.0, grad.dot(step));
        };
        auto search = [&](const Eigen::VectorXd& dir, double alpha0, Eigen::VectorXd& u_next,
                          double& f_next) {
            double alpha = alpha0;
            Eigen::VectorXd candidate;
            double f_cand = 0.0;
            if (armijo_at(dir, alpha, candidate, f_cand)) {
                u_next = candidate;
                f_next = f_cand;
                for (int growth = 0; growth < 40; ++growth) {
                    alpha /= options.backtrack;
                    if (!armijo_at(dir, alpha, candidate, f_cand) || f_cand >= f_next) break;
                    u_next = candidate;
                    f_next = f_cand;
                }
                return true;
            }
            while (alpha > 1e-18) {
                alpha *= options.backtrack;
                if (armijo_at(dir, alpha, candidate, f_cand)) {
                    u_next = candidate;
                    f_next = f_cand;
                    return true;
                }
            }
            return false;
        };

        const double alpha0 = pairs.empty() && steepest
                                  ? 1.0 / std::max(1.0, grad.lpNorm<Eigen::Infinity>())
                                  : 1.0;
        Eigen::VectorXd u_next;
        double f_next = 0.0;
        bool accepted = search(direction, alpha0, u_next, f_next);
        if (!accepted && !steepest) {
            const Eigen::VectorXd fallback = -blocked.select(Eigen::VectorXd::Zero(n), grad);
            accepted = search(fallback, 1.0 / std::max(1.0, grad.lpNorm<Eigen::Infinity>()),
                              u_next, f_next);
        }
        if (!accepted) break;  // no further progress along any descent direction

        if (f_next > fu) report.monotone = false;
        Eigen::VectorXd grad_next(n);
        const double f_check = eval(u_next, &grad_next);
        (void)f_check;

        CurvaturePair pair;
        pair.s = u_next - u;
        pair.y = grad_next - grad;
        const double sy = pair.s.dot(pair.y);
        if (sy > 1e-12 * pair.s.norm() * pair.y.norm()) {
            pair.rho = 1.0 / sy;
            pairs.push_back(std::move(pair));
            while (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
        }
        u = std::move(u_next);
        grad = std::move(grad_next);
        fu = f_next;
    }

    report.projected_gradient_norm = projected_gradient_norm(u, grad);
    if (report.projected_gradient_norm <= options.gtol) report.converged = true;
    report.objective = fu;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {u, report};
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& u, double h) {
    Eigen::VectorXd grad(u.size());
    Eigen::VectorXd probe = u;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        probe(i) = u(i) + h;
        const double f_plus = f(probe);
        probe(i) = u(i) - h;
        const double f_minus = f(probe);
        probe(i) = u(i);
        grad(i) = (f_plus - f_minus) / (2.0 * h);
    }
    return grad;
}

}  // namespace crowdgame

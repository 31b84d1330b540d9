#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crowdgame/solver/solver.hpp"

using namespace crowdgame;

namespace {

BoxObjective shifted_quadratic(const Eigen::VectorXd& center) {
    return [center](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
        if (grad != nullptr) *grad = 2.0 * (u - center);
        return (u - center).squaredNorm();
    };
}

}  // namespace

TEST_CASE("quadratic with an interior optimum") {
    Eigen::VectorXd center(4);
    center << 0.3, -0.7, 1.1, 0.0;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(4, -2.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(4, 2.0);
    const auto [u, report] = minimize_box(shifted_quadratic(center), lo, hi,
                                          Eigen::VectorXd::Zero(4));
    CHECK(report.converged);
    CHECK((u - center).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(report.monotone);
}

TEST_CASE("quadratic with the optimum outside the box clamps componentwise") {
    Eigen::VectorXd center(3);
    center << 5.0, -4.0, 0.25;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(3, 1.0);
    const auto [u, report] = minimize_box(shifted_quadratic(center), lo, hi,
                                          Eigen::VectorXd::Zero(3));
    CHECK(report.converged);
    CHECK(std::abs(u(0) - 1.0) < 1e-8);
    CHECK(std::abs(u(1) + 1.0) < 1e-8);
    CHECK(std::abs(u(2) - 0.25) < 1e-8);
    // Solution is inside the box exactly.
    CHECK(u(0) <= 1.0);
    CHECK(u(1) >= -1.0);
}

TEST_CASE("Rosenbrock on a box from the classic start") {
    const BoxObjective rosenbrock = [](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
        const double x = u(0);
        const double y = u(1);
        if (grad != nullptr) {
            (*grad)(0) = -400.0 * x * (y - x * x) - 2.0 * (1.0 - x);
            (*grad)(1) = 200.0 * (y - x * x);
        }
        const double a = y - x * x;
        const double b = 1.0 - x;
        return 100.0 * a * a + b * b;
    };
    Eigen::VectorXd u0(2);
    u0 << -1.2, 1.0;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -2.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 2.0);
    const auto [u, report] = minimize_box(rosenbrock, lo, hi, u0);
    CHECK(std::abs(u(0) - 1.0) < 1e-4);
    CHECK(std::abs(u(1) - 1.0) < 1e-4);
    CHECK(report.monotone);
    CHECK(report.iterations <= 200);
}

TEST_CASE("iterates never leave the box") {
    // The objective itself checks feasibility at every visited point.
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -0.5);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 0.5);
    const BoxObjective f = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
        CHECK(u(0) >= lo(0) - 0.0);
        CHECK(u(0) <= hi(0) + 0.0);
        CHECK(u(1) >= lo(1) - 0.0);
        CHECK(u(1) <= hi(1) + 0.0);
        if (grad != nullptr) *grad = 2.0 * (u - Eigen::Vector2d(3.0, -3.0));
        return (u - Eigen::Vector2d(3.0, -3.0)).squaredNorm();
    };
    const auto [u, report] = minimize_box(f, lo, hi, Eigen::VectorXd::Zero(2));
    CHECK(u(0) == doctest::Approx(0.5));
    CHECK(u(1) == doctest::Approx(-0.5));
}

TEST_CASE("identical inputs produce identical outputs") {
    Eigen::VectorXd center(6);
    center << 1.0, -2.0, 0.5, 0.1, -0.9, 4.0;
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(6, -1.5);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(6, 1.5);
    const BoxObjective f = [&](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
        if (grad != nullptr) {
            *grad = 2.0 * (u - center) + Eigen::VectorXd::Constant(6, 0.3);
            for (int i = 0; i < 6; ++i) (*grad)(i) += 0.2 * std::sin(3.0 * u(i)) * 3.0 * 0.0;
        }
        return (u - center).squaredNorm() + 0.3 * u.sum();
    };
    const auto [u1, r1] = minimize_box(f, lo, hi, Eigen::VectorXd::Zero(6));
    const auto [u2, r2] = minimize_box(f, lo, hi, Eigen::VectorXd::Zero(6));
    CHECK((u1 - u2).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(r1.iterations == r2.iterations);
    CHECK(r1.function_evals == r2.function_evals);
}

TEST_CASE("non-finite objective aborts with a diagnostic") {
    const BoxObjective bad = [](const Eigen::VectorXd& u, Eigen::VectorXd* grad) {
        if (grad != nullptr) *grad = Eigen::VectorXd::Constant(u.size(), -1.0);
        return u(0) > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -u(0);
    };
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(1, 0.0);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(1, 1.0);
    CHECK_THROWS_AS(minimize_box(bad, lo, hi, Eigen::VectorXd::Zero(1)), SolverError);
}

TEST_CASE("finite-difference oracle") {
    SUBCASE("squared norm") {
        Eigen::VectorXd u(2);
        u << 1.0, 2.0;
        const auto g = fd_gradient([](const Eigen::VectorXd& v) { return v.squaredNorm(); }, u);
        CHECK(std::abs(g(0) - 2.0) < 1e-8);
        CHECK(std::abs(g(1) - 4.0) < 1e-8);
    }
    SUBCASE("constant function") {
        Eigen::VectorXd u(3);
        u << -1.0, 0.0, 1.0;
        const auto g = fd_gradient([](const Eigen::VectorXd&) { return 3.5; }, u);
        CHECK(g.lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("matches an analytic chain through a smooth nonlinearity") {
        Eigen::VectorXd u(2);
        u << 0.3, -0.6;
        const auto f = [](const Eigen::VectorXd& v) {
            return std::log1p(std::exp(3.0 * v(0) + 2.0 * v(1)));
        };
        const double sigma = 1.0 / (1.0 + std::exp(-(3.0 * u(0) + 2.0 * u(1))));
        const auto g = fd_gradient(f, u);
        CHECK(std::abs(g(0) - 3.0 * sigma) < 1e-7);
        CHECK(std::abs(g(1) - 2.0 * sigma) < 1e-7);
    }
}

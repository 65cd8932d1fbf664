// The quasi-Newton minimizer and the Adam stepper.
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "flea/optim.hpp"

using namespace flea;

namespace {

// convex quadratic 0.5 * (x - c)' A (x - c) with fixed SPD A
struct Quadratic {
  Eigen::MatrixXd A;
  Eigen::VectorXd c;

  static Quadratic make(int dim) {
    Quadratic q;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) B(i, j) = std::sin(1.0 + i * dim + j);
    q.A = B.transpose() * B + Eigen::MatrixXd::Identity(dim, dim);
    q.c = Eigen::VectorXd::LinSpaced(dim, -2.0, 3.0);
    return q;
  }

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    Eigen::VectorXd r = x - c;
    grad = A * r;
    return 0.5 * r.dot(grad);
  }
};

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
  double a = 1.0 - x(0);
  double b = x(1) - x(0) * x(0);
  grad.resize(2);
  grad(0) = -2.0 * a - 400.0 * x(0) * b;
  grad(1) = 200.0 * b;
  return a * a + 100.0 * b * b;
}

}  // namespace

TEST_CASE("quasi-Newton minimizer solves a quadratic to gradient tolerance") {
  auto q = Quadratic::make(6);
  OptimizerBudget budget;
  OptimResult res = minimize_lbfgs(q, Eigen::VectorXd::Zero(6), budget);
  CHECK(res.converged);
  CHECK(res.grad_inf_norm <= budget.gradient_tolerance);
  CHECK((res.x - q.c).cwiseAbs().maxCoeff() < 1e-5);
  CHECK(res.iterations < budget.max_iterations);
}

TEST_CASE("minimizer handles the classic banana valley") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  OptimizerBudget budget;
  OptimResult res = minimize_lbfgs(rosenbrock, x0, budget);
  CHECK(res.converged);
  CHECK(res.x(0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(res.x(1) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("objective history never increases across accepted steps") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  OptimResult res = minimize_lbfgs(rosenbrock, x0, OptimizerBudget{});
  REQUIRE(res.value_history.size() >= 2);
  for (std::size_t i = 1; i < res.value_history.size(); ++i)
    CHECK(res.value_history[i] <= res.value_history[i - 1]);
  CHECK(res.value == doctest::Approx(res.value_history.back()));
}

TEST_CASE("iteration budget is a hard cap") {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  OptimizerBudget budget;
  budget.max_iterations = 3;
  OptimResult res = minimize_lbfgs(rosenbrock, x0, budget);
  CHECK(res.iterations <= 3);
  CHECK_FALSE(res.converged);
}

TEST_CASE("minimization is deterministic") {
  auto q = Quadratic::make(5);
  OptimResult r1 = minimize_lbfgs(q, Eigen::VectorXd::Ones(5), OptimizerBudget{});
  OptimResult r2 = minimize_lbfgs(q, Eigen::VectorXd::Ones(5), OptimizerBudget{});
  CHECK(r1.iterations == r2.iterations);
  CHECK((r1.x - r2.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r1.value == r2.value);
}

TEST_CASE("starting at the optimum converges immediately") {
  auto q = Quadratic::make(4);
  OptimResult res = minimize_lbfgs(q, q.c, OptimizerBudget{});
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK(res.value == doctest::Approx(0.0));
}

TEST_CASE("Adam walks downhill on a quadratic") {
  auto q = Quadratic::make(3);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd grad(3);
  double first = q(u, grad);
  Adam opt(3, 0.05);
  for (int t = 0; t < 2000; ++t) {
    q(u, grad);
    opt.step(u, grad);
  }
  double last = q(u, grad);
  CHECK(last < 0.01 * first);
  CHECK((u - q.c).cwiseAbs().maxCoeff() < 0.05);
}

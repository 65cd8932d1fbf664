// Deterministic smooth minimization: limited-memory BFGS with Armijo
// backtracking (used by every logistic-type objective in the project) and a
// plain Adam stepper (used by the adversarial trainer). No randomness, no
// threads; identical inputs give identical iterates.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "flea/common.hpp"

namespace flea {

struct OptimizerBudget {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // stop when max-abs of gradient drops below
  int lbfgs_memory = 10;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_line_search = 50;
};

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_inf_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> value_history;  // objective at x0 and after each accepted step
};

// objective: double f(const VectorXd& x, VectorXd& grad_out)
template <typename F>
OptimResult minimize_lbfgs(F&& f, Eigen::VectorXd x0, const OptimizerBudget& budget) {
  const int n = static_cast<int>(x0.size());
  OptimResult res;
  res.x = std::move(x0);

  Eigen::VectorXd grad(n), new_grad(n);
  double value = f(res.x, grad);
  res.value_history.push_back(value);

  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;

  for (int iter = 0; iter < budget.max_iterations; ++iter) {
    res.grad_inf_norm = grad.cwiseAbs().maxCoeff();
    if (res.grad_inf_norm <= budget.gradient_tolerance) {
      res.converged = true;
      break;
    }

    // two-loop recursion for the quasi-Newton direction
    Eigen::VectorXd q = grad;
    const int m = static_cast<int>(s_hist.size());
    std::vector<double> alpha(static_cast<std::size_t>(m));
    for (int i = m - 1; i >= 0; --i) {
      alpha[static_cast<std::size_t>(i)] =
          rho_hist[static_cast<std::size_t>(i)] * s_hist[static_cast<std::size_t>(i)].dot(q);
      q -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
    }
    if (m > 0) {
      const auto& s = s_hist.back();
      const auto& y = y_hist.back();
      q *= s.dot(y) / y.dot(y);
    }
    for (int i = 0; i < m; ++i) {
      double beta = rho_hist[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)].dot(q);
      q += (alpha[static_cast<std::size_t>(i)] - beta) * s_hist[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd dir = -q;

    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {  // not a descent direction; fall back to steepest descent
      dir = -grad;
      slope = -grad.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    // Armijo backtracking
    double step = (iter == 0 && m == 0) ? 1.0 / std::max(1.0, grad.norm()) : 1.0;
    double new_value = value;
    bool accepted = false;
    Eigen::VectorXd x_try;
    for (int ls = 0; ls < budget.max_line_search; ++ls) {
      x_try = res.x + step * dir;
      new_value = f(x_try, new_grad);
      if (std::isfinite(new_value) && new_value <= value + budget.armijo_c * step * slope) {
        accepted = true;
        break;
      }
      step *= budget.backtrack;
    }
    if (!accepted) break;  // objective is flat (or kinked) beyond resolution; stop

    Eigen::VectorXd s = x_try - res.x;
    Eigen::VectorXd y = new_grad - grad;
    double ys = y.dot(s);
    if (ys > 1e-12 * y.norm() * s.norm()) {  // keep the Hessian estimate positive definite
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / ys);
      if (static_cast<int>(s_hist.size()) > budget.lbfgs_memory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }

    res.x = std::move(x_try);
    grad = new_grad;
    value = new_value;
    res.value_history.push_back(value);
    res.iterations = iter + 1;
  }

  res.value = value;
  res.grad_inf_norm = grad.cwiseAbs().maxCoeff();
  if (res.grad_inf_norm <= budget.gradient_tolerance) res.converged = true;
  return res;
}

// Minimal Adam stepper; u is updated in place with gradient g.
struct Adam {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Eigen::VectorXd m, v;
  int t = 0;

  explicit Adam(int dim, double learning_rate = 0.001)
      : lr(learning_rate), m(Eigen::VectorXd::Zero(dim)), v(Eigen::VectorXd::Zero(dim)) {}

  void step(Eigen::VectorXd& u, const Eigen::VectorXd& g) {
    ++t;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
    double bc1 = 1.0 - std::pow(beta1, t);
    double bc2 = 1.0 - std::pow(beta2, t);
    u -= (lr / bc1) * m.cwiseQuotient(((v / bc2).cwiseSqrt().array() + eps).matrix());
  }
};

}  // namespace flea

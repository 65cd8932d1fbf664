// Weighted logistic regression. The objective is
//   sum_i wt_i * [ y_i log(1 + e^{-c_i}) + (1 - y_i) log(1 + e^{c_i}) ] + l2 * |w|^2
// with c_i the raw score clipped to [-20, 20] (scores are always clipped
// before exponentials) and the bias excluded from the penalty. Training is
// deterministic: fixed initialization, quasi-Newton minimization.
#pragma once

#include <Eigen/Dense>

#include "flea/dataset.hpp"
#include "flea/model.hpp"
#include "flea/optim.hpp"

namespace flea {

// parameter layout everywhere: theta = [w(0..d-1); b]
struct LogisticObjective {
  const Eigen::MatrixXd& X;
  Eigen::VectorXd y;   // labels as doubles
  Eigen::VectorXd wt;  // per-sample weights (nonnegative, positive sum)
  double l2 = 0.0;

  double operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const int d = static_cast<int>(X.cols());
    Eigen::VectorXd w = theta.head(d);
    double b = theta(d);

    Eigen::ArrayXd g = (X * w).array() + b;
    Eigen::ArrayXd c = g.max(-kScoreClip).min(kScoreClip);
    Eigen::ArrayXd sig = 1.0 / (1.0 + (-c).exp());
    Eigen::ArrayXd ya = y.array();
    double loss = (wt.array() * (ya * (1.0 + (-c).exp()).log() +
                                 (1.0 - ya) * (1.0 + c.exp()).log()))
                      .sum() +
                  l2 * w.squaredNorm();

    // the clip zeroes the per-sample gradient outside the active interval
    Eigen::ArrayXd inside = ((g >= -kScoreClip) && (g <= kScoreClip)).cast<double>();
    Eigen::ArrayXd r = wt.array() * (sig - ya) * inside;
    grad.resize(d + 1);
    grad.head(d) = X.transpose() * r.matrix() + 2.0 * l2 * w;
    grad(d) = r.sum();
    return loss;
  }
};

struct LogisticFit {
  LinearModel model;
  OptimResult opt;
};

inline LogisticFit train_logistic_raw(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                      const Eigen::VectorXd& sample_weights, double l2,
                                      const OptimizerBudget& budget,
                                      const Eigen::VectorXd* theta0 = nullptr) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  require(n > 0, "value", "logistic training needs at least one row");
  require(y.size() == n && sample_weights.size() == n, "value",
          "logistic training size mismatch");
  require(l2 >= 0.0, "value", "negative ridge strength");
  double wsum = 0.0;
  for (int i = 0; i < n; ++i) {
    require(sample_weights(i) >= 0.0, "value", "negative sample weight");
    wsum += sample_weights(i);
  }
  require(wsum > 0.0, "value", "sample weights sum to zero");

  LogisticObjective obj{X, y, sample_weights, l2};
  Eigen::VectorXd start = theta0 ? *theta0 : Eigen::VectorXd::Zero(d + 1);
  require(start.size() == d + 1, "value", "bad warm-start size");
  OptimResult r = minimize_lbfgs(obj, start, budget);

  LogisticFit fit;
  fit.model.weights = r.x.head(d);
  fit.model.bias = r.x(d);
  fit.opt = std::move(r);
  return fit;
}

// Uniform-weight convenience on an encoded dataset.
inline LogisticFit train_logistic(const Dataset& d, double l2, const OptimizerBudget& budget,
                                  const Eigen::VectorXd* theta0 = nullptr) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(d.n(), 1.0 / d.n());
  LogisticFit fit = train_logistic_raw(d.features, d.labels.cast<double>(), w, l2, budget, theta0);
  if (d.schema) fit.model.schema_hash = d.schema->hash();
  return fit;
}

inline LogisticFit train_logistic_weighted(const Dataset& d, const Eigen::VectorXd& sample_weights,
                                           double l2, const OptimizerBudget& budget,
                                           const Eigen::VectorXd* theta0 = nullptr) {
  LogisticFit fit =
      train_logistic_raw(d.features, d.labels.cast<double>(), sample_weights, l2, budget, theta0);
  if (d.schema) fit.model.schema_hash = d.schema->hash();
  return fit;
}

}  // namespace flea

// Pairwise dataset dissimilarities: protected-group disbalance (exact),
// discrepancy via the label-flip reduction, disparity via weighted
// protected-attribute prediction with a parity regularizer on the second set
// (symmetrized by max). Also exact 1-D threshold-classifier oracles used by
// the tests to certify the estimators.
#pragma once

#include <algorithm>
#include <vector>

#include "flea/learners.hpp"
#include "flea/logistic.hpp"

namespace flea {

struct PairScore {
  double disc = 0.0;
  double disp = 0.0;
  double disb = 0.0;
  double d_score = 0.0;
};

struct DScoreConfig {
  double eta_disparity = 1.0;
  OptimizerBudget budget;

  void check() const { require(eta_disparity > 0.0, "config", "eta_disparity must be positive"); }
};

// |n1^{a=1}/n1 - n2^{a=1}/n2|
inline double disbalance(const Dataset& s1, const Dataset& s2) {
  require(s1.n() > 0 && s2.n() > 0, "value", "disbalance of empty dataset");
  return std::abs(s1.group_fraction() - s2.group_fraction());
}

// Trains a classifier to tell the two samples apart via flipped labels; a
// weighted training error E below 1/2 certifies a risk gap of 1 - 2E.
inline double estimate_discrepancy(const Dataset& s1, const Dataset& s2,
                                   const DScoreConfig& cfg) {
  cfg.check();
  require(s1.n() > 0 && s2.n() > 0, "value", "discrepancy of empty dataset");
  require(s1.dim() == s2.dim(), "value", "discrepancy dimension mismatch");
  const int n1 = s1.n(), n2 = s2.n(), d = s1.dim();

  Eigen::MatrixXd X(n1 + n2, d);
  X.topRows(n1) = s1.features;
  X.bottomRows(n2) = s2.features;
  Eigen::VectorXd y(n1 + n2), wt(n1 + n2);
  for (int i = 0; i < n1; ++i) {
    y(i) = s1.labels(i);
    wt(i) = 0.5 / n1;
  }
  for (int i = 0; i < n2; ++i) {
    y(n1 + i) = 1 - s2.labels(i);  // label flip on the second sample
    wt(n1 + i) = 0.5 / n2;
  }

  LogisticFit fit = train_logistic_raw(X, y, wt, 0.0, cfg.budget);
  Eigen::VectorXd sc = (X * fit.model.weights).array() + fit.model.bias;
  double err = 0.0;
  for (int i = 0; i < n1 + n2; ++i) {
    int dec = sc(i) > 0.0 ? 1 : 0;
    if (dec != static_cast<int>(y(i))) err += wt(i);
  }
  return clip(1.0 - 2.0 * err, 0.0, 1.0);
}

namespace detail {

// Features the attribute predictor is allowed to read: everything except the
// protected mirror column. Predicting a from a copy of a would drive both
// parity violations to 1 and erase the gap the estimate is built on.
inline Eigen::MatrixXd unprotected_features(const Dataset& s) {
  if (!(s.schema && s.schema->include_protected_in_features)) return s.features;
  const int p = s.schema->protected_feature_index();
  Eigen::MatrixXd X(s.n(), s.dim() - 1);
  int c = 0;
  for (int j = 0; j < s.dim(); ++j)
    if (j != p) X.col(c++) = s.features.col(j);
  return X;
}

// |positive-decision rate over a=1 minus rate over a=0| for hard decisions
// score > 0 on an explicit feature matrix.
inline double hard_rate_gap(const Eigen::MatrixXd& X, const Eigen::VectorXi& prot,
                            const Eigen::VectorXd& w, double b) {
  Eigen::VectorXd sc = (X * w).array() + b;
  double pos1 = 0.0, pos0 = 0.0;
  int c1 = 0, c0 = 0;
  for (int i = 0; i < X.rows(); ++i) {
    double dec = sc(i) > 0.0 ? 1.0 : 0.0;
    if (prot(i) == 1) {
      pos1 += dec;
      ++c1;
    } else {
      pos0 += dec;
      ++c0;
    }
  }
  require(c1 > 0 && c0 > 0, "value", "rate gap needs both protected groups");
  return std::abs(pos1 / c1 - pos0 / c0);
}

// One direction of the disparity estimate: fit a protected-attribute
// predictor on s_fit (group-balanced weights, parity regularizer evaluated
// on s_reg), then report the gap between the two hard-decision parity
// violations. Any fitted hypothesis lower-bounds the true supremum, so the
// estimate can undershoot but never overshoot it.
inline double disparity_one_direction(const Dataset& s_fit, const Dataset& s_reg,
                                      const DScoreConfig& cfg) {
  const int n = s_fit.n();
  int n1 = s_fit.group_count(1), n0 = s_fit.group_count(0);
  require(n1 > 0 && n0 > 0, "value", "disparity needs both groups in the fit set");

  Eigen::MatrixXd Xfit = unprotected_features(s_fit);
  Eigen::MatrixXd Xreg = unprotected_features(s_reg);
  require(Xfit.cols() == Xreg.cols(), "value", "disparity dimension mismatch");
  const int d = static_cast<int>(Xfit.cols());

  Eigen::VectorXd target = s_fit.protected_attr.cast<double>();
  Eigen::VectorXd wt(n);
  for (int i = 0; i < n; ++i) wt(i) = 0.5 / (s_fit.protected_attr(i) == 1 ? n1 : n0);

  LogisticObjective base{Xfit, target, wt, 0.0};
  GroupConfidenceGap gap = GroupConfidenceGap::build(Xreg, s_reg.protected_attr, 1e-8);
  double eta = cfg.eta_disparity;
  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    double v = base(theta, grad);
    Eigen::VectorXd g2;
    double p = gap.value_and_grad(theta, g2);
    grad += eta * g2;
    return v + eta * p;
  };

  // Deterministic warm start at a lightly ridge-regularized fit. Starting
  // from zero instead would wedge the line search against the regularizer,
  // whose smoothing constant makes it razor steep around balanced scores;
  // the ridge strength only has to be strong enough to keep the start
  // finite, weak enough that the start is not itself pinned to zero.
  LogisticFit init = train_logistic_raw(Xfit, target, wt, 1.0, cfg.budget);
  Eigen::VectorXd theta0(d + 1);
  theta0.head(d) = init.model.weights;
  theta0(d) = init.model.bias;

  OptimResult r = minimize_lbfgs(objective, theta0, cfg.budget);
  Eigen::VectorXd w = r.x.head(d);
  double b = r.x(d);
  return std::abs(hard_rate_gap(Xfit, s_fit.protected_attr, w, b) -
                  hard_rate_gap(Xreg, s_reg.protected_attr, w, b));
}

}  // namespace detail

inline double estimate_disparity(const Dataset& s1, const Dataset& s2, const DScoreConfig& cfg) {
  cfg.check();
  require(s1.dim() == s2.dim(), "value", "disparity dimension mismatch");
  require(s1.group_count(0) > 0 && s1.group_count(1) > 0 && s2.group_count(0) > 0 &&
              s2.group_count(1) > 0,
          "value", "disparity needs both protected groups in both datasets");
  double a = detail::disparity_one_direction(s1, s2, cfg);
  double b = detail::disparity_one_direction(s2, s1, cfg);
  return clip(std::max(a, b), 0.0, 1.0);
}

// --- exact 1-D oracles ---------------------------------------------------------
// Exhaustive sweep over every threshold position between consecutive pooled
// sample points (plus one below and one above everything) and both decision
// orientations. Deliberately brute force: this is the reference the trained
// estimators are judged against.

namespace detail {

inline std::vector<double> threshold_positions_1d(const Dataset& s1, const Dataset& s2) {
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(s1.n() + s2.n()));
  for (int i = 0; i < s1.n(); ++i) xs.push_back(s1.features(i, 0));
  for (int i = 0; i < s2.n(); ++i) xs.push_back(s2.features(i, 0));
  std::sort(xs.begin(), xs.end());
  std::vector<double> ts;
  ts.push_back(xs.front() - 1.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i] < xs[i + 1]) ts.push_back(0.5 * (xs[i] + xs[i + 1]));
  ts.push_back(xs.back() + 1.0);
  return ts;
}

template <typename Stat>
double sweep_1d(const Dataset& s1, const Dataset& s2, Stat&& stat) {
  require(s1.dim() == 1 && s2.dim() == 1, "value", "1-D oracle needs one feature column");
  require(s1.n() > 0 && s2.n() > 0, "value", "1-D oracle on empty dataset");
  double best = 0.0;
  for (double t : threshold_positions_1d(s1, s2)) {
    for (int orient = 0; orient < 2; ++orient) {
      auto h = [t, orient](double x) { return orient == 0 ? (x > t ? 1 : 0) : (x <= t ? 1 : 0); };
      best = std::max(best, stat(h));
    }
  }
  return best;
}

}  // namespace detail

inline double exact_discrepancy_1d(const Dataset& s1, const Dataset& s2) {
  auto risk = [](const Dataset& s, auto&& h) {
    int wrong = 0;
    for (int i = 0; i < s.n(); ++i)
      if (h(s.features(i, 0)) != s.labels(i)) ++wrong;
    return static_cast<double>(wrong) / s.n();
  };
  return detail::sweep_1d(s1, s2, [&](auto&& h) { return std::abs(risk(s1, h) - risk(s2, h)); });
}

inline double exact_disparity_1d(const Dataset& s1, const Dataset& s2) {
  require(s1.group_count(0) > 0 && s1.group_count(1) > 0 && s2.group_count(0) > 0 &&
              s2.group_count(1) > 0,
          "value", "1-D disparity oracle needs both groups in both datasets");
  auto gamma = [](const Dataset& s, auto&& h) {
    double p1 = 0, p0 = 0;
    int n1 = 0, n0 = 0;
    for (int i = 0; i < s.n(); ++i) {
      if (s.protected_attr(i) == 1) {
        ++n1;
        p1 += h(s.features(i, 0));
      } else {
        ++n0;
        p0 += h(s.features(i, 0));
      }
    }
    return std::abs(p1 / n1 - p0 / n0);
  };
  return detail::sweep_1d(s1, s2,
                          [&](auto&& h) { return std::abs(gamma(s1, h) - gamma(s2, h)); });
}

// --- combined score --------------------------------------------------------------

inline PairScore pair_score(const Dataset& s1, const Dataset& s2, const DScoreConfig& cfg) {
  require(s1.n() > 0 && s2.n() > 0, "value", "pair score of empty dataset");
  PairScore p;
  p.disc = estimate_discrepancy(s1, s2, cfg);
  bool degenerate = s1.group_count(0) == 0 || s1.group_count(1) == 0 ||
                    s2.group_count(0) == 0 || s2.group_count(1) == 0;
  if (degenerate) {
    // a single-group source can never certify parity; maximally suspicious
    p.disp = 1.0;
    p.disb = 1.0;
  } else {
    p.disp = estimate_disparity(s1, s2, cfg);
    p.disb = disbalance(s1, s2);
  }
  p.d_score = std::max(p.disc, std::max(p.disp, p.disb));
  return p;
}

}  // namespace flea

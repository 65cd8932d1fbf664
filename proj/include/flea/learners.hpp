// The four learning strategies used in the experiments (plain logistic,
// fairness-regularized, threshold postprocessing, adversarial) plus the
// median-score ensemble. All learners are deterministic given data and
// config; fair learners warm-start from an L2(lambda=1) plain fit.
#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "flea/logistic.hpp"

namespace flea {

enum class LearnerKind { unaware, fair_reg, fair_pp, fair_adv };

inline std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::unaware: return "unaware";
    case LearnerKind::fair_reg: return "fair_reg";
    case LearnerKind::fair_pp: return "fair_pp";
    case LearnerKind::fair_adv: return "fair_adv";
  }
  return "?";
}

inline LearnerKind learner_from_string(const std::string& s) {
  if (s == "unaware") return LearnerKind::unaware;
  if (s == "fair_reg") return LearnerKind::fair_reg;
  if (s == "fair_pp") return LearnerKind::fair_pp;
  if (s == "fair_adv") return LearnerKind::fair_adv;
  fail("config", "unknown learner: " + s);
}

struct AdversaryBudget {
  int steps = 1000;
  double learning_rate_main = 0.001;
  double learning_rate_adv = 0.001;
};

struct FairLearnerConfig {
  LearnerKind kind = LearnerKind::unaware;
  double eta = 0.5;       // fairness weight
  double epsilon = 1e-8;  // smooth-abs constant
  OptimizerBudget budget;
  AdversaryBudget adversary_budget;

  void check() const {
    require(eta >= 0.0, "config", "eta must be nonnegative");
    require(epsilon > 0.0, "config", "epsilon must be positive");
  }
};

struct ThresholdPolicy {
  double threshold_a0 = 0.0;
  double threshold_a1 = 0.0;
  double rate = 0.0;  // chosen positive-decision fraction r
};

// --- confidence-based parity gap ---------------------------------------------
// |t|_eps with t = mean_{a=1} sigma_i - mean_{a=0} sigma_i and
// |t|_eps = sqrt(t^2 / (t^2 + eps)). Shared by the fairness-regularized
// learner and the disparity estimator (which evaluates it on a second set).
struct GroupConfidenceGap {
  Eigen::MatrixXd X;
  Eigen::VectorXd coef;  // +1/n1 on a=1 rows, -1/n0 on a=0 rows
  double epsilon = 1e-8;

  static GroupConfidenceGap build(Eigen::MatrixXd X, const Eigen::VectorXi& prot,
                                  double epsilon) {
    const int n = static_cast<int>(prot.size());
    int n1 = 0;
    for (int i = 0; i < n; ++i) n1 += prot(i);
    int n0 = n - n1;
    require(n1 > 0 && n0 > 0, "value", "parity gap needs both protected groups");
    GroupConfidenceGap g;
    g.X = std::move(X);
    g.coef.resize(n);
    for (int i = 0; i < n; ++i) g.coef(i) = prot(i) == 1 ? 1.0 / n1 : -1.0 / n0;
    g.epsilon = epsilon;
    return g;
  }

  static GroupConfidenceGap build(const Dataset& d, double epsilon) {
    return build(d.features, d.protected_attr, epsilon);
  }

  // returns |t|_eps; grad gets d|t|_eps/dtheta (size d+1)
  double value_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const int d = static_cast<int>(X.cols());
    Eigen::VectorXd w = theta.head(d);
    double b = theta(d);
    Eigen::ArrayXd g = (X * w).array() + b;
    Eigen::ArrayXd c = g.max(-kScoreClip).min(kScoreClip);
    Eigen::ArrayXd sig = 1.0 / (1.0 + (-c).exp());
    double t = (coef.array() * sig).sum();

    double denom = t * t + epsilon;
    double value = std::sqrt(t * t / denom);
    double sign = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    double dval_dt = sign * epsilon / (denom * std::sqrt(denom));

    Eigen::ArrayXd inside = ((g >= -kScoreClip) && (g <= kScoreClip)).cast<double>();
    Eigen::ArrayXd dt = coef.array() * sig * (1.0 - sig) * inside;
    grad.resize(d + 1);
    grad.head(d) = dval_dt * (X.transpose() * dt.matrix());
    grad(d) = dval_dt * dt.sum();
    return value;
  }

  double value(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd tmp;
    return value_and_grad(theta, tmp);
  }
};

// confidence-based parity gap of a trained model (diagnostic + test hook)
inline double confidence_dp(const LinearModel& m, const Dataset& d, double epsilon = 1e-8) {
  auto gap = GroupConfidenceGap::build(d, epsilon);
  Eigen::VectorXd theta(m.weights.size() + 1);
  theta.head(m.weights.size()) = m.weights;
  theta(m.weights.size()) = m.bias;
  return gap.value(theta);
}

// --- learners ----------------------------------------------------------------

inline LinearModel train_unaware(const Dataset& d, const FairLearnerConfig& cfg) {
  cfg.check();
  return train_logistic(d, 0.0, cfg.budget).model;
}

inline Eigen::VectorXd warm_start_theta(const Dataset& d, const OptimizerBudget& budget) {
  LogisticFit fit = train_logistic(d, 1.0, budget);
  Eigen::VectorXd theta(d.dim() + 1);
  theta.head(d.dim()) = fit.model.weights;
  theta(d.dim()) = fit.model.bias;
  return theta;
}

inline LinearModel train_fair_reg(const Dataset& d, const FairLearnerConfig& cfg) {
  cfg.check();
  require(d.group_count(0) > 0 && d.group_count(1) > 0, "value",
          "fair training needs both protected groups");
  LogisticObjective base{d.features, d.labels.cast<double>(),
                         Eigen::VectorXd::Constant(d.n(), 1.0 / d.n()), 0.0};
  GroupConfidenceGap gap = GroupConfidenceGap::build(d, cfg.epsilon);
  double eta = cfg.eta;
  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    double v = base(theta, grad);
    Eigen::VectorXd g2;
    double p = gap.value_and_grad(theta, g2);
    grad += eta * g2;
    return v + eta * p;
  };
  Eigen::VectorXd theta0 = warm_start_theta(d, cfg.budget);
  OptimResult r = minimize_lbfgs(objective, theta0, cfg.budget);
  LinearModel m;
  m.weights = r.x.head(d.dim());
  m.bias = r.x(d.dim());
  if (d.schema) m.schema_hash = d.schema->hash();
  return m;
}

struct FairAdvResult {
  LinearModel main;
  Eigen::Vector2d adversary;  // [slope on the main score; bias]
};

// Saddle-point training: the main model minimizes CE(y) - eta * CE_adv(a),
// the adversary (a 1-D linear probe on the clipped main score) minimizes its
// own CE(a). Both sides take one Adam step per iteration, simultaneously.
inline FairAdvResult train_fair_adv(const Dataset& d, const FairLearnerConfig& cfg) {
  cfg.check();
  require(d.group_count(0) > 0 && d.group_count(1) > 0, "value",
          "fair training needs both protected groups");
  const int n = d.n(), dim = d.dim();
  Eigen::ArrayXd y = d.labels.cast<double>().array();
  Eigen::ArrayXd a = d.protected_attr.cast<double>().array();

  Eigen::VectorXd theta = warm_start_theta(d, cfg.budget);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(2);
  Adam opt_main(dim + 1, cfg.adversary_budget.learning_rate_main);
  Adam opt_adv(2, cfg.adversary_budget.learning_rate_adv);

  for (int step = 0; step < cfg.adversary_budget.steps; ++step) {
    Eigen::VectorXd w = theta.head(dim);
    double b = theta(dim);
    Eigen::ArrayXd g = (d.features * w).array() + b;
    Eigen::ArrayXd s = g.max(-kScoreClip).min(kScoreClip);
    Eigen::ArrayXd in_g = ((g >= -kScoreClip) && (g <= kScoreClip)).cast<double>();

    Eigen::ArrayXd gp = phi(0) * s + phi(1);
    Eigen::ArrayXd cp = gp.max(-kScoreClip).min(kScoreClip);
    Eigen::ArrayXd in_gp = ((gp >= -kScoreClip) && (gp <= kScoreClip)).cast<double>();

    Eigen::ArrayXd sig = 1.0 / (1.0 + (-s).exp());
    Eigen::ArrayXd sigp = 1.0 / (1.0 + (-cp).exp());

    if (!sig.allFinite() || !sigp.allFinite()) fail("state", "non-finite adversarial loss");

    Eigen::ArrayXd r_main = (sig - y) * in_g / n;
    Eigen::ArrayXd r_adv = (sigp - a) * in_gp / n;

    // adversary's loss routed back into the main parameters via the score
    Eigen::ArrayXd r_cross = r_adv * phi(0) * in_g;

    Eigen::VectorXd grad_main(dim + 1);
    Eigen::ArrayXd rm = r_main - cfg.eta * r_cross;
    grad_main.head(dim) = d.features.transpose() * rm.matrix();
    grad_main(dim) = rm.sum();

    Eigen::VectorXd grad_adv(2);
    grad_adv(0) = (r_adv * s).sum();
    grad_adv(1) = r_adv.sum();

    opt_main.step(theta, grad_main);
    opt_adv.step(phi, grad_adv);
  }

  FairAdvResult out;
  out.main.weights = theta.head(dim);
  out.main.bias = theta(dim);
  if (d.schema) out.main.schema_hash = d.schema->hash();
  out.adversary = phi;
  return out;
}

struct PostprocessResult {
  LinearModel model;  // thresholds folded into the protected weight and bias
  ThresholdPolicy policy;
};

// Picks a positive-decision rate r from {0, 0.01, ..., 1} and per-group score
// thresholds realizing (approximately) that rate in each group, maximizing
// training accuracy; ties break toward the smallest r. Thresholds are always
// order statistics of the group's scores, so rows tied with the threshold
// score are never split.
inline PostprocessResult postprocess_thresholds(const LinearModel& m, const Dataset& d) {
  require(d.schema && d.schema->include_protected_in_features, "value",
          "threshold postprocessing needs the protected attribute among the features");
  require(d.group_count(0) > 0 && d.group_count(1) > 0, "value",
          "threshold postprocessing needs both protected groups");

  Eigen::VectorXd sc = scores(m, d);
  std::vector<double> s0, s1;
  for (int i = 0; i < d.n(); ++i)
    (d.protected_attr(i) == 1 ? s1 : s0).push_back(sc(i));
  std::sort(s0.begin(), s0.end());
  std::sort(s1.begin(), s1.end());

  auto threshold_for = [](const std::vector<double>& s, double r) {
    int mcount = static_cast<int>(s.size());
    int k = static_cast<int>(std::floor(r * mcount + 0.5));
    if (k >= mcount) return s.front();  // everything strictly above the minimum passes
    return s[static_cast<std::size_t>(mcount - k - 1)];
  };

  double best_acc = -1.0;
  ThresholdPolicy best;
  for (int ri = 0; ri <= 100; ++ri) {
    double r = ri / 100.0;
    double t0 = threshold_for(s0, r);
    double t1 = threshold_for(s1, r);
    int correct = 0;
    for (int i = 0; i < d.n(); ++i) {
      double t = d.protected_attr(i) == 1 ? t1 : t0;
      int dec = sc(i) > t ? 1 : 0;
      if (dec == d.labels(i)) ++correct;
    }
    double acc = static_cast<double>(correct) / d.n();
    if (acc > best_acc) {
      best_acc = acc;
      best = {t0, t1, r};
    }
  }

  PostprocessResult out;
  out.model = m;
  int p = d.schema->protected_feature_index();
  out.model.weights(p) -= (best.threshold_a1 - best.threshold_a0);
  out.model.bias -= best.threshold_a0;
  out.policy = best;
  return out;
}

// --- trained classifier wrapper -----------------------------------------------

// Uniform handle over single linear models and median-score ensembles. For
// several members the decision is the label of the lower median of the
// members' clipped scores.
struct FittedModel {
  std::vector<LinearModel> members;
  std::optional<ThresholdPolicy> policy;
  bool fallback_plain = false;  // a fair learner had to fall back to plain training
  LearnerKind kind = LearnerKind::unaware;

  double median_score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    require(!members.empty(), "state", "no trained members");
    if (members.size() == 1) return members.front().raw_score(x);
    std::vector<double> s;
    s.reserve(members.size());
    for (const auto& m : members) s.push_back(m.raw_score(x));
    std::sort(s.begin(), s.end());
    return s[(s.size() - 1) / 2];
  }

  int decide(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return median_score(x) > 0.0 ? 1 : 0;
  }

  Eigen::VectorXi decide_all(const Dataset& d) const {
    require(!members.empty(), "state", "no trained members");
    if (members.size() == 1) return decisions(members.front(), d);
    Eigen::MatrixXd all(d.n(), static_cast<int>(members.size()));
    for (std::size_t k = 0; k < members.size(); ++k)
      all.col(static_cast<int>(k)) = scores(members[k], d);
    Eigen::VectorXi out(d.n());
    std::vector<double> row(members.size());
    for (int i = 0; i < d.n(); ++i) {
      for (std::size_t k = 0; k < members.size(); ++k) row[k] = all(i, static_cast<int>(k));
      std::sort(row.begin(), row.end());
      out(i) = row[(row.size() - 1) / 2] > 0.0 ? 1 : 0;
    }
    return out;
  }
};

// Trains per the configured strategy. Fair strategies need both protected
// groups; when a group is missing entirely (possible on manipulated sources)
// the learner falls back to plain training and flags it.
inline FittedModel train_learner(const Dataset& d, const FairLearnerConfig& cfg) {
  cfg.check();
  require(d.n() > 0, "value", "training on empty dataset");
  FittedModel out;
  out.kind = cfg.kind;
  bool groups_ok = d.group_count(0) > 0 && d.group_count(1) > 0;
  LearnerKind kind = cfg.kind;
  if (!groups_ok && kind != LearnerKind::unaware) {
    kind = LearnerKind::unaware;
    out.fallback_plain = true;
  }
  switch (kind) {
    case LearnerKind::unaware:
      out.members.push_back(train_unaware(d, cfg));
      break;
    case LearnerKind::fair_reg:
      out.members.push_back(train_fair_reg(d, cfg));
      break;
    case LearnerKind::fair_pp: {
      LinearModel base = train_unaware(d, cfg);
      PostprocessResult pp = postprocess_thresholds(base, d);
      out.members.push_back(pp.model);
      out.policy = pp.policy;
      break;
    }
    case LearnerKind::fair_adv:
      out.members.push_back(train_fair_adv(d, cfg).main);
      break;
  }
  return out;
}

// One base model per source; prediction is the label of the median score.
inline FittedModel robust_ensemble(const SourceBundle& bundle, const FairLearnerConfig& base_cfg) {
  require(bundle.count() >= 1, "value", "ensemble needs at least one source");
  FittedModel out;
  out.kind = base_cfg.kind;
  for (int i = 0; i < bundle.count(); ++i) {
    try {
      FittedModel member = train_learner(bundle.sources[static_cast<std::size_t>(i)], base_cfg);
      out.fallback_plain = out.fallback_plain || member.fallback_plain;
      out.members.push_back(member.members.front());
    } catch (const Error& e) {
      fail(e.kind(), "source " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace flea

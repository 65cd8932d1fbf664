// The four training strategies, threshold postprocessing, the median
// ensemble, and the confidence-based parity gap they share.
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "flea/learners.hpp"
#include "flea/logistic.hpp"
#include "test_support.hpp"

using namespace flea;

namespace {

// Feature 0 literally equals the protected attribute (so does the mirror
// column) and labels mostly follow it: the unfair shortcut is the best
// unregularized predictor.
Dataset a_feature_data(int n, std::uint64_t seed) {
  RandomStream rng(seed);
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXi y(n), a(n);
  for (int i = 0; i < n; ++i) {
    a(i) = i % 2;
    X(i, 0) = a(i);
    X(i, 1) = rng.next_normal();
    y(i) = rng.next_bernoulli(0.85) ? a(i) : 1 - a(i);
  }
  return testsupport::make_dataset(X, y, a);
}

double base_ce_loss(const LinearModel& m, const Dataset& d) {
  LogisticObjective obj{d.features, d.labels.cast<double>(),
                        Eigen::VectorXd::Constant(d.n(), 1.0 / d.n()), 0.0};
  Eigen::VectorXd theta(d.dim() + 1), grad;
  theta.head(d.dim()) = m.weights;
  theta(d.dim()) = m.bias;
  return obj(theta, grad);
}

LinearModel constant_model(int dim, double bias) {
  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(dim);
  m.bias = bias;
  return m;
}

}  // namespace

TEST_CASE("every learner is deterministic on identical inputs") {
  RandomStream rng(501);
  Dataset d = testsupport::random_1d(150, 0.5, 1.2, rng);
  for (LearnerKind kind :
       {LearnerKind::unaware, LearnerKind::fair_reg, LearnerKind::fair_pp, LearnerKind::fair_adv}) {
    FairLearnerConfig cfg;
    cfg.kind = kind;
    cfg.adversary_budget.steps = 200;  // keep the saddle-point runs short here
    FittedModel m1 = train_learner(d, cfg);
    FittedModel m2 = train_learner(d, cfg);
    REQUIRE(m1.members.size() == 1);
    CHECK((m1.members[0].weights - m2.members[0].weights).cwiseAbs().maxCoeff() == 0.0);
    CHECK(m1.members[0].bias == m2.members[0].bias);
    CHECK(m1.kind == kind);
    CHECK_FALSE(m1.fallback_plain);
  }
}

TEST_CASE("regularized learner with zero weight matches the plain fit") {
  RandomStream rng(502);
  Dataset d = testsupport::random_1d(250, 0.3, 1.0, rng);
  FairLearnerConfig cfg;
  LinearModel plain = train_unaware(d, cfg);
  cfg.kind = LearnerKind::fair_reg;
  cfg.eta = 0.0;
  LinearModel reg = train_fair_reg(d, cfg);
  CHECK(std::abs(base_ce_loss(reg, d) - base_ce_loss(plain, d)) <= 1e-4);
}

TEST_CASE("composite fairness objective gradient matches finite differences") {
  Dataset d = a_feature_data(80, 503);
  double eta = 0.7, eps = 0.01;
  LogisticObjective base{d.features, d.labels.cast<double>(),
                         Eigen::VectorXd::Constant(d.n(), 1.0 / d.n()), 0.0};
  GroupConfidenceGap gap = GroupConfidenceGap::build(d, eps);
  auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    double v = base(theta, grad);
    Eigen::VectorXd g2;
    double p = gap.value_and_grad(theta, g2);
    grad += eta * g2;
    return v + eta * p;
  };

  RandomStream rng(504);
  Eigen::VectorXd theta(d.dim() + 1), grad(d.dim() + 1), tmp;
  for (int j = 0; j <= d.dim(); ++j) theta(j) = 0.3 * rng.next_normal();
  objective(theta, grad);
  const double h = 1e-6;
  for (int j = 0; j <= d.dim(); ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    Eigen::VectorXd gdummy;
    double num = (objective(tp, gdummy) - objective(tm, gdummy)) / (2.0 * h);
    CHECK(std::abs(num - grad(j)) <= 1e-6 + 1e-4 * std::abs(num));
  }
}

TEST_CASE("fairness weight sweep flattens the confidence gap") {
  // The smooth-abs constant must be large enough that the penalty has usable
  // gradient at the unaware model's gap; at the 1e-8 default the penalty is a
  // plateau and eta does nothing until the gap is already tiny.
  Dataset d = a_feature_data(240, 505);
  const double eps = 0.01;
  FairLearnerConfig cfg;
  cfg.epsilon = eps;

  LinearModel plain = train_unaware(d, cfg);
  double gamma_plain = confidence_dp(plain, d, eps);

  cfg.kind = LearnerKind::fair_reg;
  std::vector<double> gammas;
  for (double eta : {0.0, 0.5, 2.0, 8.0}) {
    cfg.eta = eta;
    gammas.push_back(confidence_dp(train_fair_reg(d, cfg), d, eps));
  }

  CHECK(gammas[0] == doctest::Approx(gamma_plain).epsilon(0.05));
  CHECK(gammas[1] < gamma_plain);  // the default weight already helps
  CHECK(gammas.back() < 0.05);     // a large weight almost eliminates the gap
}

TEST_CASE("adversarial learner ignores the adversary at zero weight") {
  RandomStream rng(506);
  Dataset d = testsupport::random_1d(120, 0.6, 1.0, rng);
  FairLearnerConfig cfg;
  cfg.kind = LearnerKind::fair_adv;
  cfg.eta = 0.0;
  cfg.adversary_budget.steps = 300;
  FairAdvResult r1 = train_fair_adv(d, cfg);
  cfg.adversary_budget.learning_rate_adv = 0.9;  // wildly different adversary
  FairAdvResult r2 = train_fair_adv(d, cfg);
  CHECK((r1.main.weights - r2.main.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r1.main.bias == r2.main.bias);
}

TEST_CASE("adversary ends near chance when the score is scrubbed") {
  // With equal learning rates the simultaneous updates orbit the saddle and
  // the adversary snapshot is arbitrary. Running the adversary much faster
  // than the main model keeps it near its best response, so at the end it
  // measures how much group signal actually survives in the score.
  Dataset d = a_feature_data(240, 507);
  FairLearnerConfig cfg;
  cfg.kind = LearnerKind::fair_adv;
  cfg.eta = 2.0;
  cfg.adversary_budget.steps = 2000;
  cfg.adversary_budget.learning_rate_adv = 0.05;
  FairAdvResult r = train_fair_adv(d, cfg);

  // read the adversary's hard accuracy at predicting a from the final score
  int correct = 0;
  for (int i = 0; i < d.n(); ++i) {
    double s = r.main.raw_score(d.features.row(i));
    int pred = (r.adversary(0) * s + r.adversary(1)) > 0.0 ? 1 : 0;
    if (pred == d.protected_attr(i)) ++correct;
  }
  double acc = static_cast<double>(correct) / d.n();
  CHECK(std::abs(acc - 0.5) <= 0.15);
}

TEST_CASE("adversarial learner on all-zero features is bias-only") {
  auto sc = std::make_shared<FeatureSchema>();
  sc->dataset_id = "zeros";
  sc->columns.push_back({"x0", FeatureSchema::Kind::Numeric, {}, {}, false});
  sc->protected_column = "a";
  sc->target_column = "y";
  sc->include_protected_in_features = false;

  Dataset d;
  d.schema = sc;
  d.features = Eigen::MatrixXd::Zero(40, 1);
  d.labels.resize(40);
  d.protected_attr.resize(40);
  for (int i = 0; i < 40; ++i) {
    d.protected_attr(i) = i % 2;
    d.labels(i) = (i / 2) % 2;
  }
  d.check_valid();

  FairLearnerConfig cfg;
  cfg.kind = LearnerKind::fair_adv;
  cfg.adversary_budget.steps = 200;
  FairAdvResult r = train_fair_adv(d, cfg);
  CHECK(r.main.weights.cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::isfinite(r.main.bias));
}

TEST_CASE("postprocessing keeps the score order within each group") {
  RandomStream rng(508);
  Dataset d = testsupport::random_1d(200, 0.5, 1.5, rng);
  FairLearnerConfig cfg;
  LinearModel base = train_unaware(d, cfg);
  PostprocessResult pp = postprocess_thresholds(base, d);

  Eigen::VectorXd sc = scores(base, d);
  Eigen::VectorXi dec = decisions(pp.model, d);
  for (int g = 0; g <= 1; ++g) {
    for (int i = 0; i < d.n(); ++i) {
      for (int j = 0; j < d.n(); ++j) {
        if (d.protected_attr(i) != g || d.protected_attr(j) != g) continue;
        if (sc(i) > sc(j)) CHECK(dec(i) >= dec(j));
        if (sc(i) == sc(j)) CHECK(dec(i) == dec(j));
      }
    }
  }
}

TEST_CASE("folded thresholds reproduce the explicit per-group rule") {
  RandomStream rng(509);
  Dataset d = testsupport::random_1d(150, 0.4, 1.0, rng);
  FairLearnerConfig cfg;
  LinearModel base = train_unaware(d, cfg);
  PostprocessResult pp = postprocess_thresholds(base, d);

  Eigen::VectorXd sc = scores(base, d);
  Eigen::VectorXi dec = decisions(pp.model, d);
  for (int i = 0; i < d.n(); ++i) {
    double t = d.protected_attr(i) == 1 ? pp.policy.threshold_a1 : pp.policy.threshold_a0;
    CHECK(dec(i) == (sc(i) > t ? 1 : 0));
  }
}

TEST_CASE("postprocessed group rates agree up to the grid and group size") {
  RandomStream rng(510);
  Dataset d = testsupport::random_1d(200, 0.5, 1.5, rng);
  FairLearnerConfig cfg;
  LinearModel base = train_unaware(d, cfg);
  PostprocessResult pp = postprocess_thresholds(base, d);
  Eigen::VectorXi dec = decisions(pp.model, d);
  double r0 = 0.0, r1 = 0.0;
  int n0 = d.group_count(0), n1 = d.group_count(1);
  for (int i = 0; i < d.n(); ++i)
    (d.protected_attr(i) == 1 ? r1 : r0) += dec(i);
  r0 /= n0;
  r1 /= n1;
  CHECK(std::abs(r0 - r1) <= 1.0 / std::min(n0, n1) + 0.01);
}

TEST_CASE("postprocessing a already-fair perfect model keeps perfect accuracy") {
  // both groups carry the same symmetric score pattern, so the natural
  // threshold is fair and exact; the grid must find (at least) that point
  Dataset d = testsupport::make_dataset_1d({-2, -1, 1, 2, -2, -1, 1, 2},
                                           {0, 0, 1, 1, 0, 0, 1, 1},
                                           {0, 0, 0, 0, 1, 1, 1, 1});
  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(2);
  m.weights(0) = 1.0;
  PostprocessResult pp = postprocess_thresholds(m, d);
  Eigen::VectorXi dec = decisions(pp.model, d);
  CHECK(empirical_risk(dec, d) == doctest::Approx(0.0));
  CHECK(dp_violation(dec, d) == doctest::Approx(0.0));
}

TEST_CASE("constant scores break the rate tie toward zero") {
  Dataset d = testsupport::make_dataset_1d({3, 3, 3, 3}, {0, 1, 0, 1}, {0, 1, 0, 1});
  LinearModel m = constant_model(2, 0.0);
  PostprocessResult pp = postprocess_thresholds(m, d);
  CHECK(pp.policy.rate == 0.0);
}

TEST_CASE("postprocessing preconditions are enforced") {
  Dataset one_group = testsupport::make_dataset_1d({1, 2, 3}, {0, 1, 0}, {1, 1, 1});
  LinearModel m = constant_model(2, 0.0);
  CHECK_THROWS_AS(postprocess_thresholds(m, one_group), Error);
}

TEST_CASE("fair strategies fall back to plain training when a group is absent") {
  Dataset d = testsupport::make_dataset_1d({1, -1, 2, -2}, {1, 0, 1, 0}, {0, 0, 0, 0});
  for (LearnerKind kind : {LearnerKind::fair_reg, LearnerKind::fair_pp, LearnerKind::fair_adv}) {
    FairLearnerConfig cfg;
    cfg.kind = kind;
    cfg.adversary_budget.steps = 50;
    FittedModel m = train_learner(d, cfg);
    CHECK(m.fallback_plain);
    CHECK(m.members.size() == 1);
    CHECK(m.kind == kind);  // reporting keeps the requested strategy
  }
  FairLearnerConfig cfg;
  FittedModel m = train_learner(d, cfg);
  CHECK_FALSE(m.fallback_plain);
}

TEST_CASE("median ensemble uses the lower median score") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  FittedModel odd;
  odd.members = {constant_model(2, -1.0), constant_model(2, 0.5), constant_model(2, 2.0)};
  CHECK(odd.median_score(x) == doctest::Approx(0.5));
  CHECK(odd.decide(x) == 1);

  FittedModel even;
  even.members = {constant_model(2, -1.0), constant_model(2, 0.5), constant_model(2, 2.0),
                  constant_model(2, 3.0)};
  CHECK(even.median_score(x) == doctest::Approx(0.5));  // lower of the middle pair

  FittedModel tie;
  tie.members = {constant_model(2, -1.0), constant_model(2, 0.0), constant_model(2, 2.0)};
  CHECK(tie.decide(x) == 0);  // median exactly zero goes negative
}

TEST_CASE("batch ensemble decisions match the per-row rule") {
  RandomStream rng(511);
  Dataset d = testsupport::random_1d(60, 0.4, 1.0, rng);
  FittedModel ens;
  for (int k = 0; k < 5; ++k) {
    LinearModel m;
    m.weights = Eigen::VectorXd::Zero(2);
    m.weights(0) = 0.5 * (k - 2);
    m.bias = 0.1 * k;
    ens.members.push_back(m);
  }
  Eigen::VectorXi batch = ens.decide_all(d);
  for (int i = 0; i < d.n(); ++i) CHECK(batch(i) == ens.decide(d.features.row(i)));
}

TEST_CASE("single-source ensemble equals the single trained model") {
  RandomStream rng(512);
  SourceBundle b;
  b.sources.push_back(testsupport::random_1d(100, 0.4, 1.0, rng));
  b.clean_flags = {1};
  FairLearnerConfig cfg;
  FittedModel ens = robust_ensemble(b, cfg);
  FittedModel solo = train_learner(b.sources[0], cfg);
  REQUIRE(ens.members.size() == 1);
  CHECK((ens.members[0].weights - solo.members[0].weights).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two identical clean members dominate a three-source ensemble") {
  RandomStream rng(513);
  Dataset clean = testsupport::random_1d(100, 0.4, 1.2, rng);
  Dataset noise = testsupport::random_1d(100, -0.8, -1.5, rng);
  SourceBundle b;
  b.sources = {clean, clean, noise};
  b.clean_flags = {1, 1, 0};
  FairLearnerConfig cfg;
  FittedModel ens = robust_ensemble(b, cfg);
  FittedModel solo = train_learner(clean, cfg);
  RandomStream rng2(514);
  Dataset probe = testsupport::random_1d(80, 0.4, 1.2, rng2);
  // median of {c, c, x} is always c
  for (int i = 0; i < probe.n(); ++i)
    CHECK(ens.decide(probe.features.row(i)) == solo.decide(probe.features.row(i)));
}

TEST_CASE("ensemble training errors carry the source index") {
  SourceBundle b;
  Dataset d = testsupport::make_dataset_1d({1, -1, 2}, {1, 0, 1}, {0, 1, 0});
  b.sources = {d, d.subset({})};
  try {
    robust_ensemble(b, FairLearnerConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("source 1") != std::string::npos);
  }
}

TEST_CASE("confidence gap is zero for constant scorers and tops out at one") {
  RandomStream rng(515);
  Dataset d = testsupport::random_1d(100, 0.3, 1.0, rng);
  CHECK(confidence_dp(constant_model(2, 1.7), d, 0.01) == doctest::Approx(0.0));

  // a model reading the mirror column separates the groups completely
  LinearModel sep;
  sep.weights = Eigen::VectorXd::Zero(2);
  sep.weights(1) = 1000.0;
  sep.bias = -500.0;
  double g = confidence_dp(sep, d, 1e-8);
  CHECK(g > 0.99);
  CHECK(g <= 1.0);
}

TEST_CASE("confidence gap gradient matches finite differences") {
  Dataset d = a_feature_data(60, 516);
  GroupConfidenceGap gap = GroupConfidenceGap::build(d, 0.01);
  RandomStream rng(517);
  Eigen::VectorXd theta(d.dim() + 1), grad;
  for (int j = 0; j <= d.dim(); ++j) theta(j) = 0.4 * rng.next_normal();
  gap.value_and_grad(theta, grad);
  const double h = 1e-6;
  for (int j = 0; j <= d.dim(); ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    double num = (gap.value(tp) - gap.value(tm)) / (2.0 * h);
    CHECK(std::abs(num - grad(j)) <= 1e-6 + 1e-4 * std::abs(num));
  }
}

TEST_CASE("config validation rejects bad fairness parameters") {
  FairLearnerConfig cfg;
  cfg.eta = -0.1;
  CHECK_THROWS_AS(cfg.check(), Error);
  cfg.eta = 0.5;
  cfg.epsilon = 0.0;
  CHECK_THROWS_AS(cfg.check(), Error);
}

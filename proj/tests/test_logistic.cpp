// Weighted logistic regression: analytic gradients, deterministic training,
// and the duplicate-row weighting identity.
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "flea/logistic.hpp"
#include "test_support.hpp"

using namespace flea;

namespace {

struct Problem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::VectorXd wt;
};

Problem random_problem(int n, int d, std::uint64_t seed) {
  RandomStream rng(seed);
  Problem p;
  p.X.resize(n, d);
  p.y.resize(n);
  p.wt.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) p.X(i, j) = rng.next_normal();
    p.y(i) = rng.next_bernoulli(0.5) ? 1.0 : 0.0;
    p.wt(i) = 0.2 + rng.next_u01();
  }
  return p;
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
  Problem p = random_problem(40, 4, 311);
  LogisticObjective obj{p.X, p.y, p.wt, 0.37};
  RandomStream rng(312);
  Eigen::VectorXd theta(5), grad(5), gp, gm;
  for (int j = 0; j < 5; ++j) theta(j) = 0.5 * rng.next_normal();

  obj(theta, grad);
  const double h = 1e-6;
  for (int j = 0; j < 5; ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    double num = (obj(tp, gp) - obj(tm, gm)) / (2.0 * h);
    CHECK(std::abs(num - grad(j)) <= 1e-6 + 1e-5 * std::abs(num));
  }
}

TEST_CASE("gradient vanishes per-sample outside the score clip") {
  // one faraway row: its raw score exceeds the clip, so nudging the weight
  // must not change the loss
  Eigen::MatrixXd X(2, 1);
  X << 100.0, 0.1;
  Eigen::VectorXd y(2), wt(2);
  y << 1.0, 0.0;
  wt << 1.0, 1.0;
  LogisticObjective obj{X, y, wt, 0.0};
  Eigen::VectorXd theta(2), grad(2), grad2(2);
  theta << 1.0, 0.0;  // row 0 scores 100, clipped
  Eigen::VectorXd theta2 = theta;
  theta2(0) = 1.5;  // row 0 still clipped, row 1 moves
  double v1 = obj(theta, grad);
  double v2 = obj(theta2, grad2);
  // difference comes only from row 1
  double c1 = clip(0.1 * 1.0, -kScoreClip, kScoreClip);
  double c2 = clip(0.1 * 1.5, -kScoreClip, kScoreClip);
  double expect = log1pexp_clipped(c2) - log1pexp_clipped(c1);
  CHECK(v2 - v1 == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("separable data is fit to zero training error") {
  RandomStream rng(21);
  Eigen::MatrixXd X(40, 1);
  Eigen::VectorXi y(40), a(40);
  for (int i = 0; i < 40; ++i) {
    y(i) = i % 2;
    X(i, 0) = (y(i) == 1 ? 2.0 : -2.0) + 0.3 * rng.next_normal();
    a(i) = static_cast<int>(rng.next_bernoulli(0.5));
  }
  Dataset d = testsupport::make_dataset(X, y, a);
  LogisticFit fit = train_logistic(d, 0.0, OptimizerBudget{});
  CHECK(empirical_risk(fit.model, d) == doctest::Approx(0.0));
  CHECK(fit.model.schema_hash == d.schema->hash());
}

TEST_CASE("training from the fixed zero start is exactly reproducible") {
  RandomStream rng(77);
  Dataset d = testsupport::random_1d(150, 0.4, 1.0, rng);
  LogisticFit f1 = train_logistic(d, 0.01, OptimizerBudget{});
  LogisticFit f2 = train_logistic(d, 0.01, OptimizerBudget{});
  CHECK((f1.model.weights - f2.model.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f1.model.bias == f2.model.bias);
}

TEST_CASE("integer sample weights behave like duplicated rows") {
  Problem p = random_problem(25, 3, 99);
  Eigen::VectorXd wt = Eigen::VectorXd::Ones(25);
  wt(7) = 2.0;
  wt(19) = 3.0;

  // expand: row 7 twice, row 19 three times
  Eigen::MatrixXd Xe(25 + 1 + 2, 3);
  Eigen::VectorXd ye(28), we = Eigen::VectorXd::Ones(28);
  int k = 0;
  for (int i = 0; i < 25; ++i) {
    int copies = static_cast<int>(wt(i));
    for (int c = 0; c < copies; ++c) {
      Xe.row(k) = p.X.row(i);
      ye(k) = p.y(i);
      ++k;
    }
  }
  REQUIRE(k == 28);

  OptimizerBudget budget;
  LogisticFit fw = train_logistic_raw(p.X, p.y, wt, 0.05, budget);
  LogisticFit fd = train_logistic_raw(Xe, ye, we, 0.05, budget);
  CHECK((fw.model.weights - fd.model.weights).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(fw.model.bias == doctest::Approx(fd.model.bias).epsilon(1e-4));
}

TEST_CASE("loss trace from training never increases") {
  RandomStream rng(31);
  Dataset d = testsupport::random_1d(200, 0.3, 0.8, rng);
  LogisticFit fit = train_logistic(d, 0.001, OptimizerBudget{});
  const auto& hist = fit.opt.value_history;
  REQUIRE(hist.size() >= 2);
  for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1]);
}

TEST_CASE("ridge pulls weights toward zero") {
  RandomStream rng(41);
  Dataset d = testsupport::random_1d(200, 0.3, 1.5, rng);
  LogisticFit loose = train_logistic(d, 0.0, OptimizerBudget{});
  LogisticFit tight = train_logistic(d, 10.0, OptimizerBudget{});
  CHECK(tight.model.weights.norm() < loose.model.weights.norm());
}

TEST_CASE("invalid weight vectors are rejected") {
  Problem p = random_problem(10, 2, 5);
  Eigen::VectorXd neg = Eigen::VectorXd::Ones(10);
  neg(3) = -0.5;
  CHECK_THROWS_AS(train_logistic_raw(p.X, p.y, neg, 0.0, OptimizerBudget{}), Error);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(10);
  CHECK_THROWS_AS(train_logistic_raw(p.X, p.y, zero, 0.0, OptimizerBudget{}), Error);
  CHECK_THROWS_AS(train_logistic_raw(p.X, p.y, Eigen::VectorXd::Ones(10), -1.0, OptimizerBudget{}),
                  Error);
}

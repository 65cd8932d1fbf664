// Linear models: scoring, hard decisions, empirical risk, parity violation,
// and JSON round trips.
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "flea/model.hpp"
#include "test_support.hpp"

using namespace flea;

namespace {

LinearModel unit_model(int dim) {
  LinearModel m;
  m.weights = Eigen::VectorXd::Zero(dim);
  m.weights(0) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("hard decisions break the tie at zero toward the negative class") {
  LinearModel m = unit_model(2);
  Eigen::VectorXd x(2);
  x << 0.0, 5.0;
  CHECK(m.decide(x) == 0);  // raw score exactly zero
  x(0) = 1e-12;
  CHECK(m.decide(x) == 1);
  x(0) = -1e-12;
  CHECK(m.decide(x) == 0);
}

TEST_CASE("raw scores saturate at the clip boundary") {
  LinearModel m = unit_model(1);
  m.weights(0) = 1000.0;
  Eigen::VectorXd x(1);
  x << 1.0;
  CHECK(m.raw_score(x) == kScoreClip);
  x << -1.0;
  CHECK(m.raw_score(x) == -kScoreClip);
  // and the batched path agrees
  Dataset d = testsupport::make_dataset_1d({1.0, -1.0}, {1, 0}, {0, 1});
  LinearModel m2 = unit_model(2);
  m2.weights(0) = 1000.0;
  Eigen::VectorXd s = scores(m2, d);
  CHECK(s(0) == kScoreClip);
  CHECK(s(1) == -kScoreClip);
}

TEST_CASE("predicted probability is strictly monotone inside the clip") {
  LinearModel m = unit_model(1);
  Eigen::VectorXd x(1);
  double prev = -1.0;
  for (double v = -19.5; v <= 19.5; v += 0.5) {
    x << v;
    double p = m.prob(x);
    CHECK(p > prev);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    prev = p;
  }
}

TEST_CASE("empirical risk counts disagreements") {
  Dataset d = testsupport::make_dataset_1d({1.0, 2.0, -1.0, -2.0}, {1, 0, 0, 1}, {0, 1, 0, 1});
  LinearModel m = unit_model(2);
  // decisions are (1, 1, 0, 0): rows 1 and 3 disagree
  CHECK(empirical_risk(m, d) == doctest::Approx(0.5));
  Eigen::VectorXi perfect = d.labels;
  CHECK(empirical_risk(perfect, d) == doctest::Approx(0.0));
}

TEST_CASE("parity violation matches the hand-computed rate gap") {
  // group 0 rows score positive 1 of 2; group 1 rows 2 of 2
  Dataset d = testsupport::make_dataset_1d({1.0, -1.0, 1.0, 2.0}, {1, 0, 1, 1}, {0, 0, 1, 1});
  LinearModel m = unit_model(2);
  CHECK(dp_violation(m, d) == doctest::Approx(0.5));
  CHECK(dp_violation(m, d) >= 0.0);
  CHECK(dp_violation(m, d) <= 1.0);
}

TEST_CASE("constant deciders have zero parity violation") {
  RandomStream rng(5);
  Dataset d = testsupport::random_1d(60, 0.3, 1.0, rng);
  Eigen::VectorXi all_one = Eigen::VectorXi::Ones(d.n());
  Eigen::VectorXi all_zero = Eigen::VectorXi::Zero(d.n());
  CHECK(dp_violation(all_one, d) == doctest::Approx(0.0));
  CHECK(dp_violation(all_zero, d) == doctest::Approx(0.0));
}

TEST_CASE("risk and parity are invariant under row permutation") {
  RandomStream rng(17);
  Dataset d = testsupport::random_1d(120, 0.6, 1.3, rng);
  Dataset dp = testsupport::permuted(d, rng);
  LinearModel m = unit_model(2);
  m.bias = -0.2;
  CHECK(empirical_risk(m, d) == doctest::Approx(empirical_risk(m, dp)).epsilon(1e-12));
  CHECK(dp_violation(m, d) == doctest::Approx(dp_violation(m, dp)).epsilon(1e-12));
}

TEST_CASE("parity violation needs both groups present") {
  Dataset d = testsupport::make_dataset_1d({1.0, 2.0}, {1, 0}, {1, 1});
  LinearModel m = unit_model(2);
  CHECK_THROWS_AS(dp_violation(m, d), Error);
}

TEST_CASE("parity violation accepts an arbitrary decision rule") {
  Dataset d = testsupport::make_dataset_1d({1.0, -1.0, 1.0, 2.0}, {1, 0, 1, 1}, {0, 0, 1, 1});
  auto rule = [](const Eigen::Ref<const Eigen::VectorXd>& x) { return x(0) > 0.0 ? 1 : 0; };
  CHECK(dp_violation(rule, d) == doctest::Approx(0.5));
}

TEST_CASE("model JSON round trip preserves every coefficient") {
  LinearModel m;
  m.weights = Eigen::VectorXd::LinSpaced(5, -0.7, 2.3);
  m.bias = -0.03125;
  m.schema_hash = 0xdeadbeefcafe1234ull;
  LinearModel back = model_from_json(model_to_json(m));
  REQUIRE(back.weights.size() == 5);
  CHECK((back.weights - m.weights).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.bias == m.bias);
  CHECK(back.schema_hash == m.schema_hash);
}

TEST_CASE("scoring rejects dimension mismatches") {
  Dataset d = testsupport::make_dataset_1d({1.0, -1.0}, {1, 0}, {0, 1});
  LinearModel m = unit_model(5);
  CHECK_THROWS_AS(scores(m, d), Error);
}

// Linear classifier plumbing: clipped scores, hard decisions, empirical risk,
// and the demographic parity violation of arbitrary decision rules, plus JSON
// round-tripping for trained models.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json.hpp>
#include <string>

#include "flea/common.hpp"
#include "flea/dataset.hpp"

namespace flea {

// f(x) = 1 iff clip(w.x + b) > 0; the tie at exactly 0 resolves to label 0.
struct LinearModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  std::uint64_t schema_hash = 0;  // hash of the schema the model was fit on, 0 if none

  double raw_score(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return clip(weights.dot(x) + bias, -kScoreClip, kScoreClip);
  }
  int decide(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return raw_score(x) > 0.0 ? 1 : 0;
  }
  double prob(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return sigmoid_clipped(weights.dot(x) + bias);
  }
};

inline Eigen::VectorXd scores(const LinearModel& m, const Dataset& d) {
  require(m.weights.size() == d.dim(), "value", "model/dataset dimension mismatch");
  Eigen::VectorXd s = (d.features * m.weights).array() + m.bias;
  return s.cwiseMax(-kScoreClip).cwiseMin(kScoreClip);
}

inline Eigen::VectorXi decisions(const LinearModel& m, const Dataset& d) {
  Eigen::VectorXd s = scores(m, d);
  Eigen::VectorXi out(d.n());
  for (int i = 0; i < d.n(); ++i) out(i) = s(i) > 0.0 ? 1 : 0;
  return out;
}

inline double empirical_risk(const Eigen::VectorXi& decided, const Dataset& d) {
  require(d.n() > 0, "value", "empirical risk of empty dataset");
  require(decided.size() == d.n(), "value", "decision vector size mismatch");
  int wrong = 0;
  for (int i = 0; i < d.n(); ++i)
    if (decided(i) != d.labels(i)) ++wrong;
  return static_cast<double>(wrong) / d.n();
}

inline double empirical_risk(const LinearModel& m, const Dataset& d) {
  return empirical_risk(decisions(m, d), d);
}

// Demographic parity violation of hard decisions: absolute difference of the
// positive-decision rates of the two protected groups. Requires both groups
// to be present.
inline double dp_violation(const Eigen::VectorXi& decided, const Dataset& d) {
  require(decided.size() == d.n(), "value", "decision vector size mismatch");
  long n1 = 0, n0 = 0, p1 = 0, p0 = 0;
  for (int i = 0; i < d.n(); ++i) {
    if (d.protected_attr(i) == 1) {
      ++n1;
      p1 += decided(i);
    } else {
      ++n0;
      p0 += decided(i);
    }
  }
  require(n0 > 0 && n1 > 0, "value", "demographic parity needs both protected groups");
  return std::abs(static_cast<double>(p1) / n1 - static_cast<double>(p0) / n0);
}

inline double dp_violation(const LinearModel& m, const Dataset& d) {
  return dp_violation(decisions(m, d), d);
}

// generic decision rule x -> {0,1}
inline double dp_violation(const std::function<int(const Eigen::Ref<const Eigen::VectorXd>&)>& rule,
                           const Dataset& d) {
  Eigen::VectorXi dec(d.n());
  for (int i = 0; i < d.n(); ++i) dec(i) = rule(d.features.row(i).transpose());
  return dp_violation(dec, d);
}

inline nlohmann::json model_to_json(const LinearModel& m) {
  nlohmann::json j;
  j["weights"] = std::vector<double>(m.weights.data(), m.weights.data() + m.weights.size());
  j["bias"] = m.bias;
  j["schema_hash"] = m.schema_hash;
  return j;
}

inline LinearModel model_from_json(const nlohmann::json& j) {
  LinearModel m;
  auto w = j.at("weights").get<std::vector<double>>();
  m.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<int>(w.size()));
  m.bias = j.at("bias").get<double>();
  m.schema_hash = j.value("schema_hash", std::uint64_t{0});
  return m;
}

}  // namespace flea

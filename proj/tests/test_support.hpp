// Shared helpers for the test suites: a per-process synthetic fixture
// directory and small dataset builders for hand-made inputs.
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "flea/dataset.hpp"
#include "flea/synthdata.hpp"

namespace testsupport {

// Writes the four benchmark fixtures once per process into a scratch
// directory next to the test binary and returns its path.
inline const std::string& fixture_dir() {
  static const std::string dir = [] {
    std::string d = "flea_test_fixtures";
    std::filesystem::create_directories(d);
    for (const char* id : {"compas", "adult", "germancredit", "drugs"}) {
      std::string path = d + std::string("/") + id + ".csv";
      if (!std::filesystem::exists(path)) flea::synthdata::write_fixture(id, path);
    }
    return d;
  }();
  return dir;
}

inline std::string fixture_path(const std::string& id) {
  return fixture_dir() + "/" + id + ".csv";
}

// Builds an encoded dataset from explicit parts. The protected attribute is
// appended as the final feature column and a matching all-numeric schema is
// attached, so helpers that rely on the mirror-column convention (adversaries,
// postprocessing, the disparity estimator) behave exactly as they do on
// loader output.
inline flea::Dataset make_dataset(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                                  const Eigen::VectorXi& a) {
  auto sc = std::make_shared<flea::FeatureSchema>();
  sc->dataset_id = "test";
  for (int j = 0; j < X.cols(); ++j)
    sc->columns.push_back({"x" + std::to_string(j), flea::FeatureSchema::Kind::Numeric, {}, {},
                           false});
  sc->protected_column = "a";
  sc->target_column = "y";

  flea::Dataset d;
  d.schema = sc;
  d.features.resize(X.rows(), X.cols() + 1);
  d.features.leftCols(X.cols()) = X;
  d.features.col(X.cols()) = a.cast<double>();
  d.labels = y;
  d.protected_attr = a;
  d.check_valid();
  return d;
}

// Strictly one-column dataset: the protected attribute is tracked in the
// dataset but NOT mirrored into the features, so the feature space is exactly
// the 1-D threshold family the exact sweep oracles quantify over.
inline flea::Dataset make_dataset_1d_plain(const std::vector<double>& x,
                                           const std::vector<int>& y,
                                           const std::vector<int>& a) {
  auto sc = std::make_shared<flea::FeatureSchema>();
  sc->dataset_id = "test1d";
  sc->columns.push_back({"x", flea::FeatureSchema::Kind::Numeric, {}, {}, false});
  sc->protected_column = "a";
  sc->target_column = "y";
  sc->include_protected_in_features = false;

  const int n = static_cast<int>(x.size());
  flea::Dataset d;
  d.schema = sc;
  d.features.resize(n, 1);
  d.labels.resize(n);
  d.protected_attr.resize(n);
  for (int i = 0; i < n; ++i) {
    d.features(i, 0) = x[static_cast<std::size_t>(i)];
    d.labels(i) = y[static_cast<std::size_t>(i)];
    d.protected_attr(i) = a[static_cast<std::size_t>(i)];
  }
  d.check_valid();
  return d;
}

// One-feature convenience built from plain vectors.
inline flea::Dataset make_dataset_1d(const std::vector<double>& x, const std::vector<int>& y,
                                     const std::vector<int>& a) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXi yv(n), av(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = x[static_cast<std::size_t>(i)];
    yv(i) = y[static_cast<std::size_t>(i)];
    av(i) = a[static_cast<std::size_t>(i)];
  }
  return make_dataset(X, yv, av);
}

// Random two-group sample in one dimension: group a is N(shift*(2a-1), 1),
// label y follows a logistic link on x with the given slope.
inline flea::Dataset random_1d(int n, double shift, double slope, flea::RandomStream& rng) {
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXi y(n), a(n);
  for (int i = 0; i < n; ++i) {
    a(i) = rng.next_bernoulli(0.5) ? 1 : 0;
    X(i, 0) = shift * (2 * a(i) - 1) + rng.next_normal();
    y(i) = rng.next_bernoulli(flea::sigmoid_clipped(slope * X(i, 0))) ? 1 : 0;
  }
  return make_dataset(X, y, a);
}

// Row permutation of a dataset, for permutation-invariance properties.
inline flea::Dataset permuted(const flea::Dataset& d, flea::RandomStream& rng) {
  auto perm = rng.permutation(static_cast<std::size_t>(d.n()));
  std::vector<int> idx(perm.begin(), perm.end());
  return d.subset(idx);
}

}  // namespace testsupport

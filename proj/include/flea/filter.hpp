// Source filtering: order-statistic quantiles of pairwise D-scores, the
// quantile-of-quantiles selection rule, and the end-to-end train-on-selected
// driver. The filter decision itself is a pure function of the D matrix and
// is exposed separately (filter_from_matrix) so its properties can be tested
// without running any estimator.
#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "flea/dscore.hpp"

namespace flea {

enum class FilterMeasure { combined, disc_only, disp_only, disb_only };

inline std::string to_string(FilterMeasure m) {
  switch (m) {
    case FilterMeasure::combined: return "combined";
    case FilterMeasure::disc_only: return "disc_only";
    case FilterMeasure::disp_only: return "disp_only";
    case FilterMeasure::disb_only: return "disb_only";
  }
  return "?";
}

struct FilterConfig {
  double alpha = 0.5;
  DScoreConfig dscore;

  void check() const {
    require(alpha >= 0.5 && alpha <= 1.0, "config", "alpha must lie in [0.5, 1]");
    dscore.check();
  }
};

struct FilterDiagnostics {
  Eigen::MatrixXd d_matrix;            // N x N, zero diagonal
  std::vector<PairScore> pair_breakdown;  // row-major N*N
  std::vector<double> q_values;
  double threshold = 0.0;
  std::vector<int> selected;           // ascending source indices with q_i <= threshold
  std::vector<int> source_sizes;       // all N sources (selected subset sums to |union|)
};

// ceil(alpha*N)-th smallest value, no interpolation. The small slack inside
// the ceil guards against cases like 0.6*5 evaluating to 3.0000000000000004.
inline double alpha_quantile(std::vector<double> values, double alpha) {
  require(!values.empty(), "value", "quantile of empty list");
  require(alpha > 0.0 && alpha <= 1.0, "value", "alpha must lie in (0, 1]");
  int n = static_cast<int>(values.size());
  int k = static_cast<int>(std::ceil(alpha * n - 1e-9));
  k = std::max(1, std::min(n, k));
  std::sort(values.begin(), values.end());
  return values[static_cast<std::size_t>(k - 1)];
}

// Pure selection rule: per-row alpha-quantile, then keep every source whose
// row quantile is at most the alpha-quantile of all row quantiles. Ties at
// the threshold are included, so the selection can exceed ceil(alpha*N).
inline FilterDiagnostics filter_from_matrix(Eigen::MatrixXd d_matrix, double alpha) {
  const int n = static_cast<int>(d_matrix.rows());
  require(n >= 1 && d_matrix.cols() == n, "value", "D matrix must be square");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      require(std::isfinite(d_matrix(i, j)), "value", "non-finite D-score");

  FilterDiagnostics out;
  out.d_matrix = std::move(d_matrix);
  out.q_values.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = out.d_matrix(i, j);
    out.q_values[static_cast<std::size_t>(i)] = alpha_quantile(row, alpha);
  }
  out.threshold = alpha_quantile(out.q_values, alpha);
  for (int i = 0; i < n; ++i)
    if (out.q_values[static_cast<std::size_t>(i)] <= out.threshold) out.selected.push_back(i);
  return out;
}

namespace detail {

inline PairScore pair_score_measure(const Dataset& s1, const Dataset& s2, const DScoreConfig& cfg,
                                    FilterMeasure measure) {
  if (measure == FilterMeasure::combined) return pair_score(s1, s2, cfg);
  PairScore p;
  bool degenerate = s1.group_count(0) == 0 || s1.group_count(1) == 0 ||
                    s2.group_count(0) == 0 || s2.group_count(1) == 0;
  switch (measure) {
    case FilterMeasure::disc_only:
      p.disc = estimate_discrepancy(s1, s2, cfg);
      p.d_score = p.disc;
      break;
    case FilterMeasure::disp_only:
      p.disp = degenerate ? 1.0 : estimate_disparity(s1, s2, cfg);
      p.d_score = p.disp;
      break;
    case FilterMeasure::disb_only:
      p.disb = degenerate ? 1.0 : disbalance(s1, s2);
      p.d_score = p.disb;
      break;
    default: break;
  }
  return p;
}

}  // namespace detail

// Full pipeline on a bundle: D matrix from pairwise scores (computed once per
// unordered pair; the measures are symmetric up to estimator noise), zero
// diagonal, then the quantile selection above.
inline FilterDiagnostics filter_variant(const SourceBundle& bundle, const FilterConfig& cfg,
                                        FilterMeasure measure) {
  cfg.check();
  const int n = bundle.count();
  require(n >= 2, "value", "filtering needs at least two sources");

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  std::vector<PairScore> breakdown(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      PairScore p = detail::pair_score_measure(bundle.sources[static_cast<std::size_t>(i)],
                                               bundle.sources[static_cast<std::size_t>(j)], cfg.dscore,
                                               measure);
      D(i, j) = D(j, i) = p.d_score;
      breakdown[static_cast<std::size_t>(i * n + j)] = p;
      breakdown[static_cast<std::size_t>(j * n + i)] = p;
    }
  }

  FilterDiagnostics out = filter_from_matrix(std::move(D), cfg.alpha);
  out.pair_breakdown = std::move(breakdown);
  out.source_sizes.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.source_sizes[static_cast<std::size_t>(i)] = bundle.sources[static_cast<std::size_t>(i)].n();
  return out;
}

inline FilterDiagnostics filter_sources(const SourceBundle& bundle, const FilterConfig& cfg) {
  return filter_variant(bundle, cfg, FilterMeasure::combined);
}

struct FleaTrainResult {
  FittedModel model;
  FilterDiagnostics diagnostics;
};

// Algorithm: filter the sources, merge the surviving ones, train the learner.
inline FleaTrainResult flea_train(const SourceBundle& bundle, const FilterConfig& cfg,
                                  const FairLearnerConfig& learner) {
  FleaTrainResult out;
  out.diagnostics = filter_sources(bundle, cfg);
  Dataset merged = bundle.union_of(out.diagnostics.selected);
  out.model = train_learner(merged, learner);
  return out;
}

inline nlohmann::json filter_diagnostics_to_json(const FilterDiagnostics& d) {
  nlohmann::json j;
  const int n = static_cast<int>(d.d_matrix.rows());
  std::vector<std::vector<double>> mat(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    mat[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = d.d_matrix(i, k);
  }
  j["d_matrix"] = mat;
  j["q_values"] = d.q_values;
  j["threshold"] = d.threshold;
  j["selected"] = d.selected;
  j["source_sizes"] = d.source_sizes;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : d.pair_breakdown) {
    pairs.push_back({{"disc", p.disc}, {"disp", p.disp}, {"disb", p.disb}, {"d_score", p.d_score}});
  }
  j["pair_breakdown"] = pairs;
  return j;
}

// N x N D-score dump, row/column order = source index
inline void write_d_matrix_csv(const FilterDiagnostics& d, const std::string& path) {
  csv::Table t;
  const int n = static_cast<int>(d.d_matrix.rows());
  t.header.push_back("source");
  for (int j = 0; j < n; ++j) t.header.push_back("s" + std::to_string(j));
  char buf[64];
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row;
    row.push_back("s" + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.d_matrix(i, j));
      row.emplace_back(buf);
    }
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

}  // namespace flea

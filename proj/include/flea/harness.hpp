// Experiment driver: configuration parsing, seeded per-repeat data
// preparation, run-mode dispatch, aggregation, and report emission. Every
// random choice is drawn from a stream derived by hashing the master seed
// with a task-coordinate label, so any cell of any table is reproducible in
// isolation and unrelated cells never share or shift each other's draws.
// Mode and learner are deliberately absent from the labels: protection
// methods are compared on identical splits, source assignments, and
// manipulations.
#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "flea/adversaries.hpp"
#include "flea/filter.hpp"
#include "flea/learners.hpp"
#include "flea/tabular.hpp"

namespace flea::harness {

using tabular::load_dataset;
using tabular::split_sources;
using tabular::standardize_train_test;
using tabular::train_test_split;

enum class RunMode {
  baseline_all_data,
  flea,
  oracle_clean_only,
  robust_ensemble,
  ablation_disc,
  ablation_disp,
  ablation_disb,
};

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::baseline_all_data: return "baseline_all_data";
    case RunMode::flea: return "flea";
    case RunMode::oracle_clean_only: return "oracle_clean_only";
    case RunMode::robust_ensemble: return "robust_ensemble";
    case RunMode::ablation_disc: return "ablation_disc";
    case RunMode::ablation_disp: return "ablation_disp";
    case RunMode::ablation_disb: return "ablation_disb";
  }
  fail("value", "bad run mode");
}

inline RunMode mode_from_string(const std::string& s) {
  for (RunMode m : {RunMode::baseline_all_data, RunMode::flea, RunMode::oracle_clean_only,
                    RunMode::robust_ensemble, RunMode::ablation_disc, RunMode::ablation_disp,
                    RunMode::ablation_disb})
    if (s == to_string(m)) return m;
  if (s == "baseline") return RunMode::baseline_all_data;
  if (s == "oracle") return RunMode::oracle_clean_only;
  if (s == "ensemble") return RunMode::robust_ensemble;
  fail("config", "unknown run mode: " + s);
}

inline const std::vector<std::string>& known_datasets() {
  static const std::vector<std::string> ids = {"compas", "adult", "germancredit", "drugs"};
  return ids;
}

struct ExperimentConfig {
  std::vector<std::string> datasets = {"compas"};
  std::string data_dir;  // empty: fall back to $FLEA_DATA_DIR
  std::vector<int> n_sources = {5};
  int num_manipulated = -1;  // -1: floor((N-1)/2)
  std::vector<std::string> adversaries = {"none"};
  std::vector<LearnerKind> learners = {LearnerKind::unaware};
  std::vector<RunMode> modes = {RunMode::flea};
  double alpha = -1.0;  // -1: (N - num_manipulated) / N
  int repeats = 10;
  std::uint64_t master_seed = 20240613;
  double train_fraction = 0.8;
  FairLearnerConfig learner_cfg;  // kind field is overwritten per cell
  DScoreConfig dscore;

  int manipulated_for(int n) const { return num_manipulated < 0 ? (n - 1) / 2 : num_manipulated; }

  double alpha_for(int n) const {
    if (alpha >= 0.0) return alpha;
    return static_cast<double>(n - manipulated_for(n)) / static_cast<double>(n);
  }

  std::string resolved_data_dir() const {
    if (!data_dir.empty()) return data_dir;
    const char* env = std::getenv("FLEA_DATA_DIR");
    if (env != nullptr && env[0] != '\0') return env;
    fail("config", "no data directory: set data_dir in the config or export FLEA_DATA_DIR");
  }

  std::string path_for(const std::string& dataset_id) const {
    return resolved_data_dir() + "/" + dataset_id + ".csv";
  }

  void check() const {
    require(!datasets.empty(), "config", "no datasets configured");
    for (const auto& id : datasets) {
      bool known = false;
      for (const auto& k : known_datasets()) known = known || k == id;
      require(known, "config", "unknown dataset id: " + id);
    }
    require(!n_sources.empty(), "config", "no source counts configured");
    for (int n : n_sources) {
      require(n >= 2, "config", "n_sources must be at least 2");
      int m = manipulated_for(n);
      require(m >= 0 && m < n, "config", "num_manipulated must be in [0, N-1]");
      double a = alpha_for(n);
      require(a >= 0.5 && a <= 1.0, "config", "alpha must land in [0.5, 1]");
    }
    require(repeats >= 1, "config", "repeats must be positive");
    require(train_fraction > 0.0 && train_fraction < 1.0, "config",
            "train_fraction must be in (0, 1)");
    require(!adversaries.empty() && !learners.empty() && !modes.empty(), "config",
            "adversary, learner, and mode lists must be non-empty");
    for (const auto& a : adversaries)
      if (a != "none") adversary_from_string(a);  // throws on bad name
    learner_cfg.check();
    dscore.check();
  }
};

// --- flat key-value config files -------------------------------------------

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      std::string t = csv::trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  std::string t = csv::trim(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

inline int parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    int x = std::stoi(v, &used);
    require(used == v.size(), "config", "trailing junk in " + key + ": " + v);
    return x;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail("config", "bad integer for " + key + ": " + v);
  }
}

inline double parse_real(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    require(used == v.size(), "config", "trailing junk in " + key + ": " + v);
    return x;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail("config", "bad number for " + key + ": " + v);
  }
}

}  // namespace detail

// One key=value assignment; shared by the file parser and CLI overrides.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_int;
  using detail::parse_real;
  using detail::split_list;
  if (key == "dataset" || key == "datasets") {
    cfg.datasets = split_list(value);
  } else if (key == "data_dir") {
    cfg.data_dir = value;
  } else if (key == "n_sources") {
    cfg.n_sources.clear();
    for (const auto& v : split_list(value)) cfg.n_sources.push_back(parse_int(v, key));
  } else if (key == "num_manipulated") {
    cfg.num_manipulated = parse_int(value, key);
  } else if (key == "adversary" || key == "adversaries") {
    cfg.adversaries.clear();
    for (const auto& v : split_list(value)) {
      if (v == "all") {
        for (AdversaryKind k : all_adversaries()) cfg.adversaries.push_back(to_string(k));
      } else {
        cfg.adversaries.push_back(v);
      }
    }
  } else if (key == "learner" || key == "learners") {
    cfg.learners.clear();
    for (const auto& v : split_list(value)) {
      if (v == "all") {
        for (LearnerKind k : {LearnerKind::unaware, LearnerKind::fair_reg, LearnerKind::fair_pp,
                              LearnerKind::fair_adv})
          cfg.learners.push_back(k);
      } else {
        cfg.learners.push_back(learner_from_string(v));
      }
    }
  } else if (key == "mode" || key == "modes") {
    cfg.modes.clear();
    for (const auto& v : split_list(value)) cfg.modes.push_back(mode_from_string(v));
  } else if (key == "alpha") {
    cfg.alpha = parse_real(value, key);
  } else if (key == "repeats") {
    cfg.repeats = parse_int(value, key);
  } else if (key == "master_seed") {
    cfg.master_seed = static_cast<std::uint64_t>(std::stoull(value));
  } else if (key == "train_fraction") {
    cfg.train_fraction = parse_real(value, key);
  } else if (key == "eta") {
    cfg.learner_cfg.eta = parse_real(value, key);
  } else if (key == "epsilon") {
    cfg.learner_cfg.epsilon = parse_real(value, key);
  } else if (key == "eta_disparity") {
    cfg.dscore.eta_disparity = parse_real(value, key);
  } else if (key == "max_iterations") {
    int it = parse_int(value, key);
    cfg.learner_cfg.budget.max_iterations = it;
    cfg.dscore.budget.max_iterations = it;
  } else if (key == "adversary_steps") {
    cfg.learner_cfg.adversary_budget.steps = parse_int(value, key);
  } else {
    fail("config", "unknown config key: " + key);
  }
}

inline ExperimentConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io", "cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    require(eq != std::string::npos, "config",
            "expected key=value at " + path + ":" + std::to_string(lineno));
    apply_setting(cfg, csv::trim(line.substr(0, eq)), csv::trim(line.substr(eq + 1)));
  }
  return cfg;
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["datasets"] = cfg.datasets;
  j["n_sources"] = cfg.n_sources;
  j["num_manipulated"] = cfg.num_manipulated;
  j["adversaries"] = cfg.adversaries;
  std::vector<std::string> lks, mds;
  for (auto k : cfg.learners) lks.push_back(to_string(k));
  for (auto m : cfg.modes) mds.push_back(to_string(m));
  j["learners"] = lks;
  j["modes"] = mds;
  j["alpha"] = cfg.alpha;
  j["repeats"] = cfg.repeats;
  j["master_seed"] = cfg.master_seed;
  j["train_fraction"] = cfg.train_fraction;
  j["eta"] = cfg.learner_cfg.eta;
  j["eta_disparity"] = cfg.dscore.eta_disparity;
  return j;
}

// --- seeded per-repeat data preparation --------------------------------------

namespace detail {

inline std::string repeat_label(const std::string& dataset_id, int n, int r) {
  return dataset_id + "/N" + std::to_string(n) + "/r" + std::to_string(r);
}

}  // namespace detail

// Split, standardization, source assignment, and the affected-source choice
// are shared by every adversary, mode, and learner of one repeat.
struct RepeatBase {
  Dataset train;
  Dataset test;
  SourceBundle clean_bundle;
  std::vector<int> affected;  // first num_manipulated of a seeded shuffle, sorted
};

inline RepeatBase prepare_base(const Dataset& full, const ExperimentConfig& cfg,
                               const std::string& dataset_id, int n_sources, int r) {
  std::string base = detail::repeat_label(dataset_id, n_sources, r);
  RepeatBase out;
  auto parts = train_test_split(full, cfg.train_fraction,
                                derive_seed(cfg.master_seed, base + "/split"));
  out.train = std::move(parts.first);
  out.test = std::move(parts.second);
  standardize_train_test(out.train, out.test);
  out.clean_bundle =
      split_sources(out.train, n_sources, derive_seed(cfg.master_seed, base + "/sources"));
  int m = cfg.manipulated_for(n_sources);
  RandomStream rng(derive_seed(cfg.master_seed, base + "/affected"));
  auto perm = rng.permutation(static_cast<std::size_t>(n_sources));
  out.affected.assign(perm.begin(), perm.begin() + m);
  std::sort(out.affected.begin(), out.affected.end());
  return out;
}

inline SourceBundle bundle_for_adversary(const RepeatBase& base, const ExperimentConfig& cfg,
                                         const std::string& dataset_id, int n_sources, int r,
                                         const std::string& adversary) {
  if (adversary == "none" || base.affected.empty()) {
    SourceBundle b = base.clean_bundle;
    if (b.clean_flags.empty()) b.clean_flags.assign(b.sources.size(), 1);
    return b;
  }
  std::string label =
      detail::repeat_label(dataset_id, n_sources, r) + "/adversary/" + adversary;
  return apply_adversary(adversary_from_string(adversary), base.clean_bundle, base.affected,
                         derive_seed(cfg.master_seed, label));
}

// --- per-repeat outcomes and aggregation -------------------------------------

struct RepeatOutcome {
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double dp = std::numeric_limits<double>::quiet_NaN();
  double manipulated_fraction = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> selected;
  bool fallback = false;
};

struct CellStats {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double std_dev = std::numeric_limits<double>::quiet_NaN();
};

inline CellStats summarize(const std::vector<double>& xs) {
  CellStats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() == 1) {
    s.std_dev = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std_dev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return s;
}

// Fraction of rows in the trained-on sources that came from manipulated
// sources; `selected` lists the trained-on source indices.
inline double manipulated_row_fraction(const SourceBundle& bundle,
                                       const std::vector<int>& selected) {
  long total = 0, bad = 0;
  for (int i : selected) {
    const auto& s = bundle.sources.at(static_cast<std::size_t>(i));
    total += s.n();
    if (!bundle.clean_flags.empty() && bundle.clean_flags[static_cast<std::size_t>(i)] == 0)
      bad += s.n();
  }
  require(total > 0, "state", "no rows in selected sources");
  return static_cast<double>(bad) / static_cast<double>(total);
}

inline std::vector<int> all_indices(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

inline std::vector<int> clean_indices(const SourceBundle& bundle) {
  std::vector<int> v;
  for (int i = 0; i < bundle.count(); ++i)
    if (bundle.clean_flags.empty() || bundle.clean_flags[static_cast<std::size_t>(i)] == 1)
      v.push_back(i);
  return v;
}

// Caches filter diagnostics per measure so several modes and learners of one
// (repeat, adversary) block pay for each pairwise-score matrix once.
class FilterCache {
 public:
  FilterCache(const SourceBundle& bundle, FilterConfig cfg) : bundle_(bundle), cfg_(cfg) {}

  const FilterDiagnostics& get(FilterMeasure m) {
    auto it = diags_.find(m);
    if (it != diags_.end()) return it->second;
    return diags_.emplace(m, filter_variant(bundle_, cfg_, m)).first->second;
  }

 private:
  const SourceBundle& bundle_;
  FilterConfig cfg_;
  std::map<FilterMeasure, FilterDiagnostics> diags_;
};

inline RepeatOutcome run_mode_on(const RepeatBase& base, const SourceBundle& bundle,
                                 FilterCache& cache, RunMode mode, LearnerKind learner,
                                 const ExperimentConfig& cfg) {
  FairLearnerConfig lcfg = cfg.learner_cfg;
  lcfg.kind = learner;
  RepeatOutcome out;
  FittedModel model;
  switch (mode) {
    case RunMode::baseline_all_data:
      out.selected = all_indices(bundle.count());
      model = train_learner(bundle.union_all(), lcfg);
      break;
    case RunMode::oracle_clean_only:
      out.selected = clean_indices(bundle);
      model = train_learner(bundle.union_of(out.selected), lcfg);
      break;
    case RunMode::robust_ensemble:
      out.selected = all_indices(bundle.count());
      model = robust_ensemble(bundle, lcfg);
      break;
    case RunMode::flea:
    case RunMode::ablation_disc:
    case RunMode::ablation_disp:
    case RunMode::ablation_disb: {
      FilterMeasure m = FilterMeasure::combined;
      if (mode == RunMode::ablation_disc) m = FilterMeasure::disc_only;
      if (mode == RunMode::ablation_disp) m = FilterMeasure::disp_only;
      if (mode == RunMode::ablation_disb) m = FilterMeasure::disb_only;
      out.selected = cache.get(m).selected;
      model = train_learner(bundle.union_of(out.selected), lcfg);
      break;
    }
  }
  out.fallback = model.fallback_plain;
  out.manipulated_fraction = manipulated_row_fraction(bundle, out.selected);
  Eigen::VectorXi decided = model.decide_all(base.test);
  out.accuracy = 1.0 - empirical_risk(decided, base.test);
  out.dp = dp_violation(decided, base.test);
  return out;
}

// --- experiment grids ---------------------------------------------------------

struct CellResult {
  std::string dataset;
  int n_sources = 0;
  RunMode mode = RunMode::flea;
  std::string adversary = "none";
  LearnerKind learner = LearnerKind::unaware;
  int repeats = 0;
  double chance = std::numeric_limits<double>::quiet_NaN();
  CellStats accuracy, dp, manipulated_fraction;
  int fallback_count = 0;
  std::vector<RepeatOutcome> detail;
};

struct ExperimentReport {
  nlohmann::json config_echo;
  std::vector<CellResult> cells;
  double wall_ms = 0.0;
};

inline void finalize_cell(CellResult& c) {
  std::vector<double> acc, dp, frac;
  c.fallback_count = 0;
  for (const auto& o : c.detail) {
    acc.push_back(o.accuracy);
    dp.push_back(o.dp);
    frac.push_back(o.manipulated_fraction);
    if (o.fallback) ++c.fallback_count;
  }
  c.repeats = static_cast<int>(c.detail.size());
  c.accuracy = summarize(acc);
  c.dp = summarize(dp);
  c.manipulated_fraction = summarize(frac);
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config_echo = config_to_json(cfg);
  int n = cfg.n_sources.front();
  for (const auto& ds : cfg.datasets) {
    const Dataset full = load_dataset(ds, cfg.path_for(ds));
    // cell layout is fixed up front so repeat outcomes can stream in
    std::size_t first = rep.cells.size();
    for (const auto& adv : cfg.adversaries)
      for (RunMode mode : cfg.modes)
        for (LearnerKind lk : cfg.learners) {
          CellResult c;
          c.dataset = ds;
          c.n_sources = n;
          c.mode = mode;
          c.adversary = adv;
          c.learner = lk;
          c.chance = adv == "none" ? std::numeric_limits<double>::quiet_NaN()
                                   : static_cast<double>(cfg.manipulated_for(n)) / n;
          rep.cells.push_back(std::move(c));
        }
    for (int r = 0; r < cfg.repeats; ++r) {
      RepeatBase base = prepare_base(full, cfg, ds, n, r);
      std::size_t cell_ix = first;
      for (const auto& adv : cfg.adversaries) {
        SourceBundle bundle = bundle_for_adversary(base, cfg, ds, n, r, adv);
        FilterConfig fcfg;
        fcfg.alpha = cfg.alpha_for(n);
        fcfg.dscore = cfg.dscore;
        FilterCache cache(bundle, fcfg);
        for (RunMode mode : cfg.modes)
          for (LearnerKind lk : cfg.learners)
            rep.cells[cell_ix++].detail.push_back(run_mode_on(base, bundle, cache, mode, lk, cfg));
      }
    }
  }
  for (auto& c : rep.cells) finalize_cell(c);
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                    .count();
  return rep;
}

// Detection table: no learner ever runs, only the filter.
struct DetectionCell {
  std::string dataset;
  int n_sources = 0;
  std::string adversary;
  int repeats = 0;
  CellStats fraction;
  double chance = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<DetectionCell> run_detection_table(const ExperimentConfig& cfg,
                                                      FilterMeasure measure = FilterMeasure::combined) {
  cfg.check();
  std::vector<DetectionCell> table;
  for (const auto& ds : cfg.datasets) {
    const Dataset full = load_dataset(ds, cfg.path_for(ds));
    for (int n : cfg.n_sources) {
      std::size_t first = table.size();
      for (const auto& adv : cfg.adversaries) {
        DetectionCell c;
        c.dataset = ds;
        c.n_sources = n;
        c.adversary = adv;
        c.chance = adv == "none" ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(cfg.manipulated_for(n)) / n;
        table.push_back(std::move(c));
      }
      std::vector<std::vector<double>> fracs(cfg.adversaries.size());
      for (int r = 0; r < cfg.repeats; ++r) {
        RepeatBase base = prepare_base(full, cfg, ds, n, r);
        for (std::size_t ai = 0; ai < cfg.adversaries.size(); ++ai) {
          SourceBundle bundle = bundle_for_adversary(base, cfg, ds, n, r, cfg.adversaries[ai]);
          FilterConfig fcfg;
          fcfg.alpha = cfg.alpha_for(n);
          fcfg.dscore = cfg.dscore;
          FilterDiagnostics diag = filter_variant(bundle, fcfg, measure);
          fracs[ai].push_back(manipulated_row_fraction(bundle, diag.selected));
        }
      }
      for (std::size_t ai = 0; ai < cfg.adversaries.size(); ++ai) {
        table[first + ai].repeats = cfg.repeats;
        table[first + ai].fraction = summarize(fracs[ai]);
      }
    }
  }
  return table;
}

struct AblationCell {
  std::string dataset;
  FilterMeasure measure = FilterMeasure::combined;
  std::string adversary;
  int repeats = 0;
  CellStats fraction;
  double chance = std::numeric_limits<double>::quiet_NaN();
};

// Same detection grid once per filtering variant (combined plus each
// single-measure ablation).
inline std::vector<AblationCell> run_ablation(const ExperimentConfig& cfg) {
  std::vector<AblationCell> table;
  for (FilterMeasure m : {FilterMeasure::combined, FilterMeasure::disc_only,
                          FilterMeasure::disp_only, FilterMeasure::disb_only}) {
    for (const auto& d : run_detection_table(cfg, m)) {
      AblationCell c;
      c.dataset = d.dataset;
      c.measure = m;
      c.adversary = d.adversary;
      c.repeats = d.repeats;
      c.fraction = d.fraction;
      c.chance = d.chance;
      table.push_back(std::move(c));
    }
  }
  return table;
}

// --- report serialization -------------------------------------------------------

namespace detail {

inline nlohmann::json num_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double num_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

inline nlohmann::json stats_to_json(const CellStats& s) {
  return {{"mean", num_or_null(s.mean)}, {"std", num_or_null(s.std_dev)}};
}

inline CellStats stats_from_json(const nlohmann::json& j) {
  CellStats s;
  s.mean = num_from(j.at("mean"));
  s.std_dev = num_from(j.at("std"));
  return s;
}

}  // namespace detail

inline nlohmann::json report_to_json(const ExperimentReport& rep) {
  nlohmann::json j;
  j["config"] = rep.config_echo;
  j["wall_ms"] = rep.wall_ms;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : rep.cells) {
    nlohmann::json jc;
    jc["dataset"] = c.dataset;
    jc["n_sources"] = c.n_sources;
    jc["mode"] = to_string(c.mode);
    jc["adversary"] = c.adversary;
    jc["learner"] = to_string(c.learner);
    jc["repeats"] = c.repeats;
    jc["chance"] = detail::num_or_null(c.chance);
    jc["accuracy"] = detail::stats_to_json(c.accuracy);
    jc["dp_violation"] = detail::stats_to_json(c.dp);
    jc["manipulated_fraction"] = detail::stats_to_json(c.manipulated_fraction);
    jc["fallback_count"] = c.fallback_count;
    jc["detail"] = nlohmann::json::array();
    for (const auto& o : c.detail) {
      jc["detail"].push_back({{"accuracy", o.accuracy},
                              {"dp_violation", o.dp},
                              {"manipulated_fraction", o.manipulated_fraction},
                              {"selected", o.selected},
                              {"fallback", o.fallback}});
    }
    j["cells"].push_back(std::move(jc));
  }
  return j;
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport rep;
  rep.config_echo = j.at("config");
  rep.wall_ms = j.at("wall_ms").get<double>();
  for (const auto& jc : j.at("cells")) {
    CellResult c;
    c.dataset = jc.at("dataset").get<std::string>();
    c.n_sources = jc.at("n_sources").get<int>();
    c.mode = mode_from_string(jc.at("mode").get<std::string>());
    c.adversary = jc.at("adversary").get<std::string>();
    c.learner = learner_from_string(jc.at("learner").get<std::string>());
    c.repeats = jc.at("repeats").get<int>();
    c.chance = detail::num_from(jc.at("chance"));
    c.accuracy = detail::stats_from_json(jc.at("accuracy"));
    c.dp = detail::stats_from_json(jc.at("dp_violation"));
    c.manipulated_fraction = detail::stats_from_json(jc.at("manipulated_fraction"));
    c.fallback_count = jc.at("fallback_count").get<int>();
    for (const auto& jo : jc.at("detail")) {
      RepeatOutcome o;
      o.accuracy = jo.at("accuracy").get<double>();
      o.dp = jo.at("dp_violation").get<double>();
      o.manipulated_fraction = jo.at("manipulated_fraction").get<double>();
      o.selected = jo.at("selected").get<std::vector<int>>();
      o.fallback = jo.at("fallback").get<bool>();
      c.detail.push_back(std::move(o));
    }
    rep.cells.push_back(std::move(c));
  }
  return rep;
}

// Semantic identity of a report; wall time is excluded so a rerun of the
// same config fingerprints identically.
inline std::uint64_t report_fingerprint(const ExperimentReport& rep) {
  nlohmann::json j = report_to_json(rep);
  j.erase("wall_ms");
  return fnv1a64(j.dump());
}

namespace detail {

inline std::string fmt_num(double v) {
  if (std::isnan(v)) return "";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace detail

inline csv::Table report_to_csv(const ExperimentReport& rep) {
  csv::Table t;
  t.header = {"dataset",       "n_sources",    "mode",
              "adversary",     "learner",      "repeats",
              "accuracy_mean", "accuracy_std", "dp_mean",
              "dp_std",        "manipulated_fraction_mean", "manipulated_fraction_std",
              "chance",        "fallback_count"};
  for (const auto& c : rep.cells) {
    t.rows.push_back({c.dataset, std::to_string(c.n_sources), to_string(c.mode), c.adversary,
                      to_string(c.learner), std::to_string(c.repeats),
                      detail::fmt_num(c.accuracy.mean), detail::fmt_num(c.accuracy.std_dev),
                      detail::fmt_num(c.dp.mean), detail::fmt_num(c.dp.std_dev),
                      detail::fmt_num(c.manipulated_fraction.mean),
                      detail::fmt_num(c.manipulated_fraction.std_dev), detail::fmt_num(c.chance),
                      std::to_string(c.fallback_count)});
  }
  return t;
}

// Bar-chart data: one row per (mode, adversary, metric). Requires a report
// over a single dataset and learner so rows map one-to-one onto bars.
inline csv::Table report_to_plotdata(const ExperimentReport& rep) {
  for (const auto& c : rep.cells) {
    require(c.dataset == rep.cells.front().dataset && c.learner == rep.cells.front().learner,
            "config", "plot data needs a single-dataset, single-learner report");
  }
  csv::Table t;
  t.header = {"mode", "adversary", "metric", "mean", "std"};
  for (const auto& c : rep.cells) {
    t.rows.push_back({to_string(c.mode), c.adversary, "accuracy",
                      detail::fmt_num(c.accuracy.mean), detail::fmt_num(c.accuracy.std_dev)});
    t.rows.push_back({to_string(c.mode), c.adversary, "dp_violation",
                      detail::fmt_num(c.dp.mean), detail::fmt_num(c.dp.std_dev)});
  }
  return t;
}

inline void emit_report(const ExperimentReport& rep, const std::string& format,
                        const std::string& path) {
  if (format == "json") {
    std::ofstream out(path);
    require(out.good(), "io", "cannot write " + path);
    out << report_to_json(rep).dump(2) << "\n";
    require(out.good(), "io", "write failed: " + path);
    return;
  }
  if (format == "csv") return csv::write_file(path, report_to_csv(rep));
  if (format == "plotdata") return csv::write_file(path, report_to_plotdata(rep));
  fail("config", "unknown report format: " + format);
}

inline csv::Table detection_to_csv(const std::vector<DetectionCell>& table) {
  csv::Table t;
  t.header = {"dataset", "n_sources", "adversary", "repeats", "fraction_mean", "fraction_std",
              "chance"};
  for (const auto& c : table) {
    t.rows.push_back({c.dataset, std::to_string(c.n_sources), c.adversary,
                      std::to_string(c.repeats), detail::fmt_num(c.fraction.mean),
                      detail::fmt_num(c.fraction.std_dev), detail::fmt_num(c.chance)});
  }
  return t;
}

inline nlohmann::json detection_to_json(const std::vector<DetectionCell>& table) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : table) {
    j.push_back({{"dataset", c.dataset},
                 {"n_sources", c.n_sources},
                 {"adversary", c.adversary},
                 {"repeats", c.repeats},
                 {"fraction", detail::stats_to_json(c.fraction)},
                 {"chance", detail::num_or_null(c.chance)}});
  }
  return j;
}

inline csv::Table ablation_to_csv(const std::vector<AblationCell>& table) {
  csv::Table t;
  t.header = {"dataset", "measure", "adversary", "repeats", "fraction_mean", "fraction_std",
              "chance"};
  for (const auto& c : table) {
    t.rows.push_back({c.dataset, to_string(c.measure), c.adversary, std::to_string(c.repeats),
                      detail::fmt_num(c.fraction.mean), detail::fmt_num(c.fraction.std_dev),
                      detail::fmt_num(c.chance)});
  }
  return t;
}

inline nlohmann::json ablation_to_json(const std::vector<AblationCell>& table) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : table) {
    j.push_back({{"dataset", c.dataset},
                 {"measure", to_string(c.measure)},
                 {"adversary", c.adversary},
                 {"repeats", c.repeats},
                 {"fraction", detail::stats_to_json(c.fraction)},
                 {"chance", detail::num_or_null(c.chance)}});
  }
  return j;
}

}  // namespace flea::harness

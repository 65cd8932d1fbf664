// Dataset ingestion: published raw-CSV schemas for the four benchmark tasks,
// schema-driven one-hot encoding, train/test splitting, source splitting, and
// train-statistics standardization.
//
// Conventions (documented in the README): the protected attribute is encoded
// female = 1, male = 0 and, when included among the features, occupies the
// last feature column; raw numeric columns are standardized with statistics
// of the training split only; categorical vocabularies are exhaustive and an
// unlisted value is an ingestion error unless the column declares a catch-all
// bucket.
#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flea/csv.hpp"
#include "flea/dataset.hpp"

namespace flea::tabular {

// --- generic encoding --------------------------------------------------------

struct RawSpec {
  SchemaPtr schema;
  std::vector<std::string> protected_values;  // admissible raw values (empty: numeric)
  std::string protected_positive;             // raw value mapped to a = 1
  std::vector<std::string> target_values;     // admissible raw values (empty: numeric)
  std::string target_positive;                // raw value mapped to y = 1
};

inline double parse_double(const std::string& s, const std::string& where) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    fail("schema", where + ": not a number: '" + s + "'");
  return v;
}

inline Dataset encode_table(const csv::Table& t, const RawSpec& spec) {
  const FeatureSchema& sc = *spec.schema;
  std::vector<int> col_idx;
  for (const auto& c : sc.columns) {
    int idx = t.column(c.name);
    if (idx < 0) fail("schema", "missing required column: " + c.name);
    col_idx.push_back(idx);
  }
  int pcol = t.column(sc.protected_column);
  if (pcol < 0) fail("schema", "missing protected column: " + sc.protected_column);
  int ycol = t.column(sc.target_column);
  if (ycol < 0) fail("schema", "missing target column: " + sc.target_column);

  Dataset d;
  d.schema = spec.schema;
  int n = static_cast<int>(t.rows.size());
  d.features = Eigen::MatrixXd::Zero(n, sc.feature_dim());
  d.labels.resize(n);
  d.protected_attr.resize(n);

  for (int i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    int off = 0;
    for (std::size_t cix = 0; cix < sc.columns.size(); ++cix) {
      const auto& c = sc.columns[cix];
      const std::string& raw = row[static_cast<std::size_t>(col_idx[cix])];
      switch (c.kind) {
        case FeatureSchema::Kind::Categorical: {
          int v = -1;
          for (std::size_t k = 0; k < c.values.size(); ++k)
            if (c.values[k] == raw) { v = static_cast<int>(k); break; }
          if (v < 0) {
            if (c.collapse_unlisted) v = static_cast<int>(c.values.size()) - 1;
            else
              fail("schema", "row " + std::to_string(i + 1) + ", column '" + c.name +
                                 "': unlisted value '" + raw + "'");
          }
          d.features(i, off + v) = 1.0;
          off += static_cast<int>(c.values.size());
          break;
        }
        case FeatureSchema::Kind::Numeric: {
          d.features(i, off) = parse_double(raw, "column '" + c.name + "'");
          off += 1;
          break;
        }
        case FeatureSchema::Kind::Binned: {
          double v = parse_double(raw, "column '" + c.name + "'");
          int b = 0;
          while (b < static_cast<int>(c.bin_edges.size()) && v >= c.bin_edges[static_cast<std::size_t>(b)])
            ++b;
          d.features(i, off + b) = 1.0;
          off += static_cast<int>(c.bin_edges.size()) + 1;
          break;
        }
      }
    }

    const std::string& praw = row[static_cast<std::size_t>(pcol)];
    int a;
    if (!spec.protected_values.empty()) {
      bool known = std::find(spec.protected_values.begin(), spec.protected_values.end(),
                             praw) != spec.protected_values.end();
      if (!known)
        fail("schema", "row " + std::to_string(i + 1) + ": unlisted protected value '" +
                           praw + "'");
      a = (praw == spec.protected_positive) ? 1 : 0;
    } else {
      a = parse_double(praw, "protected column") > 0.0 ? 1 : 0;
    }
    d.protected_attr(i) = a;
    if (sc.include_protected_in_features)
      d.features(i, sc.protected_feature_index()) = static_cast<double>(a);

    const std::string& yraw = row[static_cast<std::size_t>(ycol)];
    if (!spec.target_values.empty()) {
      bool known = std::find(spec.target_values.begin(), spec.target_values.end(),
                             yraw) != spec.target_values.end();
      if (!known)
        fail("schema", "row " + std::to_string(i + 1) + ": unlisted target value '" +
                           yraw + "'");
      d.labels(i) = (yraw == spec.target_positive) ? 1 : 0;
    } else {
      d.labels(i) = parse_double(yraw, "target column") > 0.0 ? 1 : 0;
    }
  }
  return d;
}

// --- published schemas -------------------------------------------------------

inline RawSpec compas_spec() {
  auto sc = std::make_shared<FeatureSchema>();
  sc->dataset_id = "compas";
  sc->columns = {
      {"c_charge_degree", FeatureSchema::Kind::Categorical, {"F", "M"}, {}, false},
      {"age_cat",
       FeatureSchema::Kind::Categorical,
       {"Less than 25", "25 - 45", "Greater than 45"},
       {},
       false},
      {"race",
       FeatureSchema::Kind::Categorical,
       {"African-American", "Caucasian", "Hispanic", "Other"},
       {},
       true},
      {"priors_count", FeatureSchema::Kind::Numeric, {}, {}, false},
  };
  sc->protected_column = "sex";
  sc->protected_positive = "Female";
  sc->target_column = "two_year_recid";
  RawSpec spec;
  spec.schema = sc;
  spec.protected_values = {"Male", "Female"};
  spec.protected_positive = "Female";
  spec.target_values = {"0", "1"};
  spec.target_positive = "1";
  return spec;
}

inline RawSpec adult_spec() {
  auto sc = std::make_shared<FeatureSchema>();
  sc->dataset_id = "adult";
  sc->columns = {
      {"workclass",
       FeatureSchema::Kind::Categorical,
       {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov", "Local-gov",
        "State-gov", "Without-pay", "Never-worked", "unknown"},
       {},
       false},
      {"education",
       FeatureSchema::Kind::Categorical,
       {"Bachelors", "Some-college", "11th", "HS-grad", "Prof-school", "Assoc-acdm",
        "Assoc-voc", "9th", "7th-8th", "12th", "Masters", "1st-4th", "10th",
        "Doctorate", "5th-6th", "Preschool"},
       {},
       false},
      {"hours-per-week", FeatureSchema::Kind::Binned, {}, {20.0, 30.0, 40.0}, false},
      {"age", FeatureSchema::Kind::Binned, {}, {25.0, 35.0, 45.0, 55.0, 65.0}, false},
      {"native-country",
       FeatureSchema::Kind::Categorical,
       {"United-States", "other"},
       {},
       true},
      {"race",
       FeatureSchema::Kind::Categorical,
       {"Amer-Indian-Eskimo", "Asian-Pac-Islander", "Black", "White", "Other"},
       {},
       true},
  };
  sc->protected_column = "sex";
  sc->protected_positive = "Female";
  sc->target_column = "income";
  RawSpec spec;
  spec.schema = sc;
  spec.protected_values = {"Male", "Female"};
  spec.protected_positive = "Female";
  spec.target_values = {"<=50K", ">50K"};
  spec.target_positive = ">50K";
  return spec;
}

inline RawSpec germancredit_spec() {
  auto sc = std::make_shared<FeatureSchema>();
  sc->dataset_id = "germancredit";
  sc->columns = {
      {"Age", FeatureSchema::Kind::Binned, {}, {25.0, 35.0, 45.0, 55.0, 65.0}, false},
      {"Saving accounts",
       FeatureSchema::Kind::Categorical,
       {"little", "moderate", "quite rich", "rich"},
       {},
       false},
      {"Checking account",
       FeatureSchema::Kind::Categorical,
       {"little", "moderate", "rich"},
       {},
       false},
      {"Duration", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Credit amount", FeatureSchema::Kind::Numeric, {}, {}, false},
  };
  sc->protected_column = "Sex";
  sc->protected_positive = "female";
  sc->target_column = "Risk";
  RawSpec spec;
  spec.schema = sc;
  spec.protected_values = {"male", "female"};
  spec.protected_positive = "female";
  spec.target_values = {"good", "bad"};
  spec.target_positive = "good";
  return spec;
}

inline RawSpec drugs_spec() {
  auto sc = std::make_shared<FeatureSchema>();
  sc->dataset_id = "drugs";
  sc->columns = {
      {"Age", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Education", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Country", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Ethnicity", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Nscore", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Escore", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Oscore", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Ascore", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Cscore", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"Impulsive", FeatureSchema::Kind::Numeric, {}, {}, false},
      {"SS", FeatureSchema::Kind::Numeric, {}, {}, false},
  };
  // Gender is stored as a signed numeric in the raw file (positive: female);
  // its feature copy is the canonical 0/1 protected column appended last.
  sc->protected_column = "Gender";
  sc->target_column = "Coke";
  RawSpec spec;
  spec.schema = sc;
  // usage classes CL1..CL6 all count as "used"; CL0 is "never used"
  spec.target_values = {"CL0", "CL1", "CL2", "CL3", "CL4", "CL5", "CL6"};
  spec.target_positive = "";  // handled below: any listed value except CL0
  return spec;
}

// --- loaders -----------------------------------------------------------------

// Screening-analysis row filter for the recidivism data: charge date within
// 30 days of arrest, recidivism flag recorded, ordinary traffic offenses and
// unscored cases excluded.
inline bool compas_row_ok(const csv::Table& t, const std::vector<std::string>& row) {
  int days_ix = t.column("days_b_screening_arrest");
  int isrec_ix = t.column("is_recid");
  int degree_ix = t.column("c_charge_degree");
  int score_ix = t.column("score_text");
  if (days_ix < 0 || isrec_ix < 0 || degree_ix < 0 || score_ix < 0)
    fail("schema", "recidivism file is missing screening columns");
  const std::string& days = row[static_cast<std::size_t>(days_ix)];
  char* end = nullptr;
  double dv = std::strtod(days.c_str(), &end);
  if (days.empty() || end != days.c_str() + days.size()) return false;
  if (dv < -30.0 || dv > 30.0) return false;
  if (row[static_cast<std::size_t>(isrec_ix)] == "-1") return false;
  if (row[static_cast<std::size_t>(degree_ix)] == "O") return false;
  if (row[static_cast<std::size_t>(score_ix)] == "N/A") return false;
  return true;
}

inline Dataset load_compas(const std::string& path) {
  csv::Table t = csv::read_file(path);
  csv::Table kept;
  kept.header = t.header;
  for (const auto& row : t.rows)
    if (compas_row_ok(t, row)) kept.rows.push_back(row);
  return encode_table(kept, compas_spec());
}

inline Dataset load_adult(const std::string& path) {
  csv::Table t = csv::read_file(path);
  int wc = t.column("workclass");
  int inc = t.column("income");
  int ncountry = t.column("native-country");
  if (wc < 0 || inc < 0) fail("schema", "census file is missing workclass/income");
  for (auto& row : t.rows) {
    if (row[static_cast<std::size_t>(wc)] == "?") row[static_cast<std::size_t>(wc)] = "unknown";
    if (ncountry >= 0 && row[static_cast<std::size_t>(ncountry)] == "?")
      row[static_cast<std::size_t>(ncountry)] = "other";
    // some distributions suffix test-fold labels with a period
    std::string& y = row[static_cast<std::size_t>(inc)];
    if (!y.empty() && y.back() == '.') y.pop_back();
  }
  return encode_table(t, adult_spec());
}

inline Dataset load_germancredit(const std::string& path) {
  csv::Table t = csv::read_file(path);
  return encode_table(t, germancredit_spec());
}

inline Dataset load_drugs(const std::string& path) {
  csv::Table t = csv::read_file(path);
  RawSpec spec = drugs_spec();
  // remap the usage-class target in place: never used -> 0, everything else -> 1
  int ycol = t.column(spec.schema->target_column);
  if (ycol < 0) fail("schema", "drug file is missing target column Coke");
  for (auto& row : t.rows) {
    std::string& y = row[static_cast<std::size_t>(ycol)];
    bool known = std::find(spec.target_values.begin(), spec.target_values.end(), y) !=
                 spec.target_values.end();
    if (!known) fail("schema", "unlisted usage class '" + y + "'");
    y = (y == "CL0") ? "0" : "1";
  }
  spec.target_values = {"0", "1"};
  spec.target_positive = "1";
  return encode_table(t, spec);
}

inline Dataset load_dataset(const std::string& dataset_id, const std::string& path) {
  if (dataset_id == "compas") return load_compas(path);
  if (dataset_id == "adult") return load_adult(path);
  if (dataset_id == "germancredit") return load_germancredit(path);
  if (dataset_id == "drugs") return load_drugs(path);
  fail("config", "unknown dataset id: " + dataset_id);
}

// --- splitting and standardization --------------------------------------------

// Uniformly random partition into (train, test); train gets floor(frac * n)
// rows. Row order inside each part follows the original dataset.
inline std::pair<Dataset, Dataset> train_test_split(const Dataset& d, double train_fraction,
                                                    std::uint64_t seed) {
  require(train_fraction > 0.0 && train_fraction < 1.0, "value",
          "train_fraction must lie strictly between 0 and 1");
  require(d.n() >= 2, "value", "need at least two rows to split");
  int n_train = static_cast<int>(std::floor(train_fraction * d.n()));
  require(n_train >= 1 && n_train < d.n(), "value", "degenerate split");
  RandomStream rng(seed);
  auto perm = rng.permutation(static_cast<std::size_t>(d.n()));
  std::vector<int> tr(perm.begin(), perm.begin() + n_train);
  std::vector<int> te(perm.begin() + n_train, perm.end());
  std::sort(tr.begin(), tr.end());
  std::sort(te.begin(), te.end());
  return {d.subset(tr), d.subset(te)};
}

// Splits into N near-equal sources; the first (n mod N) sources receive one
// extra row. Assignment is a seeded uniform permutation.
inline SourceBundle split_sources(const Dataset& d, int n_sources, std::uint64_t seed) {
  require(n_sources >= 1, "value", "need at least one source");
  require(n_sources <= d.n(), "value", "more sources than rows");
  RandomStream rng(seed);
  auto perm = rng.permutation(static_cast<std::size_t>(d.n()));
  int base = d.n() / n_sources;
  int extra = d.n() % n_sources;
  SourceBundle out;
  std::size_t pos = 0;
  for (int s = 0; s < n_sources; ++s) {
    int size = base + (s < extra ? 1 : 0);
    std::vector<int> idx(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                         perm.begin() + static_cast<std::ptrdiff_t>(pos + size));
    std::sort(idx.begin(), idx.end());
    out.sources.push_back(d.subset(idx));
    pos += static_cast<std::size_t>(size);
  }
  out.clean_flags.assign(static_cast<std::size_t>(n_sources), 1);
  return out;
}

// z-scores raw numeric feature columns using training-split statistics and
// applies the same affine map to the test split. One-hot, binned indicator,
// and the protected copy columns pass through unchanged. A numerically
// constant column is only centered.
inline void standardize_train_test(Dataset& train, Dataset& test) {
  require(train.schema != nullptr, "state", "standardize needs a schema");
  auto mask = train.schema->standardize_mask();
  for (int j = 0; j < train.dim(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    double mean = train.features.col(j).mean();
    double var = (train.features.col(j).array() - mean).square().sum() / train.n();
    double sd = std::sqrt(var);
    double scale = sd > 1e-12 ? 1.0 / sd : 1.0;
    train.features.col(j) = (train.features.col(j).array() - mean) * scale;
    if (test.n() > 0) test.features.col(j) = (test.features.col(j).array() - mean) * scale;
  }
}

}  // namespace flea::tabular

// Core tabular value types: feature schema, encoded dataset, and bundles of
// per-source datasets. Datasets are plain value types; every transformation
// returns a new object so test-set rows can never be mutated in place by
// accident.
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "flea/common.hpp"
#include "flea/csv.hpp"

namespace flea {

// Describes how raw CSV columns map to encoded feature columns. Categorical
// columns list their admissible values exhaustively; a column may opt into a
// catch-all bucket (used e.g. for "every other country"), otherwise an unseen
// value is an ingestion error. Binned columns carry ascending cut points;
// value x falls in bin i when edges[i-1] <= x < edges[i].
struct FeatureSchema {
  enum class Kind { Categorical, Numeric, Binned };

  struct Column {
    std::string name;
    Kind kind = Kind::Categorical;
    std::vector<std::string> values;   // categorical vocabulary, in output order
    std::vector<double> bin_edges;     // for Kind::Binned
    bool collapse_unlisted = false;    // map unseen values to the last vocab entry
  };

  std::string dataset_id;
  std::vector<Column> columns;         // encoded in this order
  std::string protected_column;        // raw column holding the protected attribute
  std::string protected_positive;     // raw value mapped to a = 1 (empty: numeric > 0)
  std::string target_column;
  bool include_protected_in_features = true;

  int feature_dim() const {
    int d = 0;
    for (const auto& c : columns) {
      switch (c.kind) {
        case Kind::Categorical: d += static_cast<int>(c.values.size()); break;
        case Kind::Numeric: d += 1; break;
        case Kind::Binned: d += static_cast<int>(c.bin_edges.size()) + 1; break;
      }
    }
    if (include_protected_in_features) d += 1;
    return d;
  }

  // stable encoded-column names: schema order, then listed value order;
  // the protected copy, when included, is always the final column
  std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns) {
      switch (c.kind) {
        case Kind::Categorical:
          for (const auto& v : c.values) out.push_back(c.name + "=" + v);
          break;
        case Kind::Numeric:
          out.push_back(c.name);
          break;
        case Kind::Binned: {
          std::size_t bins = c.bin_edges.size() + 1;
          for (std::size_t b = 0; b < bins; ++b)
            out.push_back(c.name + "#bin" + std::to_string(b));
          break;
        }
      }
    }
    if (include_protected_in_features) out.push_back("protected:" + protected_column);
    return out;
  }

  // true for encoded columns that should be standardized (raw numerics only)
  std::vector<bool> standardize_mask() const {
    std::vector<bool> mask;
    for (const auto& c : columns) {
      switch (c.kind) {
        case Kind::Categorical:
          mask.insert(mask.end(), c.values.size(), false);
          break;
        case Kind::Numeric:
          mask.push_back(true);
          break;
        case Kind::Binned:
          mask.insert(mask.end(), c.bin_edges.size() + 1, false);
          break;
      }
    }
    if (include_protected_in_features) mask.push_back(false);
    return mask;
  }

  int protected_feature_index() const {
    return include_protected_in_features ? feature_dim() - 1 : -1;
  }

  std::uint64_t hash() const {
    std::string s = dataset_id + "|" + protected_column + "|" + target_column +
                    (include_protected_in_features ? "|P1" : "|P0");
    for (const auto& c : columns) {
      s += "|" + c.name + ":" + std::to_string(static_cast<int>(c.kind));
      for (const auto& v : c.values) s += "," + v;
      for (double e : c.bin_edges) s += ";" + std::to_string(e);
      if (c.collapse_unlisted) s += "!";
    }
    return fnv1a64(s);
  }
};

using SchemaPtr = std::shared_ptr<const FeatureSchema>;

// Encoded dataset. Invariant: when the schema includes the protected
// attribute among the features, column protected_feature_index() mirrors
// the protected vector entrywise; all mutations go through helpers that
// keep the two in sync.
struct Dataset {
  Eigen::MatrixXd features;    // n x d
  Eigen::VectorXi labels;      // values in {0,1}
  Eigen::VectorXi protected_attr;  // values in {0,1}
  SchemaPtr schema;

  int n() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }

  int group_count(int a) const {
    int c = 0;
    for (int i = 0; i < n(); ++i)
      if (protected_attr(i) == a) ++c;
    return c;
  }

  double group_fraction() const {
    require(n() > 0, "value", "group_fraction on empty dataset");
    return static_cast<double>(group_count(1)) / n();
  }

  double label_fraction() const {
    require(n() > 0, "value", "label_fraction on empty dataset");
    return labels.cast<double>().mean();
  }

  void set_protected(int i, int a) {
    protected_attr(i) = a;
    if (schema && schema->include_protected_in_features)
      features(i, schema->protected_feature_index()) = static_cast<double>(a);
  }

  Dataset subset(const std::vector<int>& idx) const {
    Dataset out;
    out.schema = schema;
    out.features.resize(static_cast<int>(idx.size()), dim());
    out.labels.resize(static_cast<int>(idx.size()));
    out.protected_attr.resize(static_cast<int>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      require(idx[r] >= 0 && idx[r] < n(), "value", "subset index out of range");
      out.features.row(static_cast<int>(r)) = features.row(idx[r]);
      out.labels(static_cast<int>(r)) = labels(idx[r]);
      out.protected_attr(static_cast<int>(r)) = protected_attr(idx[r]);
    }
    return out;
  }

  void check_valid() const {
    require(features.rows() == labels.size() && features.rows() == protected_attr.size(),
            "state", "dataset size mismatch");
    for (int i = 0; i < n(); ++i) {
      require(labels(i) == 0 || labels(i) == 1, "state", "label outside {0,1}");
      require(protected_attr(i) == 0 || protected_attr(i) == 1, "state",
              "protected attribute outside {0,1}");
    }
    if (schema && schema->include_protected_in_features) {
      int p = schema->protected_feature_index();
      for (int i = 0; i < n(); ++i)
        require(features(i, p) == static_cast<double>(protected_attr(i)), "state",
                "protected feature column out of sync");
    }
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = hash_doubles(features.data(), static_cast<std::size_t>(features.size()));
    h = splitmix64(h ^ hash_ints(labels.data(), static_cast<std::size_t>(labels.size())));
    h = splitmix64(h ^ hash_ints(protected_attr.data(),
                                 static_cast<std::size_t>(protected_attr.size())));
    return h;
  }
};

inline Dataset concat(const std::vector<Dataset>& parts) {
  require(!parts.empty(), "value", "concat of zero datasets");
  int total = 0;
  for (const auto& p : parts) total += p.n();
  Dataset out;
  out.schema = parts.front().schema;
  out.features.resize(total, parts.front().dim());
  out.labels.resize(total);
  out.protected_attr.resize(total);
  int r = 0;
  for (const auto& p : parts) {
    require(p.dim() == out.dim(), "value", "concat dimension mismatch");
    out.features.middleRows(r, p.n()) = p.features;
    out.labels.segment(r, p.n()) = p.labels;
    out.protected_attr.segment(r, p.n()) = p.protected_attr;
    r += p.n();
  }
  return out;
}

// A collection of same-schema training sources. clean_flags is bookkeeping
// for experiments (which sources an adversary touched); algorithms that are
// supposed to be adversary-blind must not read it.
struct SourceBundle {
  std::vector<Dataset> sources;
  std::vector<char> clean_flags;  // empty when unknown; else one flag per source

  int count() const { return static_cast<int>(sources.size()); }

  Dataset union_of(const std::vector<int>& which) const {
    require(!which.empty(), "value", "union over empty source selection");
    std::vector<Dataset> parts;
    for (int i : which) {
      require(i >= 0 && i < count(), "value", "source index out of range");
      parts.push_back(sources[i]);
    }
    return concat(parts);
  }

  Dataset union_all() const {
    std::vector<int> all(sources.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    return union_of(all);
  }
};

// canonical dump: f0,...,f{d-1},label,protected with full double precision
inline void write_canonical_csv(const Dataset& d, const std::string& path) {
  csv::Table t;
  for (int j = 0; j < d.dim(); ++j) t.header.push_back("f" + std::to_string(j));
  t.header.push_back("label");
  t.header.push_back("protected");
  char buf[64];
  for (int i = 0; i < d.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(d.dim()) + 2);
    for (int j = 0; j < d.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.features(i, j));
      row.emplace_back(buf);
    }
    row.push_back(std::to_string(d.labels(i)));
    row.push_back(std::to_string(d.protected_attr(i)));
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

}  // namespace flea

// The seven source-manipulation processes used in the experiments. Each takes
// a bundle and a set of affected source indices and returns a new bundle;
// unaffected sources are byte-identical, affected sources get clean_flags
// cleared. All randomness (shuffle, replacement sampling) is seeded.
#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "flea/dataset.hpp"

namespace flea {

enum class AdversaryKind { FP, FL, FB, SP, OP, OL, RP };

inline std::string to_string(AdversaryKind k) {
  switch (k) {
    case AdversaryKind::FP: return "FP";
    case AdversaryKind::FL: return "FL";
    case AdversaryKind::FB: return "FB";
    case AdversaryKind::SP: return "SP";
    case AdversaryKind::OP: return "OP";
    case AdversaryKind::OL: return "OL";
    case AdversaryKind::RP: return "RP";
  }
  return "?";
}

inline AdversaryKind adversary_from_string(const std::string& s) {
  if (s == "FP") return AdversaryKind::FP;
  if (s == "FL") return AdversaryKind::FL;
  if (s == "FB") return AdversaryKind::FB;
  if (s == "SP") return AdversaryKind::SP;
  if (s == "OP") return AdversaryKind::OP;
  if (s == "OL") return AdversaryKind::OL;
  if (s == "RP") return AdversaryKind::RP;
  fail("config", "unknown adversary: " + s);
}

inline const std::vector<AdversaryKind>& all_adversaries() {
  static const std::vector<AdversaryKind> kinds = {
      AdversaryKind::FP, AdversaryKind::FL, AdversaryKind::FB, AdversaryKind::SP,
      AdversaryKind::OP, AdversaryKind::OL, AdversaryKind::RP};
  return kinds;
}

namespace detail {

inline std::vector<int> checked_affected(const SourceBundle& bundle,
                                         const std::vector<int>& affected) {
  std::vector<int> idx = affected;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (int i : idx)
    require(i >= 0 && i < bundle.count(), "value", "affected source index out of range");
  return idx;
}

// replacement pools drawn from the sources the adversary does not control
struct RpPools {
  std::vector<std::pair<int, int>> a0y0;  // (source, row)
  std::vector<std::pair<int, int>> a1y1;
};

inline RpPools collect_rp_pools(const SourceBundle& bundle, const std::vector<int>& affected) {
  RpPools pools;
  for (int s = 0; s < bundle.count(); ++s) {
    if (std::binary_search(affected.begin(), affected.end(), s)) continue;
    const Dataset& d = bundle.sources[static_cast<std::size_t>(s)];
    for (int i = 0; i < d.n(); ++i) {
      if (d.protected_attr(i) == 0 && d.labels(i) == 0) pools.a0y0.emplace_back(s, i);
      if (d.protected_attr(i) == 1 && d.labels(i) == 1) pools.a1y1.emplace_back(s, i);
    }
  }
  return pools;
}

}  // namespace detail

inline bool adversary_feasible(AdversaryKind kind, const SourceBundle& bundle,
                               const std::vector<int>& affected) {
  std::vector<int> idx = detail::checked_affected(bundle, affected);
  if (kind != AdversaryKind::RP) return true;
  detail::RpPools pools = detail::collect_rp_pools(bundle, idx);
  for (int s : idx) {
    const Dataset& d = bundle.sources[static_cast<std::size_t>(s)];
    for (int i = 0; i < d.n(); ++i) {
      if (d.protected_attr(i) == 0 && d.labels(i) == 1 && pools.a0y0.empty()) return false;
      if (d.protected_attr(i) == 1 && d.labels(i) == 0 && pools.a1y1.empty()) return false;
    }
  }
  return true;
}

inline SourceBundle apply_adversary(AdversaryKind kind, const SourceBundle& bundle,
                                    const std::vector<int>& affected, std::uint64_t seed) {
  std::vector<int> idx = detail::checked_affected(bundle, affected);
  SourceBundle out = bundle;
  if (out.clean_flags.empty())
    out.clean_flags.assign(static_cast<std::size_t>(out.count()), 1);

  detail::RpPools pools;
  if (kind == AdversaryKind::RP) pools = detail::collect_rp_pools(bundle, idx);

  for (int s : idx) {
    Dataset& d = out.sources[static_cast<std::size_t>(s)];
    RandomStream rng(derive_seed(seed, "adversary/source/" + std::to_string(s)));
    switch (kind) {
      case AdversaryKind::FP:
        for (int i = 0; i < d.n(); ++i) d.set_protected(i, 1 - d.protected_attr(i));
        break;
      case AdversaryKind::FL:
        for (int i = 0; i < d.n(); ++i) d.labels(i) = 1 - d.labels(i);
        break;
      case AdversaryKind::FB:
        for (int i = 0; i < d.n(); ++i) {
          d.set_protected(i, 1 - d.protected_attr(i));
          d.labels(i) = 1 - d.labels(i);
        }
        break;
      case AdversaryKind::SP: {
        // permute the canonical a column; the feature view is regenerated so
        // x stays consistent with a
        auto perm = rng.permutation(static_cast<std::size_t>(d.n()));
        Eigen::VectorXi old = d.protected_attr;
        for (int i = 0; i < d.n(); ++i)
          d.set_protected(i, old(static_cast<int>(perm[static_cast<std::size_t>(i)])));
        break;
      }
      case AdversaryKind::OP:
        for (int i = 0; i < d.n(); ++i) d.set_protected(i, d.labels(i));
        break;
      case AdversaryKind::OL:
        for (int i = 0; i < d.n(); ++i) d.labels(i) = d.protected_attr(i);
        break;
      case AdversaryKind::RP: {
        for (int i = 0; i < d.n(); ++i) {
          const bool needs00 = d.protected_attr(i) == 0 && d.labels(i) == 1;
          const bool needs11 = d.protected_attr(i) == 1 && d.labels(i) == 0;
          if (!needs00 && !needs11) continue;
          const auto& pool = needs00 ? pools.a0y0 : pools.a1y1;
          if (pool.empty())
            fail("value", std::string("replacement adversary infeasible: empty (a=") +
                              (needs00 ? "0, y=0" : "1, y=1") + ") pool");
          auto [ps, pi] = pool[rng.next_index(pool.size())];
          const Dataset& src = bundle.sources[static_cast<std::size_t>(ps)];
          d.features.row(i) = src.features.row(pi);
          d.labels(i) = src.labels(pi);
          d.protected_attr(i) = src.protected_attr(pi);
        }
        break;
      }
    }
    out.clean_flags[static_cast<std::size_t>(s)] = 0;
  }
  return out;
}

}  // namespace flea

// Shared small utilities: typed errors, deterministic seeding/RNG helpers,
// numerically safe scalar functions. Everything here is header-only and
// dependency-free apart from the standard library.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flea {

// Error with a short machine-readable kind ("io", "schema", "value", "config",
// "state") plus a human message. The CLI maps these onto stderr JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool cond, const std::string& kind, const std::string& msg) {
  if (!cond) fail(kind, msg);
}

// --- deterministic seeding -------------------------------------------------
// All randomness in the project flows from one master seed through labeled
// derivations, so any sub-computation is reproducible in isolation.

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stable seed for a labeled subtask, e.g. derive_seed(master, "repeat/3/split").
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return splitmix64(fnv1a64(label) ^ splitmix64(master));
}

// RNG wrapper. mt19937_64 output is fully specified by the standard; the
// helpers below avoid std::*_distribution, whose streams are
// implementation-defined, so sequences are reproducible across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // uniform in [0,1) with 53 random bits
  double next_u01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n)
  std::size_t next_index(std::size_t n) {
    // modulo bias is < 2^-50 for any realistic n; acceptable and deterministic
    return static_cast<std::size_t>(eng_() % n);
  }

  bool next_bernoulli(double p) { return next_u01() < p; }

  // standard normal via the polar method (no libm trig)
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_u01() - 1.0;
      v = 2.0 * next_u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  // Fisher-Yates permutation of {0, ..., n-1}
  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = next_index(i);
      std::swap(p[i - 1], p[j]);
    }
    return p;
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// --- safe scalars ------------------------------------------------------------

inline double clip(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

// raw linear scores are clipped to this interval before any exponential
inline constexpr double kScoreClip = 20.0;

inline double sigmoid_clipped(double g) {
  double c = clip(g, -kScoreClip, kScoreClip);
  return 1.0 / (1.0 + std::exp(-c));
}

// log(1 + exp(t)) for clipped |t| <= kScoreClip; plain form is already safe there
inline double log1pexp_clipped(double t) {
  return std::log1p(std::exp(clip(t, -kScoreClip, kScoreClip)));
}

// byte hash of a double buffer, for cheap "data untouched" assertions
inline std::uint64_t hash_doubles(const double* p, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  const unsigned char* b = reinterpret_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n * sizeof(double); ++i) {
    h ^= b[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_ints(const int* p, std::size_t n) {
  std::uint64_t h = 1469598103934665603ull;
  const unsigned char* b = reinterpret_cast<const unsigned char*>(p);
  for (std::size_t i = 0; i < n * sizeof(int); ++i) {
    h ^= b[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace flea

// Seeded generators for benchmark-shaped raw CSV files. The real public
// datasets cannot be redistributed with the code, so tests and the default
// CLI experience run on synthetic stand-ins that reproduce the published raw
// schemas exactly (column names, categorical vocabularies, row counts, group
// and label marginals) and whose feature/label/group dependence is calibrated
// so the filtering and fairness dynamics at experiment scale behave like the
// real data. Loaders do not distinguish the two; point FLEA_DATA_DIR at the
// genuine files to run everything unchanged on real data.
//
// Generative core: every row carries a latent risk scalar
//   t = mu_y * (2y - 1) + mu_a * (2a - 1) + sigma_t * N(0,1)
// and each synthetic column mixes t, the group sign, and fresh noise:
//   z = rho_t * t + rho_a * (2a - 1) + sqrt(1 - rho_t^2 - rho_a^2) * N(0,1).
// Cell counts n_{a,y} are exact integers, so marginal assertions are sharp.
#pragma once

#include <array>
#include <cstdio>
#include <string>
#include <vector>

#include "flea/csv.hpp"
#include "flea/common.hpp"

namespace flea::synthdata {

inline constexpr std::uint64_t kDefaultSeed = 7150217;

// inverse standard-normal CDF (Acklam's rational approximation, |err| < 1.2e-9)
inline double inv_normal_cdf(double p) {
  require(p > 0.0 && p < 1.0, "value", "inverse CDF domain");
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > phigh) {
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

namespace detail {

// values in ascending "intensity" order with marginal probabilities;
// a latent z is mapped through normal-quantile cutpoints
struct OrderedCat {
  std::vector<std::string> values;
  std::vector<double> cuts;  // size values.size() - 1

  OrderedCat(std::initializer_list<std::pair<const char*, double>> spec) {
    double cum = 0.0;
    for (auto& [name, prob] : spec) {
      values.emplace_back(name);
      cum += prob;
      if (values.size() < spec.size()) cuts.push_back(inv_normal_cdf(std::min(cum, 1.0 - 1e-12)));
    }
  }

  std::size_t index(double z) const {
    for (std::size_t k = 0; k < cuts.size(); ++k)
      if (z < cuts[k]) return k;
    return values.size() - 1;
  }

  const std::string& pick(double z) const { return values[index(z)]; }
};

struct RowCore {
  int a = 0;
  int y = 0;
  double t = 0.0;
};

// exact-count (a, y) cells, then per-row latent draw
inline std::vector<RowCore> make_cores(int n_a0y0, int n_a0y1, int n_a1y0, int n_a1y1,
                                       double mu_y, double mu_a, RandomStream& rng) {
  std::vector<RowCore> rows;
  rows.reserve(static_cast<std::size_t>(n_a0y0 + n_a0y1 + n_a1y0 + n_a1y1));
  double sigma_t = std::sqrt(std::max(0.1, 1.0 - mu_y * mu_y - mu_a * mu_a));
  auto fill = [&](int count, int a, int y) {
    for (int i = 0; i < count; ++i) {
      RowCore r;
      r.a = a;
      r.y = y;
      r.t = mu_y * (2 * y - 1) + mu_a * (2 * a - 1) + sigma_t * rng.next_normal();
      rows.push_back(r);
    }
  };
  fill(n_a0y0, 0, 0);
  fill(n_a0y1, 0, 1);
  fill(n_a1y0, 1, 0);
  fill(n_a1y1, 1, 1);
  return rows;
}

inline double mix(const RowCore& r, double rho_t, double rho_a, RandomStream& rng) {
  double rest = 1.0 - rho_t * rho_t - rho_a * rho_a;
  return rho_t * r.t + rho_a * (2 * r.a - 1) + std::sqrt(std::max(0.0, rest)) * rng.next_normal();
}

// Group loading that changes with the label: the marginal feature-group
// association stays near rho_a + (2q-1)*rho_ai for label rate q, but within
// each label class the shift differs. A linear model predicting the group
// cannot represent the interaction, so per-sample fits chase whichever
// projection the sample realizes.
inline double mix_int(const RowCore& r, double rho_t, double rho_a, double rho_ai,
                      RandomStream& rng) {
  double eff = rho_a + rho_ai * (2 * r.y - 1);
  double rest = 1.0 - rho_t * rho_t - eff * eff;
  return rho_t * r.t + eff * (2 * r.a - 1) + std::sqrt(std::max(0.0, rest)) * rng.next_normal();
}

inline std::string fmt(double v, int digits = 5) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline void shuffle_rows(csv::Table& t, RandomStream& rng) {
  auto perm = rng.permutation(t.rows.size());
  std::vector<std::vector<std::string>> shuffled;
  shuffled.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) shuffled.push_back(std::move(t.rows[perm[i]]));
  t.rows = std::move(shuffled);
}

}  // namespace detail

// --- recidivism screening data -------------------------------------------------
// 7214 raw rows of which exactly 6171 survive the screening filter; survivors
// have exact counts female 1173 and positive labels 2783.

namespace compas_knobs {
inline constexpr int kRawRows = 7214;
inline constexpr int kKeptRows = 6171;
inline constexpr int kFemale = 1173;
inline constexpr int kPositives = 2783;
inline constexpr int kFemalePositives = 375;
inline constexpr double kMuY = 0.62;
inline constexpr double kMuA = -0.30;
}  // namespace compas_knobs

inline void write_compas_csv(const std::string& path, std::uint64_t seed = kDefaultSeed) {
  using namespace compas_knobs;
  RandomStream rng(derive_seed(seed, "fixture/compas"));
  csv::Table t;
  t.header = {"sex",          "age_cat",      "race",
              "c_charge_degree", "priors_count", "days_b_screening_arrest",
              "is_recid",     "score_text",   "two_year_recid"};

  static const detail::OrderedCat age_cat{
      {"Greater than 45", 0.22}, {"25 - 45", 0.57}, {"Less than 25", 0.21}};
  static const detail::OrderedCat race{{"Caucasian", 0.34},
                                       {"Hispanic", 0.08},
                                       {"Other", 0.06},
                                       {"African-American", 0.52}};
  static const detail::OrderedCat charge{{"M", 0.355}, {"F", 0.645}};
  static const detail::OrderedCat score{{"Low", 0.54}, {"Medium", 0.28}, {"High", 0.18}};

  auto emit = [&](const detail::RowCore& r, bool kept, int violation) {
    std::vector<std::string> row(t.header.size());
    row[0] = r.a == 1 ? "Female" : "Male";
    row[1] = age_cat.pick(detail::mix(r, 0.42, 0.0, rng));
    row[2] = race.pick(detail::mix(r, 0.22, -0.25, rng));
    row[3] = charge.pick(detail::mix(r, 0.28, -0.12, rng));
    double zp = detail::mix(r, 0.60, -0.26, rng);
    row[4] = std::to_string(static_cast<int>(clip(std::floor(std::exp(1.05 * zp + 0.45)) - 1, 0, 38)));
    row[5] = std::to_string(static_cast<int>(std::floor(rng.next_u01() * 31)) - 15);
    row[6] = std::to_string(r.y);
    row[7] = score.pick(detail::mix(r, 0.5, -0.15, rng));
    row[8] = std::to_string(r.y);
    if (!kept) {
      switch (violation) {
        case 0: row[5] = std::to_string(31 + static_cast<int>(rng.next_index(300))); break;
        case 1: row[5] = std::to_string(-31 - static_cast<int>(rng.next_index(300))); break;
        case 2: row[6] = "-1"; break;
        case 3: row[3] = "O"; break;
        default: row[7] = "N/A"; break;
      }
    }
    t.rows.push_back(std::move(row));
  };

  auto kept_cores = detail::make_cores(
      /*a0y0*/ (kKeptRows - kFemale) - (kPositives - kFemalePositives),
      /*a0y1*/ kPositives - kFemalePositives,
      /*a1y0*/ kFemale - kFemalePositives,
      /*a1y1*/ kFemalePositives, kMuY, kMuA, rng);
  for (const auto& r : kept_cores) emit(r, true, -1);

  int dropped = kRawRows - kKeptRows;
  auto dropped_cores =
      detail::make_cores(dropped / 2, dropped - dropped / 2 - dropped / 4, 0, dropped / 4, kMuY,
                         kMuA, rng);
  int violation = 0;
  for (const auto& r : dropped_cores) emit(r, false, violation++ % 5);

  detail::shuffle_rows(t, rng);
  csv::write_file(path, t);
}

// --- census income data ----------------------------------------------------------
// 48842 rows, female 16216, positive labels (income above the cutoff) 11673.

namespace adult_knobs {
inline constexpr int kRows = 48842;
inline constexpr int kFemale = 16216;
inline constexpr int kPositives = 11673;
inline constexpr int kFemalePositives = 1768;
inline constexpr double kMuY = 0.92;
inline constexpr double kMuA = -0.18;
}  // namespace adult_knobs

inline void write_adult_csv(const std::string& path, std::uint64_t seed = kDefaultSeed) {
  using namespace adult_knobs;
  RandomStream rng(derive_seed(seed, "fixture/adult"));
  csv::Table t;
  t.header = {"age",          "workclass",     "fnlwgt",       "education",
              "education-num", "marital-status", "occupation",   "relationship",
              "race",         "sex",           "capital-gain", "capital-loss",
              "hours-per-week", "native-country", "income"};

  static const detail::OrderedCat education{
      {"Preschool", 0.0015}, {"1st-4th", 0.005},   {"5th-6th", 0.01},
      {"7th-8th", 0.02},     {"9th", 0.016},       {"10th", 0.029},
      {"11th", 0.037},       {"12th", 0.013},      {"HS-grad", 0.322},
      {"Some-college", 0.222}, {"Assoc-voc", 0.042}, {"Assoc-acdm", 0.033},
      {"Bachelors", 0.164},  {"Masters", 0.054},   {"Prof-school", 0.017},
      {"Doctorate", 0.0125}};
  static const detail::OrderedCat workclass{
      {"unknown", 0.057},        {"Never-worked", 0.0002}, {"Without-pay", 0.0005},
      {"Self-emp-not-inc", 0.079}, {"Private", 0.694},     {"Local-gov", 0.064},
      {"State-gov", 0.041},      {"Federal-gov", 0.029},   {"Self-emp-inc", 0.0353}};
  static const detail::OrderedCat race{{"Amer-Indian-Eskimo", 0.0095},
                                       {"Other", 0.008},
                                       {"Asian-Pac-Islander", 0.031},
                                       {"Black", 0.096},
                                       {"White", 0.8555}};
  static const detail::OrderedCat country{{"Mexico", 0.02},  {"Philippines", 0.006},
                                          {"Germany", 0.004}, {"Canada", 0.004},
                                          {"India", 0.003},  {"?", 0.017},
                                          {"United-States", 0.946}};
  static const detail::OrderedCat marital{{"Never-married", 0.33},
                                          {"Divorced", 0.136},
                                          {"Separated", 0.031},
                                          {"Widowed", 0.031},
                                          {"Married-civ-spouse", 0.458},
                                          {"Married-spouse-absent", 0.013},
                                          {"Married-AF-spouse", 0.001}};
  static const detail::OrderedCat occupation{
      {"Other-service", 0.1},     {"Handlers-cleaners", 0.042}, {"Farming-fishing", 0.03},
      {"Machine-op-inspct", 0.061}, {"Adm-clerical", 0.115},    {"Transport-moving", 0.048},
      {"Craft-repair", 0.125},    {"Sales", 0.112},            {"Tech-support", 0.029},
      {"Protective-serv", 0.02},  {"Prof-specialty", 0.126},   {"Exec-managerial", 0.124},
      {"Priv-house-serv", 0.005}, {"Armed-Forces", 0.0003},    {"unknown", 0.0627}};
  static const detail::OrderedCat relationship{{"Own-child", 0.155}, {"Other-relative", 0.031},
                                               {"Unmarried", 0.105}, {"Not-in-family", 0.255},
                                               {"Wife", 0.048},      {"Husband", 0.406}};

  auto cores = detail::make_cores(
      (kRows - kFemale) - (kPositives - kFemalePositives), kPositives - kFemalePositives,
      kFemale - kFemalePositives, kFemalePositives, kMuY, kMuA, rng);

  for (const auto& r : cores) {
    std::vector<std::string> row(t.header.size());
    double z_age = detail::mix(r, 0.38, 0.05, rng);
    int age = static_cast<int>(clip(std::round(38.5 + 13.0 * z_age), 17, 90));
    row[0] = std::to_string(age);
    row[1] = workclass.pick(detail::mix(r, 0.18, 0.0, rng));
    row[2] = std::to_string(10000 + static_cast<int>(rng.next_index(990000)));
    row[3] = education.pick(detail::mix(r, 0.55, 0.03, rng));
    int edu_num = 1;
    for (std::size_t k = 0; k < education.values.size(); ++k)
      if (education.values[k] == row[3]) edu_num = static_cast<int>(k) + 1;
    row[4] = std::to_string(edu_num);
    row[5] = marital.pick(detail::mix(r, 0.30, -0.22, rng));
    row[6] = occupation.pick(detail::mix(r, 0.35, -0.12, rng));
    row[7] = relationship.pick(detail::mix(r, 0.28, -0.35, rng));
    row[8] = race.pick(detail::mix(r, 0.12, 0.0, rng));
    row[9] = r.a == 1 ? "Female" : "Male";
    row[10] = rng.next_u01() < 0.08 ? std::to_string(1000 + static_cast<int>(rng.next_index(20000)))
                                    : "0";
    row[11] = rng.next_u01() < 0.045 ? std::to_string(100 + static_cast<int>(rng.next_index(2400)))
                                     : "0";
    double z_h = detail::mix(r, 0.42, -0.20, rng);
    row[12] = std::to_string(static_cast<int>(clip(std::round(40.5 + 10.5 * z_h), 1, 99)));
    row[13] = country.pick(detail::mix(r, 0.10, 0.0, rng));
    row[14] = r.y == 1 ? ">50K" : "<=50K";
    t.rows.push_back(std::move(row));
  }

  detail::shuffle_rows(t, rng);
  csv::write_file(path, t);
}

// --- credit risk data -------------------------------------------------------------
// 1000 rows, female 310, good outcomes 700.

namespace german_knobs {
inline constexpr int kRows = 1000;
inline constexpr int kFemale = 310;
inline constexpr int kGood = 700;
inline constexpr int kFemaleGood = 201;
inline constexpr double kMuY = 0.42;
inline constexpr double kMuA = -0.16;
}  // namespace german_knobs

inline void write_germancredit_csv(const std::string& path, std::uint64_t seed = kDefaultSeed) {
  using namespace german_knobs;
  RandomStream rng(derive_seed(seed, "fixture/germancredit"));
  csv::Table t;
  t.header = {"",        "Age",          "Sex",    "Job",
              "Housing", "Saving accounts", "Checking account", "Credit amount",
              "Duration", "Purpose",     "Risk"};

  static const detail::OrderedCat saving{
      {"little", 0.60}, {"moderate", 0.20}, {"quite rich", 0.11}, {"rich", 0.09}};
  static const detail::OrderedCat checking{{"little", 0.42}, {"moderate", 0.33}, {"rich", 0.25}};
  static const detail::OrderedCat housing{{"rent", 0.18}, {"free", 0.11}, {"own", 0.71}};
  static const detail::OrderedCat purpose{{"radio/TV", 0.28},  {"education", 0.06},
                                          {"furniture/equipment", 0.18}, {"car", 0.34},
                                          {"business", 0.10}, {"repairs", 0.04}};

  auto cores = detail::make_cores((kRows - kFemale) - (kGood - kFemaleGood),
                                  kGood - kFemaleGood, kFemale - kFemaleGood, kFemaleGood,
                                  kMuY, kMuA, rng);

  int row_id = 0;
  for (const auto& r : cores) {
    std::vector<std::string> row(t.header.size());
    row[0] = std::to_string(row_id++);
    // Group loadings below deliberately flip sign with the label (mix_int):
    // the attribute association is real but has almost no single linear
    // direction, so per-source attribute fits pick up sample-specific
    // projections and transfer poorly. That keeps the clean-pair disparity
    // estimates noisy, which is the regime the small-sample credit task
    // genuinely lives in.
    double z_age = detail::mix_int(r, 0.05, -0.10, 0.28, rng);
    row[1] = std::to_string(static_cast<int>(clip(std::round(36.0 + 13.0 * z_age), 19, 75)));
    row[2] = r.a == 1 ? "female" : "male";
    row[3] = std::to_string(static_cast<int>(rng.next_index(4)));
    row[4] = housing.pick(detail::mix(r, 0.06, -0.06, rng));
    row[5] = saving.pick(detail::mix_int(r, 0.06, 0.18, -0.50, rng));
    row[6] = checking.pick(detail::mix_int(r, 0.08, 0.16, -0.45, rng));
    double z_amt = detail::mix(r, -0.15, 0.0, rng);
    row[7] = std::to_string(static_cast<int>(clip(std::round(std::exp(7.8 + 1.1 * z_amt)), 250, 20000)));
    double z_dur = detail::mix(r, -0.33, 0.19, rng);
    row[8] = std::to_string(static_cast<int>(clip(std::round(20.5 + 11.0 * z_dur), 4, 72)));
    row[9] = purpose.pick(detail::mix(r, 0.0, 0.0, rng));
    row[10] = r.y == 1 ? "good" : "bad";
    t.rows.push_back(std::move(row));
  }

  detail::shuffle_rows(t, rng);
  csv::write_file(path, t);
}

// --- drug consumption data -----------------------------------------------------------
// 1885 rows, female 584, users 846 (never-used fraction 55.1%).

namespace drugs_knobs {
inline constexpr int kRows = 1885;
inline constexpr int kFemale = 584;
inline constexpr int kUsers = 846;
inline constexpr int kFemaleUsers = 185;
inline constexpr double kMuY = 0.60;
inline constexpr double kMuA = -0.36;
}  // namespace drugs_knobs

inline void write_drugs_csv(const std::string& path, std::uint64_t seed = kDefaultSeed) {
  using namespace drugs_knobs;
  RandomStream rng(derive_seed(seed, "fixture/drugs"));
  csv::Table t;
  t.header = {"ID",    "Age",    "Gender", "Education", "Country", "Ethnicity",
              "Nscore", "Escore", "Oscore", "Ascore",    "Cscore",  "Impulsive",
              "SS",    "Alcohol", "Cannabis", "Coke",    "Nicotine"};

  // quantized levels used by the published encoding
  static const std::array<double, 6> age_levels = {-0.95197, -0.07854, 0.49788,
                                                   1.09449,  1.82213,  2.59171};
  static const std::array<double, 9> edu_levels = {-2.43591, -1.73790, -1.43719,
                                                   -1.22751, -0.61113, -0.05921,
                                                   0.45468,  1.16365,  1.98437};
  static const std::array<double, 7> country_levels = {-0.57009, -0.46841, -0.28519,
                                                       -0.09765, 0.21128,  0.24923,
                                                       0.96082};
  static const std::array<double, 7> eth_levels = {-1.10702, -0.50212, -0.31685,
                                                   -0.22166, 0.11440,  0.12600,
                                                   1.90725};
  static const detail::OrderedCat usage{{"CL1", 0.15}, {"CL2", 0.25}, {"CL3", 0.30},
                                        {"CL4", 0.15}, {"CL5", 0.10}, {"CL6", 0.05}};
  static const detail::OrderedCat casual{{"CL0", 0.10}, {"CL2", 0.12}, {"CL3", 0.14},
                                         {"CL4", 0.16}, {"CL5", 0.23}, {"CL6", 0.25}};

  auto level = [&](const auto& levels, double z) {
    double u = clip(0.5 * (1.0 + std::erf(z / std::sqrt(2.0))), 1e-6, 1 - 1e-6);
    std::size_t ix = static_cast<std::size_t>(u * levels.size());
    if (ix >= levels.size()) ix = levels.size() - 1;
    return levels[ix];
  };

  auto cores = detail::make_cores((kRows - kFemale) - (kUsers - kFemaleUsers),
                                  kUsers - kFemaleUsers, kFemale - kFemaleUsers, kFemaleUsers,
                                  kMuY, kMuA, rng);

  int row_id = 1;
  for (const auto& r : cores) {
    std::vector<std::string> row(t.header.size());
    row[0] = std::to_string(row_id++);
    row[1] = detail::fmt(level(age_levels, detail::mix(r, -0.40, 0.10, rng)));
    row[2] = r.a == 1 ? "0.48246" : "-0.48246";
    row[3] = detail::fmt(level(edu_levels, detail::mix(r, -0.18, 0.10, rng)));
    row[4] = detail::fmt(level(country_levels, detail::mix(r, 0.12, 0.0, rng)));
    row[5] = detail::fmt(level(eth_levels, detail::mix(r, 0.05, 0.0, rng)));
    row[6] = detail::fmt(detail::mix(r, 0.22, 0.12, rng));   // neuroticism
    row[7] = detail::fmt(detail::mix(r, 0.10, -0.05, rng));  // extraversion
    row[8] = detail::fmt(detail::mix(r, 0.35, -0.08, rng));  // openness
    row[9] = detail::fmt(detail::mix(r, -0.18, 0.18, rng));  // agreeableness
    row[10] = detail::fmt(detail::mix(r, -0.30, 0.10, rng)); // conscientiousness
    row[11] = detail::fmt(detail::mix(r, 0.42, -0.22, rng)); // impulsivity
    row[12] = detail::fmt(detail::mix(r, 0.50, -0.28, rng)); // sensation seeking
    row[13] = casual.pick(detail::mix(r, 0.15, 0.0, rng));
    row[14] = usage.pick(detail::mix(r, 0.30, -0.10, rng));
    row[15] = r.y == 1 ? usage.pick(detail::mix(r, 0.2, 0.0, rng)) : "CL0";
    row[16] = casual.pick(detail::mix(r, 0.25, -0.10, rng));
    t.rows.push_back(std::move(row));
  }

  detail::shuffle_rows(t, rng);
  csv::write_file(path, t);
}

// --- dispatch -----------------------------------------------------------------------

inline void write_fixture(const std::string& dataset_id, const std::string& path,
                          std::uint64_t seed = kDefaultSeed) {
  if (dataset_id == "compas") return write_compas_csv(path, seed);
  if (dataset_id == "adult") return write_adult_csv(path, seed);
  if (dataset_id == "germancredit") return write_germancredit_csv(path, seed);
  if (dataset_id == "drugs") return write_drugs_csv(path, seed);
  fail("config", "unknown dataset id: " + dataset_id);
}

}  // namespace flea::synthdata

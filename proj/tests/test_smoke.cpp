// Pulls in every public header and exercises one tiny path from each so the
// whole library is known to compile and link before the real suites run.
#include "doctest.h"
#include "flea/adversaries.hpp"
#include "flea/common.hpp"
#include "flea/csv.hpp"
#include "flea/dataset.hpp"
#include "flea/dscore.hpp"
#include "flea/filter.hpp"
#include "flea/harness.hpp"
#include "flea/learners.hpp"
#include "flea/logistic.hpp"
#include "flea/model.hpp"
#include "flea/optim.hpp"
#include "flea/synthdata.hpp"
#include "flea/tabular.hpp"

TEST_CASE("headers link and basic calls work") {
  using namespace flea;
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(clip(5.0, 0.0, 1.0) == 1.0);
  CHECK(to_string(AdversaryKind::FP) == "FP");
  CHECK(to_string(LearnerKind::fair_reg) == "fair_reg");
  CHECK(harness::to_string(harness::RunMode::flea) == "flea");
  CHECK(alpha_quantile({0.5, 0.1, 0.3}, 0.5) == doctest::Approx(0.3));
  CHECK(synthdata::inv_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-8));
}

#pragma once

#include <span>
#include <string>
#include <vector>

#include "metacorr/pooling.hpp"

namespace metacorr {

struct SubgroupRow {
  std::string label;
  PooledEstimate pool;
};

struct SubgroupResult {
  std::vector<SubgroupRow> groups;  // sorted by label
  double q_between = 0.0;
  int df_between = 0;
  double p_between = 1.0;
};

// Random-effects pooling inside each region class (each with its own
// DerSimonian-Laird tau2; a single-study group degrades to its own fixed
// estimate), then the chi-square between-groups test
// Q_B = sum_g W_g (zbar_g - zbar)^2 with W_g = 1/se_g^2.
// Throws std::invalid_argument when fewer than two groups are non-empty.
SubgroupResult subgroup_analysis(std::span<const NormalizedEffect> effects);

struct MetaRegressionResult {
  std::string moderator;
  int k = 0;
  double intercept = 0.0;
  double coefficient = 0.0;  // slope on the z scale per moderator unit
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double z_stat = 0.0;
  double p = 1.0;
  double tau2_residual = 0.0;
};

// Random-effects meta-regression of Fisher z on one covariate: residual tau2
// by method of moments from the fixed-weight fit, then weighted least
// squares with weights 1/(var_i + tau2); slope tested against the standard
// normal; CI = coefficient +- 1.96 se. Requires k >= 3 and a non-constant
// moderator.
MetaRegressionResult meta_regression(std::span<const NormalizedEffect> effects,
                                     std::span<const double> moderator,
                                     std::string moderator_name);

// Convenience: moderator = male_pct carried in the effect metadata.
MetaRegressionResult meta_regression_male_pct(
    std::span<const NormalizedEffect> effects);

// Intercept-only variant used by tests: must reproduce the pooling module's
// random-effects estimate and DL tau2 exactly.
MetaRegressionResult meta_regression_intercept_only(
    std::span<const NormalizedEffect> effects);

}  // namespace metacorr

#include "metacorr/moderators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "metacorr/stats.hpp"

namespace metacorr {

SubgroupResult subgroup_analysis(std::span<const NormalizedEffect> effects) {
  std::map<std::string, std::vector<NormalizedEffect>> by_label;
  for (const auto& e : effects)
    by_label[std::string(to_string(e.meta.region_class))].push_back(e);
  if (by_label.size() < 2)
    throw std::invalid_argument(
        "subgroup_analysis: moderator is degenerate (single subgroup)");

  SubgroupResult out;
  double sw = 0.0, swz = 0.0;
  for (const auto& [label, group] : by_label) {
    SubgroupRow row;
    row.label = label;
    row.pool = pool_effects(group, Model::random);
    sw += 1.0 / (row.pool.se * row.pool.se);
    swz += row.pool.z_pooled / (row.pool.se * row.pool.se);
    out.groups.push_back(std::move(row));
  }
  const double zbar = swz / sw;
  for (const auto& g : out.groups) {
    const double w = 1.0 / (g.pool.se * g.pool.se);
    out.q_between += w * (g.pool.z_pooled - zbar) * (g.pool.z_pooled - zbar);
  }
  out.df_between = static_cast<int>(out.groups.size()) - 1;
  out.p_between = chi2_sf(out.q_between, out.df_between);
  return out;
}

namespace {

MetaRegressionResult wls_with_moments(
    std::span<const NormalizedEffect> effects, std::span<const double> x,
    std::string name, bool intercept_only) {
  const int k = static_cast<int>(effects.size());
  const int p = intercept_only ? 1 : 2;
  if (k < p + 1)
    throw std::invalid_argument("meta_regression: need k >= " +
                                std::to_string(p + 1));

  // Fixed-weight pass: WLS with w = 1/v, then method-of-moments residual
  // tau2 = max(0, (Q_E - (k - p)) / trM), trM = tr(W) - tr((X'WX)^-1 X'W^2X).
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  double b00 = 0, b01 = 0, b11 = 0;  // X'W^2X entries
  for (int i = 0; i < k; ++i) {
    const double w = 1.0 / effects[i].var_z;
    const double xi = intercept_only ? 0.0 : x[i];
    const double z = effects[i].z;
    s0 += w;
    s1 += w * xi;
    s2 += w * xi * xi;
    t0 += w * z;
    t1 += w * xi * z;
    b00 += w * w;
    b01 += w * w * xi;
    b11 += w * w * xi * xi;
  }

  double a_f = 0, b_f = 0, tr_m = 0;
  if (intercept_only) {
    a_f = t0 / s0;
    tr_m = s0 - b00 / s0;
  } else {
    const double det = s0 * s2 - s1 * s1;
    if (!(std::fabs(det) > 1e-12 * s0 * s2) || s2 == 0.0)
      throw std::invalid_argument("meta_regression: constant moderator");
    a_f = (s2 * t0 - s1 * t1) / det;
    b_f = (s0 * t1 - s1 * t0) / det;
    tr_m = s0 - (s2 * b00 - 2.0 * s1 * b01 + s0 * b11) / det;
  }
  double q_e = 0.0;
  for (int i = 0; i < k; ++i) {
    const double w = 1.0 / effects[i].var_z;
    const double xi = intercept_only ? 0.0 : x[i];
    const double res = effects[i].z - (a_f + b_f * xi);
    q_e += w * res * res;
  }
  const double tau2 = std::max(0.0, (q_e - (k - p)) / tr_m);

  // Random-effects pass with w* = 1/(v + tau2).
  double r0 = 0, r1 = 0, r2 = 0, u0 = 0, u1 = 0;
  for (int i = 0; i < k; ++i) {
    const double w = 1.0 / (effects[i].var_z + tau2);
    const double xi = intercept_only ? 0.0 : x[i];
    const double z = effects[i].z;
    r0 += w;
    r1 += w * xi;
    r2 += w * xi * xi;
    u0 += w * z;
    u1 += w * xi * z;
  }

  MetaRegressionResult out;
  out.moderator = std::move(name);
  out.k = k;
  out.tau2_residual = tau2;
  if (intercept_only) {
    out.intercept = u0 / r0;
    out.coefficient = out.intercept;  // the pooled estimate itself
    out.se = 1.0 / std::sqrt(r0);
  } else {
    const double det = r0 * r2 - r1 * r1;
    out.intercept = (r2 * u0 - r1 * u1) / det;
    out.coefficient = (r0 * u1 - r1 * u0) / det;
    out.se = std::sqrt(r0 / det);  // [(X'W*X)^-1]_11
  }
  out.z_stat = out.coefficient / out.se;
  out.p = two_tailed_normal_p(out.z_stat);
  out.ci_low = out.coefficient - 1.96 * out.se;
  out.ci_high = out.coefficient + 1.96 * out.se;
  return out;
}

}  // namespace

MetaRegressionResult meta_regression(std::span<const NormalizedEffect> effects,
                                     std::span<const double> moderator,
                                     std::string moderator_name) {
  if (moderator.size() != effects.size())
    throw std::invalid_argument("meta_regression: moderator size mismatch");
  return wls_with_moments(effects, moderator, std::move(moderator_name),
                          /*intercept_only=*/false);
}

MetaRegressionResult meta_regression_male_pct(
    std::span<const NormalizedEffect> effects) {
  std::vector<double> x;
  x.reserve(effects.size());
  for (const auto& e : effects) x.push_back(e.meta.male_pct);
  return meta_regression(effects, x, "male_pct");
}

MetaRegressionResult meta_regression_intercept_only(
    std::span<const NormalizedEffect> effects) {
  return wls_with_moments(effects, {}, "none", /*intercept_only=*/true);
}

}  // namespace metacorr

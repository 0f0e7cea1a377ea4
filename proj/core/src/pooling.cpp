#include "metacorr/pooling.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "metacorr/stats.hpp"

namespace metacorr {

std::string_view to_string(Model m) {
  return m == Model::fixed ? "fixed" : "random";
}

std::pair<double, double> fixed_effect_pool(
    std::span<const NormalizedEffect> effects) {
  if (effects.empty())
    throw std::invalid_argument("fixed_effect_pool: no effects");
  double sw = 0.0, swz = 0.0;
  for (const auto& e : effects) {
    const double w = 1.0 / e.var_z;
    sw += w;
    swz += w * e.z;
  }
  return {swz / sw, 1.0 / std::sqrt(sw)};
}

HeterogeneityStats heterogeneity(std::span<const NormalizedEffect> effects,
                                 bool permissive) {
  const int k = static_cast<int>(effects.size());
  if (k < 2) {
    if (!permissive || k < 1)
      throw std::invalid_argument(
          "heterogeneity: need k >= 2 (k == 1 only with permissive)");
    return {};
  }
  const auto [zf, se_f] = fixed_effect_pool(effects);
  (void)se_f;
  double q = 0.0, sw = 0.0, sw2 = 0.0;
  for (const auto& e : effects) {
    const double w = 1.0 / e.var_z;
    q += w * (e.z - zf) * (e.z - zf);
    sw += w;
    sw2 += w * w;
  }
  HeterogeneityStats h;
  h.q = q;
  h.df = k - 1;
  h.p_q = chi2_sf(q, h.df);
  h.i2 = q > 0.0 ? std::max(0.0, (q - h.df) / q) * 100.0 : 0.0;
  const double c = sw - sw2 / sw;  // DerSimonian-Laird scale factor
  h.tau2 = std::max(0.0, (q - h.df) / c);
  return h;
}

std::pair<double, double> significance_test(double z_pooled, double se) {
  if (!(se > 0.0)) throw std::invalid_argument("significance_test: se <= 0");
  const double z_stat = z_pooled / se;
  return {z_stat, two_tailed_normal_p(z_stat)};
}

PooledEstimate pool_effects(std::span<const NormalizedEffect> effects,
                            Model model) {
  if (effects.empty()) throw std::invalid_argument("pool_effects: no effects");
  PooledEstimate out;
  out.model = model;
  out.k = static_cast<int>(effects.size());
  for (const auto& e : effects) out.n_total += e.n;
  out.het = heterogeneity(effects, /*permissive=*/true);

  const double tau2 = model == Model::random ? out.het.tau2 : 0.0;
  double sw = 0.0, swz = 0.0;
  for (const auto& e : effects) {
    const double w = 1.0 / (e.var_z + tau2);
    sw += w;
    swz += w * e.z;
  }
  out.z_pooled = swz / sw;
  out.se = 1.0 / std::sqrt(sw);
  out.r_pooled = z_to_r(out.z_pooled);
  out.ci_low = z_to_r(out.z_pooled - 1.96 * out.se);
  out.ci_high = z_to_r(out.z_pooled + 1.96 * out.se);
  std::tie(out.z_stat, out.p) = significance_test(out.z_pooled, out.se);
  return out;
}

Model auto_model(const HeterogeneityStats& het) {
  return het.p_q < 0.05 ? Model::random : Model::fixed;
}

}  // namespace metacorr

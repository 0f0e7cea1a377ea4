#include "metacorr/bias.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "metacorr/stats.hpp"

namespace metacorr {

std::string_view to_string(NfsVariant v) {
  return v == NfsVariant::two_tailed_196 ? "two_tailed_196" : "one_tailed_1645";
}

std::string_view to_string(BiasVerdict v) {
  return v == BiasVerdict::no_bias_indicated ? "no_bias_indicated"
                                             : "bias_indicated";
}

long long failsafe_n(std::span<const NormalizedEffect> effects,
                     NfsVariant variant) {
  const int k = static_cast<int>(effects.size());
  if (k < 2) throw std::invalid_argument("failsafe_n: need k >= 2");
  const double z_alpha =
      variant == NfsVariant::two_tailed_196 ? 1.959964 : 1.645;
  double sum = 0.0;
  for (const auto& e : effects) sum += e.z / e.se_z;
  const double nfs = sum * sum / (z_alpha * z_alpha) - k;
  if (nfs <= 0.0) return 0;
  return static_cast<long long>(std::floor(nfs));
}

EggerResult egger_test(std::span<const NormalizedEffect> effects) {
  const int k = static_cast<int>(effects.size());
  if (k < 3) throw std::invalid_argument("egger_test: need k >= 3");
  // y_i = z_i/se_i regressed on x_i = 1/se_i, plain OLS.
  double sx = 0.0, sy = 0.0;
  for (const auto& e : effects) {
    sx += 1.0 / e.se_z;
    sy += e.z / e.se_z;
  }
  const double xbar = sx / k, ybar = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& e : effects) {
    const double dx = 1.0 / e.se_z - xbar;
    sxx += dx * dx;
    sxy += dx * (e.z / e.se_z - ybar);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("egger_test: all precisions identical");
  const double slope = sxy / sxx;
  const double intercept = ybar - slope * xbar;
  double rss = 0.0;
  for (const auto& e : effects) {
    const double fit = intercept + slope / e.se_z;
    const double res = e.z / e.se_z - fit;
    rss += res * res;
  }
  EggerResult out;
  out.df = k - 2;
  const double s2 = rss / out.df;
  out.intercept = intercept;
  out.se = std::sqrt(s2 * (1.0 / k + xbar * xbar / sxx));
  if (out.se > 0.0) {
    out.t = std::fabs(intercept) / out.se;
    out.p = two_tailed_t_p(out.t, out.df);
  } else {
    // Exact linear fit: zero residual variance. The t statistic is the
    // limit: 0 for a zero intercept, unbounded otherwise.
    out.t = intercept == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    out.p = intercept == 0.0 ? 1.0 : 0.0;
  }
  const double tq = student_t_q975(out.df);
  out.ci_low = intercept - tq * out.se;
  out.ci_high = intercept + tq * out.se;
  return out;
}

BiasDiagnostics bias_diagnostics(std::span<const NormalizedEffect> effects,
                                 NfsVariant variant) {
  BiasDiagnostics out;
  out.k = static_cast<int>(effects.size());
  out.nfs = failsafe_n(effects, variant);
  out.nfs_threshold = 5LL * out.k + 10;
  out.egger = egger_test(effects);
  out.verdict = (out.nfs >= out.nfs_threshold && out.egger.p > 0.05)
                    ? BiasVerdict::no_bias_indicated
                    : BiasVerdict::bias_indicated;
  return out;
}

std::vector<FunnelPoint> funnel_points(
    std::span<const NormalizedEffect> effects) {
  std::vector<FunnelPoint> out;
  out.reserve(effects.size());
  for (const auto& e : effects)
    out.push_back({e.z, e.se_z, e.meta.study_id});
  return out;
}

}  // namespace metacorr

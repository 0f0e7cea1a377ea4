#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metacorr/transforms.hpp"

namespace metacorr {

enum class NfsVariant { two_tailed_196, one_tailed_1645 };
std::string_view to_string(NfsVariant v);

enum class BiasVerdict { no_bias_indicated, bias_indicated };
std::string_view to_string(BiasVerdict v);

struct EggerResult {
  double intercept = 0.0;
  double se = 0.0;
  double t = 0.0;  // |intercept| / se
  double p = 1.0;  // two-tailed Student t, df = k - 2
  double ci_low = 0.0;
  double ci_high = 0.0;
  int df = 0;
};

struct BiasDiagnostics {
  int k = 0;
  long long nfs = 0;
  long long nfs_threshold = 0;  // 5k + 10
  EggerResult egger;
  BiasVerdict verdict = BiasVerdict::no_bias_indicated;
};

// Rosenthal fail-safe N: floor((sum z_i/se_i)^2 / z_alpha^2 - k), clamped at
// zero. Default z_alpha is the two-tailed 0.05 critical value 1.959964; the
// classic one-tailed 1.645 variant sits behind the flag. Requires k >= 2.
long long failsafe_n(std::span<const NormalizedEffect> effects,
                     NfsVariant variant = NfsVariant::two_tailed_196);

// Unweighted OLS of the standardized effect z_i/se_i on precision 1/se_i.
// Intercept away from zero signals small-study asymmetry. Requires k >= 3
// and at least two distinct precisions.
EggerResult egger_test(std::span<const NormalizedEffect> effects);

// failsafe_n + egger_test + the conjunction verdict:
// no_bias_indicated iff nfs >= 5k+10 and egger p > 0.05.
BiasDiagnostics bias_diagnostics(
    std::span<const NormalizedEffect> effects,
    NfsVariant variant = NfsVariant::two_tailed_196);

struct FunnelPoint {
  double z = 0.0;   // x axis, Fisher scale
  double se = 0.0;  // y axis, drawn increasing downward
  std::string study_id;
};

std::vector<FunnelPoint> funnel_points(
    std::span<const NormalizedEffect> effects);

}  // namespace metacorr

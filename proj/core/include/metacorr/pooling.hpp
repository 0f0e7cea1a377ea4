#pragma once

#include <span>
#include <string_view>
#include <utility>

#include "metacorr/transforms.hpp"

namespace metacorr {

enum class Model { fixed, random };
std::string_view to_string(Model m);

struct HeterogeneityStats {
  double q = 0.0;
  int df = 0;
  double p_q = 1.0;
  double i2 = 0.0;    // percent, [0, 100)
  double tau2 = 0.0;  // between-study variance on the z scale
};

struct PooledEstimate {
  Model model = Model::random;
  int k = 0;
  long long n_total = 0;
  double z_pooled = 0.0;  // Fisher scale
  double se = 0.0;        // Fisher scale
  double r_pooled = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double z_stat = 0.0;
  double p = 1.0;
  HeterogeneityStats het;
};

// Inverse-variance weighted mean on the Fisher scale: returns (z, se).
// Throws std::invalid_argument on an empty list.
std::pair<double, double> fixed_effect_pool(
    std::span<const NormalizedEffect> effects);

// Q, df, p_Q, I2, and DerSimonian-Laird tau2. Requires k >= 2 unless
// permissive is set, in which case k == 1 yields the degenerate
// {q=0, df=0, p_q=1, i2=0, tau2=0} (needed for single-study subgroups).
HeterogeneityStats heterogeneity(std::span<const NormalizedEffect> effects,
                                 bool permissive = false);

// z_stat = z/se, two-tailed normal p. Throws std::invalid_argument on se <= 0.
std::pair<double, double> significance_test(double z_pooled, double se);

// Pools under the given model. Random-effects weights are 1/(var + tau2)
// with tau2 from heterogeneity(); a k == 1 group degrades to the fixed
// estimate. 95% CI is z +- 1.96 se, back-transformed with tanh.
PooledEstimate pool_effects(std::span<const NormalizedEffect> effects,
                            Model model);

inline PooledEstimate random_effects_pool(
    std::span<const NormalizedEffect> effects) {
  return pool_effects(effects, Model::random);
}

// Model-selection rule: random effects when the Q test is significant at
// 0.05, fixed otherwise.
Model auto_model(const HeterogeneityStats& het);

}  // namespace metacorr

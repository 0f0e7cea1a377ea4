#include "metacorr/transforms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace metacorr {

double beta_to_r(double beta) {
  const double r = beta >= 0.0 ? beta + 0.05 : beta;
  if (!(r > -1.0 && r < 1.0))
    throw std::domain_error("beta_to_r: converted r = " + std::to_string(r) +
                            " outside (-1, 1)");
  return r;
}

double r_to_z(double r) {
  if (!(r > -1.0 && r < 1.0))
    throw std::domain_error("r_to_z: r = " + std::to_string(r) +
                            " outside (-1, 1)");
  return std::atanh(r);
}

double z_to_r(double z) noexcept { return std::tanh(z); }

double variance_of_z(int n) {
  if (n <= 3)
    throw std::domain_error("variance_of_z: n = " + std::to_string(n) +
                            " leaves no degrees of freedom (need n >= 4)");
  return 1.0 / (n - 3);
}

Magnitude classify_magnitude(double r) {
  const double a = std::fabs(r);
  if (a < 0.1) return Magnitude::negligible;
  if (a < 0.3) return Magnitude::weak;
  if (a < 0.5) return Magnitude::moderate;
  return Magnitude::strong;
}

std::string_view to_string(Magnitude m) {
  switch (m) {
    case Magnitude::negligible: return "negligible";
    case Magnitude::weak: return "weak";
    case Magnitude::moderate: return "moderate";
    case Magnitude::strong: return "strong";
  }
  return "?";
}

NormalizedEffect normalize(const StudyEffect& e) {
  NormalizedEffect out;
  out.r = e.effect_metric == EffectMetric::regression_beta
              ? beta_to_r(e.effect_value)
              : e.effect_value;
  out.z = r_to_z(out.r);
  out.var_z = variance_of_z(e.n);
  out.se_z = std::sqrt(out.var_z);
  out.n = e.n;
  out.meta = e;
  return out;
}

std::vector<NormalizedEffect> normalize(std::span<const StudyEffect> effects) {
  std::vector<NormalizedEffect> out;
  out.reserve(effects.size());
  for (const auto& e : effects) out.push_back(normalize(e));
  return out;
}

}  // namespace metacorr

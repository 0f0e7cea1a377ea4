#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "metacorr/model.hpp"

namespace metacorr {

// Coding-rule conversion for standardized regression coefficients:
// r = beta + 0.05 when beta >= 0, r = beta when beta < 0.
// Throws std::domain_error when the result leaves (-1, 1).
double beta_to_r(double beta);

// Fisher transform z = atanh(r). Throws std::domain_error unless -1 < r < 1;
// values at +-1 are rejected rather than clamped so an infinite z can never
// poison a pooled estimate silently.
double r_to_z(double r);
double z_to_r(double z) noexcept;

// Sampling variance of Fisher z: 1/(n-3). Throws std::domain_error for n <= 3.
double variance_of_z(int n);

enum class Magnitude { negligible, weak, moderate, strong };
// Half-open bands on |r|: [0,0.1) negligible, [0.1,0.3) weak,
// [0.3,0.5) moderate, [0.5,1) strong.
Magnitude classify_magnitude(double r);
std::string_view to_string(Magnitude m);

// A study effect carried into correlation and Fisher-z space.
struct NormalizedEffect {
  double r = 0.0;
  double z = 0.0;
  double var_z = 0.0;
  double se_z = 0.0;
  int n = 0;
  StudyEffect meta;
};

NormalizedEffect normalize(const StudyEffect& e);
std::vector<NormalizedEffect> normalize(std::span<const StudyEffect> effects);

}  // namespace metacorr

#pragma once

namespace metacorr {

// Standard normal CDF / survival function, built on erfc so the far tails
// keep full relative precision.
double norm_cdf(double x);
double norm_sf(double x);
// p = 2 * (1 - Phi(|z|))
double two_tailed_normal_p(double z);

// Regularized incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s), s > 0, x >= 0.
double regularized_gamma_q(double s, double x);
// Regularized incomplete beta I_x(a, b), a,b > 0, x in [0, 1].
double regularized_beta(double a, double b, double x);

// Chi-square upper tail P(X > x) with df degrees of freedom.
double chi2_sf(double x, int df);

// Student t upper tail P(T > t), any real t, df >= 1.
double student_t_sf(double t, int df);
// p = 2 * P(T > |t|)
double two_tailed_t_p(double t, int df);

// t such that P(T > t) = 0.025, i.e. the 97.5% quantile, df >= 1.
double student_t_q975(int df);

}  // namespace metacorr

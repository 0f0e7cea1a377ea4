#include "metacorr/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace metacorr {

namespace {

constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 500;

// Lower regularized gamma P(s,x) by power series; converges fast for x < s+1.
double gamma_p_series(double s, double x) {
  double ap = s;
  double sum = 1.0 / s;
  double del = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
  }
  throw std::runtime_error("gamma_p_series: no convergence");
}

// Upper regularized gamma Q(s,x) by modified Lentz continued fraction;
// converges fast for x >= s+1.
double gamma_q_cf(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps)
      return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
  }
  throw std::runtime_error("gamma_q_cf: no convergence");
}

// Incomplete beta continued fraction (modified Lentz).
double betacf(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("betacf: no convergence");
}

}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double norm_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double two_tailed_normal_p(double z) {
  double p = 2.0 * norm_sf(std::fabs(z));
  return p > 1.0 ? 1.0 : p;
}

double regularized_gamma_q(double s, double x) {
  if (s <= 0.0 || x < 0.0)
    throw std::domain_error("regularized_gamma_q: need s > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double regularized_beta(double a, double b, double x) {
  if (a <= 0.0 || b <= 0.0)
    throw std::domain_error("regularized_beta: need a, b > 0");
  if (x < 0.0 || x > 1.0)
    throw std::domain_error("regularized_beta: need x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) -
                                std::lgamma(b) + a * std::log(x) +
                                b * std::log1p(-x));
  // Continued fraction converges fast when x < (a+1)/(a+b+2); otherwise use
  // the symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double chi2_sf(double x, int df) {
  if (df < 1) throw std::domain_error("chi2_sf: need df >= 1");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double student_t_sf(double t, int df) {
  if (df < 1) throw std::domain_error("student_t_sf: need df >= 1");
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2); halve for one tail.
  const double x = df / (df + t * t);
  const double both_tails = regularized_beta(0.5 * df, 0.5, x);
  return t >= 0.0 ? 0.5 * both_tails : 1.0 - 0.5 * both_tails;
}

double two_tailed_t_p(double t, int df) {
  double p = 2.0 * student_t_sf(std::fabs(t), df);
  return p > 1.0 ? 1.0 : p;
}

double student_t_q975(int df) {
  if (df < 1) throw std::domain_error("student_t_q975: need df >= 1");
  // sf is strictly decreasing in t; bisect sf(t) = 0.025.
  double lo = 0.0, hi = 64.0;
  while (student_t_sf(hi, df) > 0.025) hi *= 2.0;  // df=1 needs hi ~ 12.7
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (student_t_sf(mid, df) > 0.025)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace metacorr

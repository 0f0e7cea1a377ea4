// Distribution functions against reference values computed with mpmath at
// 40 significant digits.

#include <cmath>
#include <initializer_list>

#include "doctest.h"
#include "metacorr/stats.hpp"

using namespace metacorr;

namespace {

// Relative-error check that stays meaningful for far-tail probabilities.
void check_rel(double got, double want, double rel = 1e-11) {
  if (want == 0.0) {
    CHECK(std::abs(got) < 1e-300);
    return;
  }
  CHECK(got / want == doctest::Approx(1.0).epsilon(rel));
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("normal cdf matches reference values") {
  check_rel(norm_cdf(0.0), 0.5);
  check_rel(norm_cdf(1.0), 0.84134474606854295);
  check_rel(norm_cdf(-1.0), 0.15865525393145705);
  check_rel(norm_cdf(1.959964), 0.9750000009035576);
  check_rel(norm_cdf(4.0032), 0.99996875428497933);
  check_rel(norm_cdf(7.7887), 0.99999999999999661);
  check_rel(norm_cdf(-2.5283), 0.0057308183944993942);
  CHECK(norm_cdf(36.0) == 1.0);
}

TEST_CASE("normal cdf/sf symmetry and two-tailed p") {
  for (double x : {0.0, 0.3, 1.0, 1.96, 2.5, 4.0, 6.0}) {
    CHECK(norm_cdf(-x) == doctest::Approx(1.0 - norm_cdf(x)).epsilon(1e-14));
    CHECK(norm_sf(x) == doctest::Approx(norm_cdf(-x)).epsilon(1e-14));
    CHECK(two_tailed_normal_p(x) ==
          doctest::Approx(2.0 * norm_sf(x)).epsilon(1e-14));
    CHECK(two_tailed_normal_p(-x) ==
          doctest::Approx(two_tailed_normal_p(x)).epsilon(1e-14));
  }
  CHECK(two_tailed_normal_p(1.959964) == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("chi-square survival function matches reference values") {
  check_rel(chi2_sf(0.5, 1), 0.47950012218695346);
  check_rel(chi2_sf(3.841458820694124, 1), 0.050000000000000057);
  check_rel(chi2_sf(5.991464547107979, 2), 0.050000000000000074);
  check_rel(chi2_sf(9.487729036781154, 4), 0.050000000000000057);
  check_rel(chi2_sf(16.918977604620448, 9), 0.050000000000000032);
  check_rel(chi2_sf(12.238, 1), 0.00046825994321613362);
  check_rel(chi2_sf(18.2926, 1), 1.8944163081733699e-5);
  check_rel(chi2_sf(0.0876, 1), 0.76725072256713853);
  check_rel(chi2_sf(33.7503, 4), 8.3842683219133154e-7);
  check_rel(chi2_sf(46.0651, 7), 8.4906458771187368e-8);
  // Far tails: the continued-fraction branch must keep relative accuracy.
  check_rel(chi2_sf(382.5326, 18), 3.9823739223263035e-70, 1e-10);
  check_rel(chi2_sf(712.4788, 9), 1.4352341185461201e-147, 1e-10);
}

TEST_CASE("chi-square survival function basic behavior") {
  CHECK(chi2_sf(0.0, 3) == doctest::Approx(1.0));
  double prev = 1.0;
  for (double x = 0.5; x < 40.0; x += 0.5) {
    const double cur = chi2_sf(x, 5);
    CHECK(cur < prev);
    prev = cur;
  }
  CHECK_THROWS(chi2_sf(1.0, 0));
  // The survival function saturates below the support instead of throwing.
  CHECK(chi2_sf(-1.0, 3) == 1.0);
  CHECK(chi2_sf(0.0, 3) == 1.0);
}

TEST_CASE("student t survival function matches reference values") {
  check_rel(student_t_sf(1.0, 1), 0.25);
  check_rel(student_t_sf(2.0, 4), 0.058058261758407797);
  check_rel(student_t_sf(1.018086, 17), 0.16145412266740008);
  check_rel(student_t_sf(1.098094, 14), 0.1453452902893798);
  check_rel(student_t_sf(0.735829, 8), 0.24142432677535173);
  check_rel(student_t_sf(0.346281, 6), 0.37047580265477988);
  check_rel(student_t_sf(0.360664, 3), 0.3711253113062041);
  check_rel(student_t_sf(0.864409, 3), 0.22547294436870888);
  check_rel(student_t_sf(2.306004135204166, 8), 0.025000000000000034);
  check_rel(student_t_sf(12.0, 2), 0.0034364668385792301);
  check_rel(student_t_sf(0.002, 7), 0.4992300176849886);
}

TEST_CASE("student t survival function sign handling") {
  CHECK(student_t_sf(0.0, 5) == doctest::Approx(0.5).epsilon(1e-14));
  for (double t : {0.5, 1.3, 2.7}) {
    CHECK(student_t_sf(-t, 9) ==
          doctest::Approx(1.0 - student_t_sf(t, 9)).epsilon(1e-13));
    CHECK(two_tailed_t_p(t, 9) ==
          doctest::Approx(2.0 * student_t_sf(t, 9)).epsilon(1e-14));
  }
}

TEST_CASE("student t 97.5% quantile matches reference values") {
  check_rel(student_t_q975(1), 12.706204736174705);
  check_rel(student_t_q975(2), 4.3026527297494639);
  check_rel(student_t_q975(3), 3.1824463052837096);
  check_rel(student_t_q975(4), 2.7764451051977944);
  check_rel(student_t_q975(6), 2.44691185114497);
  check_rel(student_t_q975(7), 2.3646242515927853);
  check_rel(student_t_q975(8), 2.3060041352041667);
  check_rel(student_t_q975(13), 2.1603686564627925);
  check_rel(student_t_q975(14), 2.1447866879178038);
  check_rel(student_t_q975(17), 2.1098155778333171);
}

TEST_CASE("quantile inverts the survival function") {
  for (int df = 1; df <= 60; ++df) {
    const double q = student_t_q975(df);
    CHECK(student_t_sf(q, df) == doctest::Approx(0.025).epsilon(1e-10));
  }
}

}  // TEST_SUITE

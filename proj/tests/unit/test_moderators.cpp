// Subgroup contrast and meta-regression against hand-derived oracles
// (mpmath, 40 digits) plus invariance properties.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "metacorr/moderators.hpp"
#include "metacorr/stats.hpp"

using namespace metacorr;
using testutil::make_normalized;

TEST_SUITE("moderators") {

TEST_CASE("meta-regression four-study oracle (method of moments)") {
  const auto eff = make_normalized({{0.15, 53, 20.0},
                                    {0.35, 103, 40.0},
                                    {0.30, 203, 60.0},
                                    {0.55, 403, 80.0}});
  const std::vector<double> x = {20.0, 40.0, 60.0, 80.0};
  const MetaRegressionResult m = meta_regression(eff, x, "male_pct");
  CHECK(m.k == 4);
  CHECK(m.tau2_residual ==
        doctest::Approx(0.007777394796550503).epsilon(1e-11));
  CHECK(m.coefficient == doctest::Approx(0.007056322966988315).epsilon(1e-11));
  CHECK(m.intercept == doctest::Approx(0.005119917399480283).epsilon(1e-10));
  CHECK(m.se == doctest::Approx(0.002916172775629702).epsilon(1e-11));
  CHECK(m.z_stat == doctest::Approx(2.419720472654304).epsilon(1e-11));
  CHECK(m.p == doctest::Approx(0.015532441763917456).epsilon(1e-10));
  CHECK(m.ci_low == doctest::Approx(0.001340624326754099).epsilon(1e-9));
  CHECK(m.ci_high == doctest::Approx(0.012772021607222530).epsilon(1e-9));
  CHECK(m.moderator == "male_pct");
}

TEST_CASE("male_pct convenience wrapper uses the carried metadata") {
  const auto eff = make_normalized({{0.15, 53, 20.0},
                                    {0.35, 103, 40.0},
                                    {0.30, 203, 60.0},
                                    {0.55, 403, 80.0}});
  const std::vector<double> x = {20.0, 40.0, 60.0, 80.0};
  const MetaRegressionResult a = meta_regression(eff, x, "male_pct");
  const MetaRegressionResult b = meta_regression_male_pct(eff);
  CHECK(b.coefficient == doctest::Approx(a.coefficient).epsilon(1e-15));
  CHECK(b.se == doctest::Approx(a.se).epsilon(1e-15));
  CHECK(b.tau2_residual == doctest::Approx(a.tau2_residual).epsilon(1e-15));
}

TEST_CASE("intercept-only meta-regression reproduces DL pooling exactly") {
  const auto eff = make_normalized(
      {{0.1, 53}, {0.4, 103}, {0.6, 203}, {-0.15, 78}, {0.52, 311}});
  const MetaRegressionResult m = meta_regression_intercept_only(eff);
  const PooledEstimate p = random_effects_pool(eff);
  CHECK(m.intercept == doctest::Approx(p.z_pooled).epsilon(1e-12));
  CHECK(m.tau2_residual == doctest::Approx(p.het.tau2).epsilon(1e-12));
  CHECK(m.se == doctest::Approx(p.se).epsilon(1e-12));
}

TEST_CASE("slope is invariant under moderator shift, halves under doubling") {
  const auto eff = make_normalized({{0.15, 53, 20.0},
                                    {0.35, 103, 40.0},
                                    {0.30, 203, 60.0},
                                    {0.55, 403, 80.0}});
  const std::vector<double> x = {20.0, 40.0, 60.0, 80.0};
  std::vector<double> shifted, doubled;
  for (double xi : x) {
    shifted.push_back(xi + 100.0);
    doubled.push_back(xi * 2.0);
  }
  const auto base = meta_regression(eff, x, "m");
  const auto sh = meta_regression(eff, shifted, "m");
  const auto db = meta_regression(eff, doubled, "m");
  CHECK(sh.coefficient == doctest::Approx(base.coefficient).epsilon(1e-10));
  CHECK(sh.tau2_residual ==
        doctest::Approx(base.tau2_residual).epsilon(1e-10));
  CHECK(sh.se == doctest::Approx(base.se).epsilon(1e-10));
  CHECK(db.coefficient ==
        doctest::Approx(base.coefficient / 2.0).epsilon(1e-10));
  CHECK(db.tau2_residual ==
        doctest::Approx(base.tau2_residual).epsilon(1e-10));
}

TEST_CASE("constant outcome gives a zero slope") {
  const auto eff = make_normalized(
      {{0.3, 103, 10.0}, {0.3, 203, 50.0}, {0.3, 303, 90.0}});
  const auto m = meta_regression_male_pct(eff);
  CHECK(m.coefficient == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(m.tau2_residual == 0.0);
  CHECK(m.intercept == doctest::Approx(std::atanh(0.3)).epsilon(1e-13));
}

TEST_CASE("meta-regression input guards") {
  const auto eff = make_normalized({{0.1, 53}, {0.4, 103}, {0.6, 203}});
  CHECK_THROWS_AS(meta_regression(eff, std::vector<double>{1.0, 2.0}, "m"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      meta_regression(eff, std::vector<double>{5.0, 5.0, 5.0}, "m"),
      std::invalid_argument);
  const auto two = make_normalized({{0.1, 53}, {0.4, 103}});
  CHECK_THROWS_AS(meta_regression(two, std::vector<double>{1.0, 2.0}, "m"),
                  std::invalid_argument);
}

TEST_CASE("subgroup two-group oracle") {
  const auto eff = make_normalized(
      {{0.3, 103, 50.0, RegionClass::developed},
       {0.35, 203, 50.0, RegionClass::developed},
       {0.5, 153, 50.0, RegionClass::developing},
       {0.55, 253, 50.0, RegionClass::developing},
       {0.6, 303, 50.0, RegionClass::developing}});
  const SubgroupResult s = subgroup_analysis(eff);
  REQUIRE(s.groups.size() == 2);
  CHECK(s.groups[0].label == "developed");
  CHECK(s.groups[1].label == "developing");

  const PooledEstimate& dev = s.groups[0].pool;
  CHECK(dev.k == 2);
  CHECK(dev.het.tau2 == 0.0);  // Q = 0.2085 < df: clamped
  CHECK(dev.z_pooled == doctest::Approx(0.3468023709153014).epsilon(1e-12));
  CHECK(dev.se == doctest::Approx(0.05773502691896258).epsilon(1e-12));
  CHECK(dev.r_pooled == doctest::Approx(0.3335366783873853).epsilon(1e-12));
  CHECK(dev.ci_low == doctest::Approx(0.2294811619835294).epsilon(1e-12));
  CHECK(dev.ci_high == doctest::Approx(0.4300540741995667).epsilon(1e-12));
  CHECK(dev.z_stat == doctest::Approx(6.006793266106490).epsilon(1e-12));
  CHECK(dev.p / 1.8922854574653846e-9 == doctest::Approx(1.0).epsilon(1e-9));

  const PooledEstimate& dvg = s.groups[1].pool;
  CHECK(dvg.k == 3);
  CHECK(dvg.het.tau2 ==
        doctest::Approx(0.0004102628389862872).epsilon(1e-11));
  CHECK(dvg.z_pooled == doctest::Approx(0.6344573916203495).epsilon(1e-12));
  CHECK(dvg.se == doctest::Approx(0.03967845033546245).epsilon(1e-12));
  CHECK(dvg.r_pooled == doctest::Approx(0.5611138402027873).epsilon(1e-12));
  CHECK(dvg.ci_low == doctest::Approx(0.5055156564294475).epsilon(1e-12));
  CHECK(dvg.ci_high == doctest::Approx(0.6120715237407041).epsilon(1e-12));
  CHECK(dvg.z_stat == doctest::Approx(15.98997406038577).epsilon(1e-12));
  CHECK(dvg.p / 1.5009349173752672e-57 == doctest::Approx(1.0).epsilon(1e-8));

  CHECK(s.q_between == doctest::Approx(16.86027994677559).epsilon(1e-11));
  CHECK(s.df_between == 1);
  CHECK(s.p_between / 4.0234811197284947e-5 ==
        doctest::Approx(1.0).epsilon(1e-9));
  // Definitional consistency with the chi-square tail.
  CHECK(s.p_between ==
        doctest::Approx(chi2_sf(s.q_between, s.df_between)).epsilon(1e-14));
}

TEST_CASE("identical subgroups give a null contrast") {
  const auto eff = make_normalized(
      {{0.3, 103, 50.0, RegionClass::developed},
       {0.5, 203, 50.0, RegionClass::developed},
       {0.3, 103, 50.0, RegionClass::developing},
       {0.5, 203, 50.0, RegionClass::developing}});
  const SubgroupResult s = subgroup_analysis(eff);
  CHECK(s.q_between == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(s.p_between == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a single-study group degrades to its fixed estimate") {
  const auto eff = make_normalized(
      {{0.42, 203, 50.0, RegionClass::developed},
       {0.5, 153, 50.0, RegionClass::developing},
       {0.55, 253, 50.0, RegionClass::developing}});
  const SubgroupResult s = subgroup_analysis(eff);
  REQUIRE(s.groups.size() == 2);
  const PooledEstimate& solo = s.groups[0].pool;
  CHECK(solo.k == 1);
  CHECK(solo.z_pooled == doctest::Approx(std::atanh(0.42)).epsilon(1e-15));
  CHECK(solo.het.tau2 == 0.0);
  CHECK(s.q_between >= 0.0);
}

TEST_CASE("subgroup analysis needs two region classes") {
  const auto eff = make_normalized(
      {{0.3, 103, 50.0, RegionClass::developing},
       {0.5, 203, 50.0, RegionClass::developing}});
  CHECK_THROWS_AS(subgroup_analysis(eff), std::invalid_argument);
}

}  // TEST_SUITE

// Pooling and heterogeneity against hand-derived oracles (mpmath, 40 digits)
// plus structural properties.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "metacorr/pooling.hpp"

using namespace metacorr;
using testutil::make_normalized;

TEST_SUITE("pooling") {

TEST_CASE("two-study oracle: fixed effect, Q, tau2, random effect") {
  const auto effects = make_normalized({{0.3, 103}, {0.5, 203}});

  const auto [zf, sef] = fixed_effect_pool(effects);
  CHECK(zf == doctest::Approx(0.4693772976237404690).epsilon(1e-13));
  CHECK(sef == doctest::Approx(0.05773502691896257645).epsilon(1e-13));

  const HeterogeneityStats het = heterogeneity(effects);
  CHECK(het.q == doctest::Approx(3.833172321864560019).epsilon(1e-12));
  CHECK(het.df == 1);
  CHECK(het.p_q == doctest::Approx(0.05024774530220411681).epsilon(1e-11));
  CHECK(het.i2 == doctest::Approx(73.91194770201271288).epsilon(1e-12));
  CHECK(het.tau2 == doctest::Approx(0.02124879241398420014).epsilon(1e-12));

  const PooledEstimate re = random_effects_pool(effects);
  CHECK(re.z_pooled == doctest::Approx(0.4398388139340657335).epsilon(1e-12));
  CHECK(re.se == doctest::Approx(0.1194390890332131582).epsilon(1e-12));
  CHECK(re.r_pooled == doctest::Approx(0.4135108264275534169).epsilon(1e-12));
  CHECK(re.ci_low == doctest::Approx(0.2028836774139374231).epsilon(1e-12));
  CHECK(re.ci_high == doctest::Approx(0.5875652617983935662).epsilon(1e-12));
  CHECK(re.z_stat == doctest::Approx(3.682536575708117330).epsilon(1e-12));
  CHECK(re.p == doctest::Approx(0.0002309247234524662183).epsilon(1e-11));
  CHECK(re.n_total == 306);
  CHECK(re.k == 2);

  // p_Q sits just above 0.05, so the selection rule keeps fixed effects.
  CHECK(auto_model(het) == Model::fixed);
}

TEST_CASE("three-study oracle: full DerSimonian-Laird chain") {
  const auto effects = make_normalized({{0.1, 53}, {0.4, 103}, {0.6, 203}});

  const HeterogeneityStats het = heterogeneity(effects);
  CHECK(het.q == doctest::Approx(15.68429483843831126).epsilon(1e-12));
  CHECK(het.df == 2);
  CHECK(het.p_q == doctest::Approx(0.0003928245752263493384).epsilon(1e-11));
  CHECK(het.i2 == doctest::Approx(87.24839069526736564).epsilon(1e-12));
  CHECK(het.tau2 == doctest::Approx(0.06842147419219155631).epsilon(1e-12));
  CHECK(auto_model(het) == Model::random);

  const PooledEstimate re = random_effects_pool(effects);
  CHECK(re.z_pooled == doctest::Approx(0.4240220402663284679).epsilon(1e-12));
  CHECK(re.se == doctest::Approx(0.1629064843112620179).epsilon(1e-12));
  CHECK(re.r_pooled == doctest::Approx(0.4003133656785926138).epsilon(1e-12));
  CHECK(re.ci_low == doctest::Approx(0.1043441484717034044).epsilon(1e-12));
  CHECK(re.ci_high == doctest::Approx(0.6311460862086151533).epsilon(1e-12));
  CHECK(re.z_stat == doctest::Approx(2.602855509766931129).epsilon(1e-12));
  CHECK(re.p == doctest::Approx(0.009245090800452039642).epsilon(1e-11));
}

TEST_CASE("single study passes through unchanged") {
  const auto effects = make_normalized({{0.42, 203}});
  const PooledEstimate re = random_effects_pool(effects);
  CHECK(re.z_pooled == doctest::Approx(std::atanh(0.42)).epsilon(1e-15));
  CHECK(re.se == doctest::Approx(1.0 / std::sqrt(200.0)).epsilon(1e-15));
  CHECK(re.r_pooled == doctest::Approx(0.42).epsilon(1e-13));
  CHECK(re.het.tau2 == 0.0);
  CHECK(re.het.q == 0.0);
  CHECK(re.het.df == 0);

  // Outside the permissive path, k == 1 is a usage error.
  CHECK_THROWS_AS(heterogeneity(effects), std::invalid_argument);
  CHECK_THROWS_AS(heterogeneity({}, true), std::invalid_argument);
}

TEST_CASE("pooled estimate is permutation invariant") {
  std::vector<testutil::Spec> specs = {
      {0.1, 53}, {0.25, 78}, {0.4, 103}, {0.55, 203}, {0.6, 403}, {-0.2, 64}};
  auto base = random_effects_pool(make_normalized(specs));
  std::mt19937 rng(20240819);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(specs.begin(), specs.end(), rng);
    auto shuffled = random_effects_pool(make_normalized(specs));
    CHECK(shuffled.z_pooled == doctest::Approx(base.z_pooled).epsilon(1e-12));
    CHECK(shuffled.het.tau2 == doctest::Approx(base.het.tau2).epsilon(1e-12));
    CHECK(shuffled.se == doctest::Approx(base.se).epsilon(1e-12));
  }
}

TEST_CASE("pooled z lies within the range of study z values") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> rdist(-0.8, 0.8);
  std::uniform_int_distribution<int> ndist(10, 500);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<testutil::Spec> specs;
    const int k = 2 + trial % 7;
    for (int i = 0; i < k; ++i) specs.push_back({rdist(rng), ndist(rng)});
    const auto eff = make_normalized(specs);
    double zmin = 1e9, zmax = -1e9;
    for (const auto& e : eff) {
      zmin = std::min(zmin, e.z);
      zmax = std::max(zmax, e.z);
    }
    for (Model m : {Model::fixed, Model::random}) {
      const auto pooled = pool_effects(eff, m);
      CHECK(pooled.z_pooled >= zmin - 1e-12);
      CHECK(pooled.z_pooled <= zmax + 1e-12);
      CHECK(pooled.het.i2 >= 0.0);
      CHECK(pooled.het.i2 < 100.0);
      CHECK(pooled.het.tau2 >= 0.0);
      CHECK(pooled.ci_low < pooled.r_pooled);
      CHECK(pooled.ci_high > pooled.r_pooled);
    }
  }
}

TEST_CASE("homogeneous studies: tau2 clamps to zero, models coincide") {
  // Same r everywhere: Q is exactly 0 < df, so tau2 = 0 and the random
  // weights equal the fixed weights.
  const auto eff = make_normalized({{0.3, 53}, {0.3, 103}, {0.3, 203}});
  const auto fixed = pool_effects(eff, Model::fixed);
  const auto random = pool_effects(eff, Model::random);
  CHECK(random.het.tau2 == 0.0);
  CHECK(random.het.i2 == 0.0);
  CHECK(random.z_pooled == doctest::Approx(fixed.z_pooled).epsilon(1e-15));
  CHECK(random.se == doctest::Approx(fixed.se).epsilon(1e-15));
  CHECK(fixed.z_pooled == doctest::Approx(std::atanh(0.3)).epsilon(1e-13));
}

TEST_CASE("random-effects CI is at least as wide as fixed-effects CI") {
  const auto eff = make_normalized({{0.1, 53}, {0.4, 103}, {0.6, 203}});
  const auto fixed = pool_effects(eff, Model::fixed);
  const auto random = pool_effects(eff, Model::random);
  CHECK(random.se >= fixed.se);
  CHECK(random.ci_high - random.ci_low >= fixed.ci_high - fixed.ci_low);
  // Both models report the same underlying heterogeneity, but the fixed
  // model ignores tau2 in its weights.
  CHECK(random.het.q == doctest::Approx(fixed.het.q).epsilon(1e-15));
}

TEST_CASE("larger samples narrow the fixed-effect confidence interval") {
  // Not true for the random-effects model in general: shrinking the
  // sampling variances makes the same spread in effects read as more
  // heterogeneity, and the growing tau2 can outweigh the precision gain.
  const auto small = make_normalized({{0.3, 53}, {0.5, 103}});
  const auto big = make_normalized({{0.3, 530}, {0.5, 1030}});
  const auto ps = pool_effects(small, Model::fixed);
  const auto pb = pool_effects(big, Model::fixed);
  CHECK(pb.ci_high - pb.ci_low < ps.ci_high - ps.ci_low);
  // With homogeneous effects tau2 stays 0 and the random model narrows too.
  const auto hs = random_effects_pool(make_normalized({{0.4, 53}, {0.4, 103}}));
  const auto hb =
      random_effects_pool(make_normalized({{0.4, 530}, {0.4, 1030}}));
  CHECK(hb.ci_high - hb.ci_low < hs.ci_high - hs.ci_low);
}

TEST_CASE("significance test and model rule") {
  const auto [zs, p] = significance_test(0.4398388139340657335,
                                         0.1194390890332131582);
  CHECK(zs == doctest::Approx(3.682536575708117330).epsilon(1e-12));
  CHECK(p == doctest::Approx(0.0002309247234524662183).epsilon(1e-11));
  CHECK_THROWS_AS(significance_test(0.3, 0.0), std::invalid_argument);

  HeterogeneityStats het;
  het.p_q = 0.049999;
  CHECK(auto_model(het) == Model::random);
  het.p_q = 0.05;
  CHECK(auto_model(het) == Model::fixed);  // strict inequality at the cutoff
  het.p_q = 0.8;
  CHECK(auto_model(het) == Model::fixed);
}

}  // TEST_SUITE

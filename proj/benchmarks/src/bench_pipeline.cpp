// Microbenchmarks for the statistical kernels plus one end-to-end run over
// the bundled dataset. Synthetic inputs are generated once per size and
// reused across iterations so the timings isolate the kernels themselves.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "metacorr/bias.hpp"
#include "metacorr/dataset.hpp"
#include "metacorr/moderators.hpp"
#include "metacorr/pooling.hpp"
#include "metacorr/report.hpp"
#include "metacorr/transforms.hpp"

namespace {

using namespace metacorr;

std::vector<NormalizedEffect> synthetic_effects(int k) {
  std::mt19937 rng(20240819u + static_cast<unsigned>(k));
  std::uniform_real_distribution<double> r_dist(-0.6, 0.7);
  std::uniform_int_distribution<int> n_dist(40, 2000);
  std::uniform_real_distribution<double> male_dist(10.0, 90.0);
  std::vector<StudyEffect> raw;
  raw.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) {
    StudyEffect e;
    e.study_id = "synth" + std::to_string(i);
    e.first_author = "Author " + std::to_string(i);
    e.year = 2024;
    e.pub_type = PubType::journal;
    e.region = "Testland";
    e.region_class = i % 2 ? RegionClass::developed : RegionClass::developing;
    e.n = n_dist(rng);
    e.male_pct = male_dist(rng);
    e.raw_factor = "habit";
    e.effect_value = r_dist(rng);
    e.effect_metric = EffectMetric::correlation_r;
    e.line = i + 2;
    raw.push_back(std::move(e));
  }
  return normalize(raw);
}

void bm_fisher_transform(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    for (double x = -0.95; x < 0.95; x += 0.001) {
      r += z_to_r(r_to_z(x));
    }
  }
  benchmark::DoNotOptimize(r);
}
BENCHMARK(bm_fisher_transform);

void bm_random_effects_pool(benchmark::State& state) {
  const auto effects = synthetic_effects(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto pooled = random_effects_pool(effects);
    benchmark::DoNotOptimize(pooled);
  }
}
BENCHMARK(bm_random_effects_pool)->Arg(8)->Arg(32)->Arg(256)->Arg(2048);

void bm_heterogeneity(benchmark::State& state) {
  const auto effects = synthetic_effects(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto het = heterogeneity(effects);
    benchmark::DoNotOptimize(het);
  }
}
BENCHMARK(bm_heterogeneity)->Arg(32)->Arg(2048);

void bm_bias_diagnostics(benchmark::State& state) {
  const auto effects = synthetic_effects(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto bias = bias_diagnostics(effects);
    benchmark::DoNotOptimize(bias);
  }
}
BENCHMARK(bm_bias_diagnostics)->Arg(8)->Arg(256);

void bm_meta_regression(benchmark::State& state) {
  const auto effects = synthetic_effects(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto fit = meta_regression_male_pct(effects);
    benchmark::DoNotOptimize(fit);
  }
}
BENCHMARK(bm_meta_regression)->Arg(8)->Arg(256);

void bm_full_pipeline_bundled(benchmark::State& state) {
  const CodedDataset ds =
      parse_dataset(METACORR_DATA_DIR "/genai_intention_effects.csv",
                    METACORR_DATA_DIR "/factor_mapping.csv");
  const MappedDataset mapped = apply_mapping(ds);
  for (auto _ : state) {
    auto report = run_pipeline(mapped, Settings{});
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(bm_full_pipeline_bundled)->Unit(benchmark::kMicrosecond);

void bm_render_json_bundled(benchmark::State& state) {
  const CodedDataset ds =
      parse_dataset(METACORR_DATA_DIR "/genai_intention_effects.csv",
                    METACORR_DATA_DIR "/factor_mapping.csv");
  const AnalysisReport report = run_pipeline(apply_mapping(ds), Settings{});
  for (auto _ : state) {
    auto text = render_json(report);
    benchmark::DoNotOptimize(text);
  }
}
BENCHMARK(bm_render_json_bundled)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

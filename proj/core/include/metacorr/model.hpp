#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace metacorr {

enum class PubType { journal, conference };
enum class RegionClass { developed, developing };
enum class EffectMetric { correlation_r, regression_beta };

// The eight canonical factors the coding sheet summarises raw variables into.
enum class Factor {
  performance_expectancy,
  effort_expectancy,
  social_influence,
  attitude,
  facilitating_conditions,
  hedonic_motivation,
  perceived_cost,
  habit,
};

inline constexpr std::array<Factor, 8> kAllFactors{
    Factor::performance_expectancy, Factor::effort_expectancy,
    Factor::social_influence,       Factor::attitude,
    Factor::facilitating_conditions, Factor::hedonic_motivation,
    Factor::perceived_cost,         Factor::habit,
};

std::string_view to_string(Factor f);
std::string_view to_string(PubType t);
std::string_view to_string(RegionClass c);
std::string_view to_string(EffectMetric m);

std::optional<Factor> factor_from_string(std::string_view s);
std::optional<PubType> pub_type_from_string(std::string_view s);
std::optional<RegionClass> region_class_from_string(std::string_view s);
std::optional<EffectMetric> effect_metric_from_string(std::string_view s);

// One row of the coding sheet: a single reported effect of one raw variable
// on intention in one study.
struct StudyEffect {
  std::string study_id;
  std::string first_author;
  int year = 0;
  PubType pub_type = PubType::journal;
  std::string region;
  RegionClass region_class = RegionClass::developing;
  int n = 0;
  double male_pct = 0.0;
  std::string raw_factor;
  double effect_value = 0.0;
  EffectMetric effect_metric = EffectMetric::correlation_r;
  int line = 0;  // 1-based source line; 0 for synthetic effects
};

}  // namespace metacorr

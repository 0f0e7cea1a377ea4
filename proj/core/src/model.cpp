#include "metacorr/model.hpp"

namespace metacorr {

std::string_view to_string(Factor f) {
  switch (f) {
    case Factor::performance_expectancy: return "PerformanceExpectancy";
    case Factor::effort_expectancy: return "EffortExpectancy";
    case Factor::social_influence: return "SocialInfluence";
    case Factor::attitude: return "Attitude";
    case Factor::facilitating_conditions: return "FacilitatingConditions";
    case Factor::hedonic_motivation: return "HedonicMotivation";
    case Factor::perceived_cost: return "PerceivedCost";
    case Factor::habit: return "Habit";
  }
  return "?";
}

std::string_view to_string(PubType t) {
  return t == PubType::journal ? "journal" : "conference";
}

std::string_view to_string(RegionClass c) {
  return c == RegionClass::developed ? "developed" : "developing";
}

std::string_view to_string(EffectMetric m) {
  return m == EffectMetric::correlation_r ? "correlation_r" : "regression_beta";
}

std::optional<Factor> factor_from_string(std::string_view s) {
  for (Factor f : kAllFactors)
    if (s == to_string(f)) return f;
  return std::nullopt;
}

std::optional<PubType> pub_type_from_string(std::string_view s) {
  if (s == "journal") return PubType::journal;
  if (s == "conference") return PubType::conference;
  return std::nullopt;
}

std::optional<RegionClass> region_class_from_string(std::string_view s) {
  if (s == "developed") return RegionClass::developed;
  if (s == "developing") return RegionClass::developing;
  return std::nullopt;
}

std::optional<EffectMetric> effect_metric_from_string(std::string_view s) {
  if (s == "correlation_r") return EffectMetric::correlation_r;
  if (s == "regression_beta") return EffectMetric::regression_beta;
  return std::nullopt;
}

}  // namespace metacorr

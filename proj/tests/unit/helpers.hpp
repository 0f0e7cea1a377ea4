#pragma once

#include <string>
#include <vector>

#include "metacorr/transforms.hpp"

namespace testutil {

struct Spec {
  double r;
  int n;
  double male_pct = 50.0;
  metacorr::RegionClass region = metacorr::RegionClass::developing;
};

inline metacorr::StudyEffect make_effect(const Spec& s, int index) {
  metacorr::StudyEffect e;
  e.study_id = "study" + std::to_string(index);
  e.first_author = "Author " + std::to_string(index);
  e.year = 2024;
  e.pub_type = metacorr::PubType::journal;
  e.region = "Testland";
  e.region_class = s.region;
  e.n = s.n;
  e.male_pct = s.male_pct;
  e.raw_factor = "habit";
  e.effect_value = s.r;
  e.effect_metric = metacorr::EffectMetric::correlation_r;
  return e;
}

inline std::vector<metacorr::NormalizedEffect> make_normalized(
    const std::vector<Spec>& specs) {
  std::vector<metacorr::StudyEffect> raw;
  int i = 0;
  for (const auto& s : specs) raw.push_back(make_effect(s, ++i));
  return metacorr::normalize(raw);
}

}  // namespace testutil

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "metacorr/model.hpp"

namespace metacorr {

// Raw variable name (folded to lower case) -> canonical factor.
using FactorMapping = std::map<std::string, Factor>;

// Loads the canonical_factor,raw_name table. Throws std::runtime_error on
// unknown factor names or a raw name mapped to two factors.
FactorMapping load_mapping(const std::string& path);

struct CodedDataset {
  std::vector<StudyEffect> effects;
  FactorMapping mapping;
  int min_k = 3;
};

// Parses the coding sheet. Throws std::runtime_error naming the offending
// line for structural problems: wrong column count, non-numeric numbers,
// unknown enum spellings, bad header.
CodedDataset parse_dataset(const std::string& data_path,
                           const std::string& mapping_path, int min_k = 3);

// Semantic validation: n >= 4, male_pct in [0,100], correlation_r within
// (-1,1), duplicate (study_id, raw_factor) pairs. Returns human-readable
// diagnostics; empty means the dataset is sound.
std::vector<std::string> validate(const CodedDataset& ds);

struct Exclusion {
  std::string study_id;
  std::string raw_factor;
  int line = 0;
  std::string reason;
};

struct FactorGroup {
  Factor factor{};
  std::vector<StudyEffect> effects;
  long long n_total = 0;
};

struct MappedDataset {
  std::vector<FactorGroup> factors;  // descending k, ties by factor name
  std::vector<Exclusion> excluded;   // unmapped rows and min_k drops
  int studies = 0;                   // distinct studies among mapped effects
  int effects_total = 0;             // mapped effects
  long long n_total = 0;             // sum of n over mapped effects
};

// Applies the factor mapping: annotates each effect with its canonical
// factor or records it as excluded; factors with k < min_k are dropped and
// recorded. Never throws for exclusions.
MappedDataset apply_mapping(const CodedDataset& ds);

}  // namespace metacorr

#include "metacorr/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <stdexcept>

#include "metacorr/csv.hpp"

namespace metacorr {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t");
  size_t e = s.find_last_not_of(" \t");
  if (b == std::string_view::npos) return {};
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

int parse_int(const std::string& path, int line, const std::string& s,
              const char* col) {
  int v{};
  auto t = trim(s);
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    fail(path, line, std::string("column ") + col + ": expected integer, got '" + s + "'");
  return v;
}

double parse_real(const std::string& path, int line, const std::string& s,
                  const char* col) {
  auto t = trim(s);
  try {
    size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    fail(path, line, std::string("column ") + col + ": expected number, got '" + s + "'");
  }
}

const std::vector<std::string> kHeader = {
    "study_id", "first_author", "year",       "pub_type",
    "region",   "region_class", "n",          "male_pct",
    "raw_factor", "effect_value", "effect_metric"};

}  // namespace

FactorMapping load_mapping(const std::string& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw std::runtime_error(path + ": empty mapping file");
  if (rows[0].fields != std::vector<std::string>{"canonical_factor", "raw_name"})
    fail(path, rows[0].line, "expected header canonical_factor,raw_name");
  FactorMapping map;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.fields.size() != 2)
      fail(path, r.line, "expected 2 columns, got " + std::to_string(r.fields.size()));
    auto f = factor_from_string(trim(r.fields[0]));
    if (!f) fail(path, r.line, "unknown canonical factor '" + r.fields[0] + "'");
    std::string raw = lower(trim(r.fields[1]));
    if (raw.empty()) fail(path, r.line, "empty raw name");
    auto [it, inserted] = map.emplace(raw, *f);
    if (!inserted && it->second != *f)
      fail(path, r.line, "raw name '" + raw + "' mapped to two factors");
  }
  return map;
}

CodedDataset parse_dataset(const std::string& data_path,
                           const std::string& mapping_path, int min_k) {
  CodedDataset ds;
  ds.min_k = min_k;
  ds.mapping = load_mapping(mapping_path);

  auto rows = read_csv(data_path);
  if (rows.empty()) throw std::runtime_error(data_path + ": empty dataset file");
  if (rows[0].fields != kHeader)
    fail(data_path, rows[0].line, "unexpected header row");

  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.fields.size() != kHeader.size())
      fail(data_path, r.line,
           "expected " + std::to_string(kHeader.size()) + " columns, got " +
               std::to_string(r.fields.size()));
    StudyEffect e;
    e.study_id = trim(r.fields[0]);
    e.first_author = trim(r.fields[1]);
    e.year = parse_int(data_path, r.line, r.fields[2], "year");
    auto pt = pub_type_from_string(trim(r.fields[3]));
    if (!pt) fail(data_path, r.line, "unknown pub_type '" + r.fields[3] + "'");
    e.pub_type = *pt;
    e.region = trim(r.fields[4]);
    auto rc = region_class_from_string(trim(r.fields[5]));
    if (!rc) fail(data_path, r.line, "unknown region_class '" + r.fields[5] + "'");
    e.region_class = *rc;
    e.n = parse_int(data_path, r.line, r.fields[6], "n");
    e.male_pct = parse_real(data_path, r.line, r.fields[7], "male_pct");
    e.raw_factor = lower(trim(r.fields[8]));
    if (e.raw_factor.empty()) fail(data_path, r.line, "empty raw_factor");
    e.effect_value = parse_real(data_path, r.line, r.fields[9], "effect_value");
    auto em = effect_metric_from_string(trim(r.fields[10]));
    if (!em) fail(data_path, r.line, "unknown effect_metric '" + r.fields[10] + "'");
    e.effect_metric = *em;
    e.line = r.line;
    if (e.study_id.empty()) fail(data_path, r.line, "empty study_id");
    ds.effects.push_back(std::move(e));
  }
  return ds;
}

std::vector<std::string> validate(const CodedDataset& ds) {
  std::vector<std::string> problems;
  auto row_id = [](const StudyEffect& e) {
    return "line " + std::to_string(e.line) + " (" + e.study_id + ", " +
           e.raw_factor + ")";
  };
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : ds.effects) {
    if (e.n < 4)
      problems.push_back(row_id(e) + ": n = " + std::to_string(e.n) +
                         " leaves no degrees of freedom (need n >= 4)");
    if (e.male_pct < 0.0 || e.male_pct > 100.0)
      problems.push_back(row_id(e) + ": male_pct outside [0, 100]");
    if (e.effect_metric == EffectMetric::correlation_r &&
        !(e.effect_value > -1.0 && e.effect_value < 1.0))
      problems.push_back(row_id(e) + ": correlation outside (-1, 1)");
    if (e.effect_metric == EffectMetric::regression_beta) {
      double r = e.effect_value + (e.effect_value >= 0.0 ? 0.05 : 0.0);
      if (!(r > -1.0 && r < 1.0))
        problems.push_back(row_id(e) + ": converted correlation outside (-1, 1)");
    }
    if (!seen.emplace(e.study_id, e.raw_factor).second)
      problems.push_back(row_id(e) + ": duplicate (study_id, raw_factor)");
  }
  return problems;
}

MappedDataset apply_mapping(const CodedDataset& ds) {
  MappedDataset out;
  std::map<Factor, FactorGroup> groups;
  std::set<std::string> studies;
  for (const auto& e : ds.effects) {
    auto it = ds.mapping.find(e.raw_factor);
    if (it == ds.mapping.end()) {
      out.excluded.push_back({e.study_id, e.raw_factor, e.line,
                              "raw factor not in mapping"});
      continue;
    }
    auto& g = groups[it->second];
    g.factor = it->second;
    g.effects.push_back(e);
    g.n_total += e.n;
  }
  for (auto it = groups.begin(); it != groups.end();) {
    auto& g = it->second;
    if (static_cast<int>(g.effects.size()) < ds.min_k) {
      for (const auto& e : g.effects)
        out.excluded.push_back({e.study_id, e.raw_factor, e.line,
                                "factor below min_k"});
      it = groups.erase(it);
    } else {
      for (const auto& e : g.effects) {
        studies.insert(e.study_id);
        out.effects_total += 1;
        out.n_total += e.n;
      }
      ++it;
    }
  }
  out.studies = static_cast<int>(studies.size());
  for (auto& [f, g] : groups) out.factors.push_back(std::move(g));
  std::sort(out.factors.begin(), out.factors.end(),
            [](const FactorGroup& a, const FactorGroup& b) {
              if (a.effects.size() != b.effects.size())
                return a.effects.size() > b.effects.size();
              return to_string(a.factor) < to_string(b.factor);
            });
  return out;
}

}  // namespace metacorr

// metacorr: meta-analysis of correlation effect sizes from a coded study
// sheet. Subcommands: validate, analyze, compare.
//
// Exit codes: 0 success, 1 dataset validation failure, 2 analysis failure,
// 3 comparison mismatch.

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metacorr/csv.hpp"
#include "metacorr/dataset.hpp"
#include "metacorr/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitComparison = 3;

struct CommonOpts {
  std::string data;
  std::string mapping;
  int min_k = 3;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--data", o.data, "Coded effects CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--mapping", o.mapping, "Factor mapping CSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--min-k", o.min_k,
                  "Minimum effects per factor to analyze (default 3)")
      ->check(CLI::PositiveNumber);
}

// Parses and semantically validates the dataset. On failure prints
// diagnostics and returns nullopt; caller exits kExitValidation.
std::optional<metacorr::CodedDataset> load_checked(const CommonOpts& o) {
  metacorr::CodedDataset ds;
  try {
    ds = metacorr::parse_dataset(o.data, o.mapping, o.min_k);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return std::nullopt;
  }
  const std::vector<std::string> problems = metacorr::validate(ds);
  if (!problems.empty()) {
    for (const auto& p : problems) {
      std::fprintf(stderr, "validation error: %s\n", p.c_str());
    }
    std::fprintf(stderr, "validation failed with %zu error(s)\n",
                 problems.size());
    return std::nullopt;
  }
  return ds;
}

void print_exclusions(const metacorr::MappedDataset& mapped) {
  for (const auto& e : mapped.excluded) {
    std::fprintf(stderr, "warning: %s/%s (line %d): %s\n", e.study_id.c_str(),
                 e.raw_factor.c_str(), e.line, e.reason.c_str());
  }
}

int cmd_validate(const CommonOpts& o) {
  auto ds = load_checked(o);
  if (!ds) return kExitValidation;
  const metacorr::MappedDataset mapped = metacorr::apply_mapping(*ds);
  print_exclusions(mapped);
  std::printf("dataset OK: %d studies, %d effects, %zu factors, total N=%lld\n",
              mapped.studies, mapped.effects_total, mapped.factors.size(),
              mapped.n_total);
  for (const auto& g : mapped.factors) {
    std::printf("  %-24s k=%-3zu N=%lld\n",
                std::string(metacorr::to_string(g.factor)).c_str(),
                g.effects.size(), g.n_total);
  }
  return kExitOk;
}

struct AnalyzeOpts {
  CommonOpts common;
  std::string out = "out";
  std::string model = "auto";
  std::string nfs_variant = "two_tailed_196";
  std::string factor;
  std::vector<std::string> formats = {"json", "csv", "markdown"};
};

void add_analysis_settings(CLI::App* cmd, AnalyzeOpts& o) {
  cmd->add_option("--model", o.model,
                  "Pooling model: auto (Q-test rule), fixed, random")
      ->check(CLI::IsMember({"auto", "fixed", "random"}));
  cmd->add_option("--nfs-variant", o.nfs_variant,
                  "Fail-safe N critical value (default two_tailed_196)")
      ->check(CLI::IsMember({"two_tailed_196", "one_tailed_1645"}));
  cmd->add_option("--factor", o.factor,
                  "Restrict the analysis to one canonical factor");
}

std::optional<metacorr::Settings> build_settings(const AnalyzeOpts& o) {
  metacorr::Settings s;
  s.min_k = o.common.min_k;
  s.model = o.model;
  s.nfs_variant = o.nfs_variant == "one_tailed_1645"
                      ? metacorr::NfsVariant::one_tailed_1645
                      : metacorr::NfsVariant::two_tailed_196;
  if (!o.factor.empty()) {
    const auto f = metacorr::factor_from_string(o.factor);
    if (!f) {
      std::fprintf(stderr, "error: unknown factor '%s'\n", o.factor.c_str());
      return std::nullopt;
    }
    s.only_factor = *f;
  }
  return s;
}

// Shared by analyze and compare: full pipeline over the mapped dataset.
// Returns nullopt after printing; *exit_code is set to the proper failure
// code.
std::optional<metacorr::AnalysisReport> run_checked(const AnalyzeOpts& o,
                                                    int* exit_code) {
  auto ds = load_checked(o.common);
  if (!ds) {
    *exit_code = kExitValidation;
    return std::nullopt;
  }
  const auto settings = build_settings(o);
  if (!settings) {
    *exit_code = kExitValidation;
    return std::nullopt;
  }
  const metacorr::MappedDataset mapped = metacorr::apply_mapping(*ds);
  print_exclusions(mapped);
  try {
    return metacorr::run_pipeline(mapped, *settings);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "analysis error: %s\n", e.what());
    *exit_code = kExitAnalysis;
    return std::nullopt;
  }
}

int cmd_analyze(const AnalyzeOpts& o) {
  int code = kExitOk;
  const auto report = run_checked(o, &code);
  if (!report) return code;
  std::vector<std::string> written;
  try {
    written = metacorr::write_report_files(*report, o.out, o.formats);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "analysis error: %s\n", e.what());
    return kExitAnalysis;
  }
  for (const auto& p : written) std::printf("wrote %s\n", p.c_str());
  std::printf("analyzed %d effects across %zu factors\n", report->effects,
              report->per_factor.size());
  return kExitOk;
}

struct ReferenceRow {
  std::string table, factor, metric;
  double expected = 0.0;
  double abs_tol = 0.0;
  bool flagged = false;
};

// Reference format: table,factor,metric,expected,abs_tol,note. Rows whose
// note starts with "flagged:" document known-unreliable source cells and
// are skipped unless --strict.
std::vector<ReferenceRow> load_reference(const std::string& path) {
  const std::vector<metacorr::CsvRow> rows = metacorr::read_csv(path);
  if (rows.empty() ||
      rows.front().fields !=
          std::vector<std::string>{"table", "factor", "metric", "expected",
                                   "abs_tol", "note"}) {
    throw std::runtime_error(
        path + ": expected header table,factor,metric,expected,abs_tol,note");
  }
  std::vector<ReferenceRow> out;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.fields.size() != 6) {
      throw std::runtime_error(path + ":" + std::to_string(r.line) +
                               ": expected 6 fields, got " +
                               std::to_string(r.fields.size()));
    }
    ReferenceRow row;
    row.table = r.fields[0];
    row.factor = r.fields[1];
    row.metric = r.fields[2];
    try {
      row.expected = std::stod(r.fields[3]);
      row.abs_tol = std::stod(r.fields[4]);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(r.line) +
                               ": non-numeric expected/abs_tol");
    }
    row.flagged = r.fields[5].rfind("flagged:", 0) == 0;
    out.push_back(std::move(row));
  }
  return out;
}

int cmd_compare(const AnalyzeOpts& o, const std::string& reference,
                bool strict) {
  int code = kExitOk;
  const auto report = run_checked(o, &code);
  if (!report) return code;

  std::vector<ReferenceRow> ref;
  try {
    ref = load_reference(reference);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "analysis error: %s\n", e.what());
    return kExitAnalysis;
  }

  std::map<std::string, double> cells;
  for (const auto& c : metacorr::numeric_cells(*report)) {
    cells[c.table + "," + c.factor + "," + c.metric] = c.value;
  }

  int ok = 0, mismatched = 0, missing = 0, skipped = 0;
  for (const auto& row : ref) {
    if (row.flagged && !strict) {
      ++skipped;
      continue;
    }
    const std::string key = row.table + "," + row.factor + "," + row.metric;
    const auto it = cells.find(key);
    if (it == cells.end()) {
      std::printf("MISSING  %s: reference cell has no engine counterpart\n",
                  key.c_str());
      ++missing;
      continue;
    }
    const double diff = std::abs(it->second - row.expected);
    if (diff <= row.abs_tol + 1e-12) {
      ++ok;
    } else {
      std::printf(
          "MISMATCH %s: engine=%.6f expected=%.6f |diff|=%.6f tol=%.6f%s\n",
          key.c_str(), it->second, row.expected, diff, row.abs_tol,
          row.flagged ? " [flagged]" : "");
      ++mismatched;
    }
  }
  std::printf(
      "compared %d reference cell(s): %d within tolerance, %d mismatched, "
      "%d missing, %d flagged cell(s) skipped\n",
      ok + mismatched + missing, ok, mismatched, missing, skipped);
  return (mismatched == 0 && missing == 0) ? kExitOk : kExitComparison;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Meta-analysis of correlation effect sizes: Fisher-z pooling, "
      "heterogeneity, publication-bias diagnostics, and moderator analyses "
      "over a coded study sheet."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "metacorr 1.0.0");

  CommonOpts validate_opts;
  CLI::App* validate =
      app.add_subcommand("validate", "Check a coded dataset and its mapping");
  add_common(validate, validate_opts);

  AnalyzeOpts analyze_opts;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Run the full analysis and write reports");
  add_common(analyze, analyze_opts.common);
  add_analysis_settings(analyze, analyze_opts);
  analyze->add_option("--out", analyze_opts.out,
                      "Output directory (default ./out)");
  analyze
      ->add_option("--formats", analyze_opts.formats,
                   "Report formats: json,csv,markdown (default all)")
      ->delimiter(',');

  AnalyzeOpts compare_opts;
  std::string reference;
  bool strict = false;
  CLI::App* compare = app.add_subcommand(
      "compare", "Check engine output against a reference table");
  add_common(compare, compare_opts.common);
  add_analysis_settings(compare, compare_opts);
  compare->add_option("--reference", reference, "Reference cells CSV")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_flag("--strict", strict,
                    "Also gate cells whose note marks them flagged");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(validate_opts);
  if (analyze->parsed()) return cmd_analyze(analyze_opts);
  if (compare->parsed()) return cmd_compare(compare_opts, reference, strict);
  return kExitOk;
}

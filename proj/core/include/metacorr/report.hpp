#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metacorr/bias.hpp"
#include "metacorr/dataset.hpp"
#include "metacorr/moderators.hpp"
#include "metacorr/pooling.hpp"

namespace metacorr {

// Every configurable decision, echoed verbatim into the report so a run is
// self-describing and reproducible.
struct Settings {
  int min_k = 3;
  std::string model = "auto";  // auto | fixed | random
  NfsVariant nfs_variant = NfsVariant::two_tailed_196;
  std::string moderator = "male_pct";
  std::string tau2_estimator = "dersimonian_laird";  // fixed convention
  double ci_quantile = 1.96;                         // fixed convention
  std::optional<Factor> only_factor;
};

struct FactorSection {
  Factor factor{};
  PooledEstimate pooled;  // under the model actually used
  Model rule_model = Model::random;  // what the Q-test rule would pick
  bool rule_overridden = false;
  Magnitude magnitude = Magnitude::negligible;
  BiasDiagnostics bias;
  std::optional<SubgroupResult> subgroup;       // absent: single region class
  std::optional<MetaRegressionResult> metareg;  // absent: k < 3 or constant x
  std::vector<FunnelPoint> funnel;
};

struct AnalysisReport {
  int studies = 0;
  int effects = 0;
  long long n_total = 0;
  std::vector<Exclusion> exclusions;
  Settings settings;
  std::vector<FactorSection> per_factor;  // descending k, ties by factor name
};

// Pipeline per factor: bias -> heterogeneity -> pooling -> moderators.
// Throws std::runtime_error (annotated with the factor name) on module
// errors, and when no factor survives min_k.
AnalysisReport run_pipeline(const MappedDataset& ds, const Settings& s);

// One numeric cell of the long-format tables. Metric names are the shared
// vocabulary of report.csv and the compare reference format.
struct Cell {
  std::string table;   // t3 bias, t4 heterogeneity, t5 pooled,
                       // t6 region subgroups, t7 meta-regression
  std::string factor;
  std::string metric;
  double value = 0.0;
  bool integral = false;
};
std::vector<Cell> numeric_cells(const AnalysisReport& r);

std::string render_json(const AnalysisReport& r);      // full precision
std::string render_csv(const AnalysisReport& r);       // 3 decimals
std::string render_markdown(const AnalysisReport& r);  // 3 decimals

// Standalone SVG funnel plot: x = Fisher z, y = SE increasing downward,
// vertical reference line at pooled_z, pseudo-confidence guides at
// pooled_z +- 1.96 se. No external resources.
std::string funnel_svg(const std::vector<FunnelPoint>& points, double pooled_z,
                       const std::string& title);

// Ties round to the even neighbor (as seen by the binary double).
double round_half_even(double x, int digits);
// round_half_even at 3 decimals, "-0.000" normalized to "0.000".
std::string format_fixed3(double x);

// Writes report.json / report.csv / report.md (per formats: "json", "csv",
// "markdown"/"md") plus funnel_<factor>.svg per factor into out_dir.
// Returns the paths written. Byte-identical for identical inputs.
std::vector<std::string> write_report_files(
    const AnalysisReport& r, const std::string& out_dir,
    const std::vector<std::string>& formats);

}  // namespace metacorr

#include "metacorr/report.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace metacorr {

namespace {

std::string printf_str(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string int_str(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld", v);
  return buf;
}

Model resolve_model(const std::string& setting, Model rule) {
  if (setting == "auto") return rule;
  if (setting == "fixed") return Model::fixed;
  if (setting == "random") return Model::random;
  throw std::invalid_argument("model must be auto, fixed, or random, got '" +
                              setting + "'");
}

}  // namespace

double round_half_even(double x, int digits) {
  if (!std::isfinite(x)) return x;
  const double scale = std::pow(10.0, digits);
  // nearbyint honors the current rounding mode; the default FE_TONEAREST is
  // round-half-to-even. Ties are ties of the scaled double, so a value whose
  // decimal literal looks like a tie may already sit off-half in binary.
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(x * scale) / scale;
  std::fesetround(saved);
  return r;
}

std::string format_fixed3(double x) {
  double r = round_half_even(x, 3);
  if (r == 0.0) r = 0.0;  // normalize -0
  return printf_str("%.3f", r);
}

AnalysisReport run_pipeline(const MappedDataset& ds, const Settings& s) {
  // Validate the model setting up front so a typo fails before any work.
  (void)resolve_model(s.model, Model::random);

  AnalysisReport rep;
  rep.studies = ds.studies;
  rep.effects = ds.effects_total;
  rep.n_total = ds.n_total;
  rep.exclusions = ds.excluded;
  rep.settings = s;

  for (const auto& g : ds.factors) {
    if (s.only_factor && *s.only_factor != g.factor) continue;
    try {
      FactorSection sec;
      sec.factor = g.factor;
      const std::vector<NormalizedEffect> norm = normalize(g.effects);

      sec.bias = bias_diagnostics(norm, s.nfs_variant);

      const HeterogeneityStats het = heterogeneity(norm, /*permissive=*/true);
      sec.rule_model = auto_model(het);
      const Model used = resolve_model(s.model, sec.rule_model);
      sec.rule_overridden = used != sec.rule_model;
      sec.pooled = pool_effects(norm, used);
      sec.magnitude = classify_magnitude(sec.pooled.r_pooled);

      try {
        sec.subgroup = subgroup_analysis(norm);
      } catch (const std::invalid_argument&) {
        // single region class: no subgroup contrast to report
      }
      try {
        sec.metareg = meta_regression_male_pct(norm);
      } catch (const std::invalid_argument&) {
        // k < 3 or constant moderator: slope is not identified
      }

      sec.funnel = funnel_points(norm);
      rep.per_factor.push_back(std::move(sec));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string(to_string(g.factor)) + ": " +
                               e.what());
    } catch (const std::domain_error& e) {
      throw std::runtime_error(std::string(to_string(g.factor)) + ": " +
                               e.what());
    }
  }

  if (rep.per_factor.empty()) {
    if (s.only_factor) {
      throw std::runtime_error(
          std::string("factor ") + std::string(to_string(*s.only_factor)) +
          " has no effects after mapping and the min_k filter");
    }
    throw std::runtime_error("no factor meets min_k after mapping");
  }
  return rep;
}

std::vector<Cell> numeric_cells(const AnalysisReport& r) {
  std::vector<Cell> cells;
  auto put = [&cells](const std::string& table, const std::string& factor,
                      const std::string& metric, double value,
                      bool integral = false) {
    cells.push_back(Cell{table, factor, metric, value, integral});
  };

  for (const auto& sec : r.per_factor) {
    const std::string f(to_string(sec.factor));
    const auto& het = sec.pooled.het;
    const auto& eg = sec.bias.egger;

    put("t3", f, "nfs", static_cast<double>(sec.bias.nfs), true);
    put("t3", f, "nfs_threshold", static_cast<double>(sec.bias.nfs_threshold),
        true);
    put("t3", f, "egger_intercept", eg.intercept);
    put("t3", f, "egger_se", eg.se);
    put("t3", f, "egger_ci_low", eg.ci_low);
    put("t3", f, "egger_ci_high", eg.ci_high);
    put("t3", f, "egger_t", eg.t);
    put("t3", f, "egger_p", eg.p);

    put("t4", f, "k", sec.pooled.k, true);
    put("t4", f, "n", static_cast<double>(sec.pooled.n_total), true);
    put("t4", f, "q", het.q);
    put("t4", f, "p_q", het.p_q);
    put("t4", f, "i2", het.i2);
    put("t4", f, "tau2", het.tau2);

    put("t5", f, "r", sec.pooled.r_pooled);
    put("t5", f, "ci_low", sec.pooled.ci_low);
    put("t5", f, "ci_high", sec.pooled.ci_high);
    put("t5", f, "z", sec.pooled.z_stat);
    put("t5", f, "p", sec.pooled.p);

    if (sec.subgroup) {
      for (const auto& row : sec.subgroup->groups) {
        const std::string pre = row.label + "_";
        put("t6", f, pre + "k", row.pool.k, true);
        put("t6", f, pre + "n", static_cast<double>(row.pool.n_total), true);
        put("t6", f, pre + "r", row.pool.r_pooled);
        put("t6", f, pre + "ci_low", row.pool.ci_low);
        put("t6", f, pre + "ci_high", row.pool.ci_high);
        put("t6", f, pre + "z", row.pool.z_stat);
        put("t6", f, pre + "p", row.pool.p);
      }
      put("t6", f, "q_between", sec.subgroup->q_between);
      put("t6", f, "df_between", sec.subgroup->df_between, true);
      put("t6", f, "p_between", sec.subgroup->p_between);
    }

    if (sec.metareg) {
      const auto& m = *sec.metareg;
      put("t7", f, "slope", m.coefficient);
      put("t7", f, "se", m.se);
      put("t7", f, "ci_low", m.ci_low);
      put("t7", f, "ci_high", m.ci_high);
      put("t7", f, "z", m.z_stat);
      put("t7", f, "p", m.p);
      put("t7", f, "tau2_residual", m.tau2_residual);
      put("t7", f, "intercept", m.intercept);
    }
  }
  return cells;
}

namespace {

using nlohmann::json;

json pooled_json(const PooledEstimate& p) {
  return json{
      {"model", std::string(to_string(p.model))},
      {"k", p.k},
      {"n_total", p.n_total},
      {"z_pooled", p.z_pooled},
      {"se", p.se},
      {"r_pooled", p.r_pooled},
      {"ci_low", p.ci_low},
      {"ci_high", p.ci_high},
      {"z_stat", p.z_stat},
      {"p", p.p},
  };
}

}  // namespace

std::string render_json(const AnalysisReport& r) {
  json root;
  root["dataset_summary"] = {
      {"studies", r.studies},
      {"effects", r.effects},
      {"total_n", r.n_total},
      {"factors", r.per_factor.size()},
  };
  root["settings"] = {
      {"min_k", r.settings.min_k},
      {"model", r.settings.model},
      {"nfs_variant", std::string(to_string(r.settings.nfs_variant))},
      {"moderator", r.settings.moderator},
      {"tau2_estimator", r.settings.tau2_estimator},
      {"ci_quantile", r.settings.ci_quantile},
      {"factor_filter", r.settings.only_factor
                            ? json(std::string(to_string(*r.settings.only_factor)))
                            : json(nullptr)},
  };

  json excl = json::array();
  for (const auto& e : r.exclusions) {
    excl.push_back({
        {"study_id", e.study_id},
        {"raw_factor", e.raw_factor},
        {"line", e.line},
        {"reason", e.reason},
    });
  }
  root["exclusions"] = excl;

  json factors = json::array();
  for (const auto& sec : r.per_factor) {
    json jf;
    jf["factor"] = std::string(to_string(sec.factor));
    jf["pooled"] = pooled_json(sec.pooled);
    jf["pooled"]["rule_model"] = std::string(to_string(sec.rule_model));
    jf["pooled"]["rule_overridden"] = sec.rule_overridden;
    jf["magnitude"] = std::string(to_string(sec.magnitude));
    jf["heterogeneity"] = {
        {"q", sec.pooled.het.q},       {"df", sec.pooled.het.df},
        {"p_q", sec.pooled.het.p_q},   {"i2", sec.pooled.het.i2},
        {"tau2", sec.pooled.het.tau2},
    };
    jf["bias"] = {
        {"nfs", sec.bias.nfs},
        {"nfs_threshold", sec.bias.nfs_threshold},
        {"egger",
         {
             {"intercept", sec.bias.egger.intercept},
             {"se", sec.bias.egger.se},
             {"t", sec.bias.egger.t},
             {"p", sec.bias.egger.p},
             {"ci_low", sec.bias.egger.ci_low},
             {"ci_high", sec.bias.egger.ci_high},
             {"df", sec.bias.egger.df},
         }},
        {"verdict", std::string(to_string(sec.bias.verdict))},
    };

    if (sec.subgroup) {
      json groups = json::array();
      for (const auto& row : sec.subgroup->groups) {
        json jg = pooled_json(row.pool);
        jg["label"] = row.label;
        jg["tau2"] = row.pool.het.tau2;
        groups.push_back(std::move(jg));
      }
      jf["subgroup"] = {
          {"groups", std::move(groups)},
          {"q_between", sec.subgroup->q_between},
          {"df_between", sec.subgroup->df_between},
          {"p_between", sec.subgroup->p_between},
      };
    } else {
      jf["subgroup"] = nullptr;
    }

    if (sec.metareg) {
      const auto& m = *sec.metareg;
      jf["meta_regression"] = {
          {"moderator", m.moderator},     {"k", m.k},
          {"coefficient", m.coefficient}, {"intercept", m.intercept},
          {"se", m.se},                   {"ci_low", m.ci_low},
          {"ci_high", m.ci_high},         {"z_stat", m.z_stat},
          {"p", m.p},                     {"tau2_residual", m.tau2_residual},
      };
    } else {
      jf["meta_regression"] = nullptr;
    }

    json funnel = json::array();
    for (const auto& pt : sec.funnel) {
      funnel.push_back({
          {"study_id", pt.study_id},
          {"z", pt.z},
          {"se", pt.se},
      });
    }
    jf["funnel"] = std::move(funnel);
    factors.push_back(std::move(jf));
  }
  root["per_factor"] = std::move(factors);

  return root.dump(2) + "\n";
}

std::string render_csv(const AnalysisReport& r) {
  std::string out = "table,factor,metric,value\n";
  for (const Cell& c : numeric_cells(r)) {
    out += c.table;
    out += ',';
    out += c.factor;
    out += ',';
    out += c.metric;
    out += ',';
    out += c.integral ? int_str(std::llround(c.value)) : format_fixed3(c.value);
    out += '\n';
  }
  return out;
}

namespace {

std::string ci_str(double low, double high) {
  return "[" + format_fixed3(low) + ", " + format_fixed3(high) + "]";
}

void md_table(std::string& out, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  out += "|";
  for (const auto& h : header) out += " " + h + " |";
  out += "\n|";
  for (size_t i = 0; i < header.size(); ++i) out += " --- |";
  out += "\n";
  for (const auto& row : rows) {
    out += "|";
    for (const auto& cell : row) out += " " + cell + " |";
    out += "\n";
  }
  out += "\n";
}

}  // namespace

std::string render_markdown(const AnalysisReport& r) {
  std::string out;
  out += "# Meta-analysis report\n\n";

  out += "## Dataset\n\n";
  out += "- Studies: " + int_str(r.studies) + "\n";
  out += "- Effects analyzed: " + int_str(r.effects) + "\n";
  out += "- Total N: " + int_str(r.n_total) + "\n";
  out += "- Factors reported: " + int_str(static_cast<long long>(r.per_factor.size())) + "\n\n";

  if (!r.exclusions.empty()) {
    out += "### Excluded rows (" +
           int_str(static_cast<long long>(r.exclusions.size())) + ")\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : r.exclusions) {
      rows.push_back({e.study_id, e.raw_factor, int_str(e.line), e.reason});
    }
    md_table(out, {"Study", "Raw factor", "Line", "Reason"}, rows);
  }

  out += "## Settings\n\n";
  out += "- min_k: " + int_str(r.settings.min_k) + "\n";
  out += "- model: " + r.settings.model + "\n";
  out += "- nfs_variant: " + std::string(to_string(r.settings.nfs_variant)) + "\n";
  out += "- moderator: " + r.settings.moderator + "\n";
  out += "- tau2_estimator: " + r.settings.tau2_estimator + "\n";
  out += "- ci_quantile: " + format_fixed3(r.settings.ci_quantile) + "\n";
  out += "- factor_filter: " +
         (r.settings.only_factor
              ? std::string(to_string(*r.settings.only_factor))
              : std::string("none")) +
         "\n\n";

  out += "## Pooled effect sizes\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& sec : r.per_factor) {
      std::string model(to_string(sec.pooled.model));
      if (sec.rule_overridden) {
        model += " (rule: " + std::string(to_string(sec.rule_model)) + ")";
      }
      rows.push_back({std::string(to_string(sec.factor)), model,
                      int_str(sec.pooled.k), int_str(sec.pooled.n_total),
                      format_fixed3(sec.pooled.r_pooled),
                      ci_str(sec.pooled.ci_low, sec.pooled.ci_high),
                      format_fixed3(sec.pooled.z_stat),
                      format_fixed3(sec.pooled.p),
                      std::string(to_string(sec.magnitude))});
    }
    md_table(out,
             {"Factor", "Model", "k", "N", "r", "95% CI", "Z", "p",
              "Magnitude"},
             rows);
  }

  out += "## Heterogeneity\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& sec : r.per_factor) {
      const auto& h = sec.pooled.het;
      rows.push_back({std::string(to_string(sec.factor)), int_str(sec.pooled.k),
                      format_fixed3(h.q), int_str(h.df), format_fixed3(h.p_q),
                      format_fixed3(h.i2), format_fixed3(h.tau2)});
    }
    md_table(out, {"Factor", "k", "Q", "df", "p", "I2 (%)", "tau2"}, rows);
  }

  out += "## Publication bias\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& sec : r.per_factor) {
      const auto& b = sec.bias;
      rows.push_back({std::string(to_string(sec.factor)), int_str(b.nfs),
                      int_str(b.nfs_threshold),
                      format_fixed3(b.egger.intercept),
                      format_fixed3(b.egger.se),
                      ci_str(b.egger.ci_low, b.egger.ci_high),
                      format_fixed3(b.egger.t) + " (df=" + int_str(b.egger.df) + ")",
                      format_fixed3(b.egger.p),
                      std::string(to_string(b.verdict))});
    }
    md_table(out,
             {"Factor", "NFS", "5k+10", "Egger intercept", "SE", "95% CI",
              "t (df)", "p", "Verdict"},
             rows);
  }

  bool any_subgroup = false;
  for (const auto& sec : r.per_factor) any_subgroup |= sec.subgroup.has_value();
  if (any_subgroup) {
    out += "## Region subgroups\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& sec : r.per_factor) {
      if (!sec.subgroup) continue;
      for (const auto& g : sec.subgroup->groups) {
        rows.push_back({std::string(to_string(sec.factor)), g.label,
                        int_str(g.pool.k), int_str(g.pool.n_total),
                        format_fixed3(g.pool.r_pooled),
                        ci_str(g.pool.ci_low, g.pool.ci_high),
                        format_fixed3(g.pool.z_stat),
                        format_fixed3(g.pool.p)});
      }
    }
    md_table(out, {"Factor", "Group", "k", "N", "r", "95% CI", "Z", "p"}, rows);

    out += "### Between-group contrast\n\n";
    std::vector<std::vector<std::string>> qrows;
    for (const auto& sec : r.per_factor) {
      if (!sec.subgroup) continue;
      qrows.push_back({std::string(to_string(sec.factor)),
                       format_fixed3(sec.subgroup->q_between),
                       int_str(sec.subgroup->df_between),
                       format_fixed3(sec.subgroup->p_between)});
    }
    md_table(out, {"Factor", "Q_between", "df", "p"}, qrows);
  }

  bool any_metareg = false;
  for (const auto& sec : r.per_factor) any_metareg |= sec.metareg.has_value();
  if (any_metareg) {
    out += "## Meta-regression on " + r.settings.moderator + "\n\n";
    std::vector<std::vector<std::string>> rows;
    for (const auto& sec : r.per_factor) {
      if (!sec.metareg) continue;
      const auto& m = *sec.metareg;
      rows.push_back({std::string(to_string(sec.factor)), int_str(m.k),
                      format_fixed3(m.intercept), format_fixed3(m.coefficient),
                      format_fixed3(m.se), ci_str(m.ci_low, m.ci_high),
                      format_fixed3(m.z_stat), format_fixed3(m.p),
                      format_fixed3(m.tau2_residual)});
    }
    md_table(out,
             {"Factor", "k", "Intercept", "Slope", "SE", "95% CI", "Z", "p",
              "Residual tau2"},
             rows);
  }

  return out;
}

namespace {

// Pixel coordinates are emitted at fixed precision so identical inputs give
// byte-identical documents.
std::string px(double v) { return printf_str("%.2f", v); }

void svg_line(std::string& out, double x1, double y1, double x2, double y2,
              const std::string& style) {
  out += "  <line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) +
         "\" y2=\"" + px(y2) + "\" " + style + "/>\n";
}

void svg_text(std::string& out, double x, double y, const std::string& anchor,
              const std::string& extra, const std::string& content) {
  out += "  <text x=\"" + px(x) + "\" y=\"" + px(y) +
         "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"" +
         anchor + "\"" + (extra.empty() ? "" : " " + extra) + ">" + content +
         "</text>\n";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string funnel_svg(const std::vector<FunnelPoint>& points, double pooled_z,
                       const std::string& title) {
  constexpr double kW = 640.0, kH = 480.0;
  constexpr double kL = 70.0, kR = 24.0, kT = 34.0, kB = 54.0;
  const double plot_w = kW - kL - kR;
  const double plot_h = kH - kT - kB;

  double se_max = 0.0;
  for (const auto& p : points) se_max = std::max(se_max, p.se);
  if (se_max <= 0.0) se_max = 1.0;
  const double y_max = se_max * 1.08;

  double x_min = pooled_z - 1.96 * y_max;
  double x_max = pooled_z + 1.96 * y_max;
  for (const auto& p : points) {
    x_min = std::min(x_min, p.z);
    x_max = std::max(x_max, p.z);
  }
  const double x_pad = 0.06 * (x_max - x_min);
  x_min -= x_pad;
  x_max += x_pad;

  auto X = [&](double z) { return kL + (z - x_min) / (x_max - x_min) * plot_w; };
  auto Y = [&](double se) { return kT + se / y_max * plot_h; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" "
         "height=\"480\" viewBox=\"0 0 640 480\">\n";
  out += "  <title>" + xml_escape(title) + "</title>\n";
  out += "  <rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" "
         "fill=\"#ffffff\"/>\n";

  // Plot frame.
  out += "  <rect x=\"" + px(kL) + "\" y=\"" + px(kT) + "\" width=\"" +
         px(plot_w) + "\" height=\"" + px(plot_h) +
         "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  // Pseudo-confidence guides from the apex (pooled_z, se=0).
  const std::string guide =
      "stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"5,4\"";
  svg_line(out, X(pooled_z - 1.96 * y_max), Y(y_max), X(pooled_z), Y(0.0),
           guide);
  svg_line(out, X(pooled_z + 1.96 * y_max), Y(y_max), X(pooled_z), Y(0.0),
           guide);

  // Vertical reference at the pooled estimate.
  svg_line(out, X(pooled_z), Y(0.0), X(pooled_z), Y(y_max),
           "stroke=\"#c0392b\" stroke-width=\"1.5\"");

  // Axis ticks.
  for (int i = 0; i <= 4; ++i) {
    const double z = x_min + (x_max - x_min) * i / 4.0;
    svg_line(out, X(z), kT + plot_h, X(z), kT + plot_h + 5,
             "stroke=\"#444444\" stroke-width=\"1\"");
    svg_text(out, X(z), kT + plot_h + 19, "middle", "", printf_str("%.2f", z));
  }
  for (int i = 0; i <= 4; ++i) {
    const double se = y_max * i / 4.0;
    svg_line(out, kL - 5, Y(se), kL, Y(se),
             "stroke=\"#444444\" stroke-width=\"1\"");
    svg_text(out, kL - 8, Y(se) + 4, "end", "", printf_str("%.3f", se));
  }

  // Axis labels and title.
  svg_text(out, kL + plot_w / 2.0, kH - 14, "middle", "", "Fisher z");
  svg_text(out, 16, kT + plot_h / 2.0, "middle",
           "transform=\"rotate(-90 16 " + px(kT + plot_h / 2.0) + ")\"",
           "Standard error");
  svg_text(out, kL + plot_w / 2.0, 20, "middle", "font-weight=\"bold\"",
           xml_escape(title));

  // Study points.
  for (const auto& p : points) {
    out += "  <circle cx=\"" + px(X(p.z)) + "\" cy=\"" + px(Y(p.se)) +
           "\" r=\"3.5\" fill=\"#2b6cb0\" fill-opacity=\"0.85\" "
           "stroke=\"#1a365d\" stroke-width=\"0.6\">\n    <title>" +
           xml_escape(p.study_id) + "</title>\n  </circle>\n";
  }

  out += "</svg>\n";
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  f << body;
  f.close();
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::vector<std::string> write_report_files(
    const AnalysisReport& r, const std::string& out_dir,
    const std::vector<std::string>& formats) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  bool want_json = false, want_csv = false, want_md = false;
  for (const auto& f : formats) {
    if (f == "json") {
      want_json = true;
    } else if (f == "csv") {
      want_csv = true;
    } else if (f == "markdown" || f == "md") {
      want_md = true;
    } else {
      throw std::invalid_argument("unknown report format '" + f +
                                  "' (expected json, csv, or markdown)");
    }
  }

  std::vector<std::string> written;
  auto emit = [&](const fs::path& p, const std::string& body) {
    write_file(p, body);
    written.push_back(p.string());
  };

  if (want_json) emit(dir / "report.json", render_json(r));
  if (want_csv) emit(dir / "report.csv", render_csv(r));
  if (want_md) emit(dir / "report.md", render_markdown(r));

  for (const auto& sec : r.per_factor) {
    const std::string name(to_string(sec.factor));
    emit(dir / ("funnel_" + name + ".svg"),
         funnel_svg(sec.funnel, sec.pooled.z_pooled, name + " funnel plot"));
  }
  return written;
}

}  // namespace metacorr

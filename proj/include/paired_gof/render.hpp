#ifndef PAIRED_GOF_RENDER_HPP
#define PAIRED_GOF_RENDER_HPP

#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "paired_gof/estimation.hpp"
#include "paired_gof/gof.hpp"
#include "paired_gof/selection.hpp"
#include "paired_gof/simulation.hpp"

namespace paired_gof {

enum class OutputFormat { Json, Table };

inline std::string format_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
  return buf;
}

namespace detail {

inline std::string render_columns(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths;
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c >= widths.size()) widths.resize(c + 1, 0);
      widths[c] = std::max(widths[c], row[c].size());
    }
  std::ostringstream out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << "  ";
      out << std::left << std::setw(int(widths[c])) << row[c];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace detail

inline nlohmann::json fit_to_json(const FitResult& fit, const FrequencyTable& table) {
  nlohmann::json j;
  j["model"] = model_name(fit.model);
  j["pi"] = fit.params.pis;
  if (fit.params.kappa) j["kappa"] = *fit.params.kappa;
  j["loglik"] = fit.loglik;
  j["aic"] = aic(fit, table);
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["boundary"] = fit.boundary;
  return j;
}

inline std::string render_fits(const std::vector<FitResult>& fits,
                               const FrequencyTable& table, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& fit : fits) arr.push_back(fit_to_json(fit, table));
    return arr.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"model", "pi", "kappa", "loglik", "aic", "converged"});
  for (const auto& fit : fits) {
    std::string pis;
    for (std::size_t i = 0; i < fit.params.pis.size(); ++i) {
      if (i) pis += ",";
      pis += format_fixed(fit.params.pis[i], 6);
    }
    rows.push_back({model_name(fit.model), pis,
                    fit.params.kappa ? format_fixed(*fit.params.kappa, 6) : "-",
                    format_fixed(fit.loglik, 4), format_fixed(aic(fit, table), 4),
                    fit.converged ? "yes" : "no"});
  }
  return detail::render_columns(rows);
}

inline nlohmann::json gof_to_json(const GofResult& gr) {
  nlohmann::json j;
  j["method"] = method_name(gr.method);
  j["statistic"] = gr.statistic;
  if (gr.dof) j["dof"] = *gr.dof;
  j["p_value"] = gr.p_value;
  if (gr.n_boot) j["n_boot"] = *gr.n_boot;
  if (gr.n_extreme) j["n_extreme"] = *gr.n_extreme;
  if (gr.failed_replicates) j["failed_replicates"] = *gr.failed_replicates;
  if (gr.ties) j["ties"] = *gr.ties;
  return j;
}

struct GofRow {
  ModelKind model;
  std::vector<GofResult> results;
};

inline std::string render_gof(const std::vector<GofRow>& rows_in, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows_in) {
      nlohmann::json j;
      j["model"] = model_name(row.model);
      j["results"] = nlohmann::json::array();
      for (const auto& gr : row.results) j["results"].push_back(gof_to_json(gr));
      arr.push_back(j);
    }
    return arr.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"model", "method", "statistic", "dof", "p_value"});
  for (const auto& row : rows_in)
    for (const auto& gr : row.results)
      rows.push_back({model_name(row.model), method_name(gr.method),
                      format_fixed(gr.statistic, 4),
                      gr.dof ? std::to_string(*gr.dof) : "-",
                      format_fixed(gr.p_value, 4)});
  return detail::render_columns(rows);
}

inline std::string render_selection(const SelectionReport& report, OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::json j;
    j["models"] = nlohmann::json::array();
    for (const auto& assessment : report.models) {
      nlohmann::json m;
      m["name"] = model_name(assessment.model);
      m["pvalues"] = nlohmann::json::object();
      for (const auto& gr : assessment.gof) m["pvalues"][method_name(gr.method)] = gr.p_value;
      m["aic"] = assessment.aic;
      m["pass"] = assessment.pass;
      j["models"].push_back(m);
    }
    if (report.best)
      j["best"] = model_name(*report.best);
    else
      j["best"] = nullptr;
    if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
    return j.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"model"};
  if (!report.models.empty())
    for (const auto& gr : report.models.front().gof)
      header.push_back(std::string("p(") + method_name(gr.method) + ")");
  header.push_back("aic");
  header.push_back("pass");
  rows.push_back(header);
  for (const auto& assessment : report.models) {
    std::vector<std::string> row = {model_name(assessment.model)};
    for (const auto& gr : assessment.gof) row.push_back(format_fixed(gr.p_value, 4));
    row.push_back(format_fixed(assessment.aic, 4));
    row.push_back(assessment.pass ? "yes" : "no");
    rows.push_back(row);
  }
  std::string out = detail::render_columns(rows);
  out += report.best ? std::string("best: ") + model_name(*report.best)
                     : "best: none (" + report.diagnostic + ")";
  out += '\n';
  return out;
}

inline nlohmann::json rate_report_to_json(const RateReport& report) {
  nlohmann::json j;
  j["label"] = report.label;
  j["n_rep"] = report.n_rep;
  j["failed_replicates"] = report.failed_replicates;
  j["methods"] = nlohmann::json::array();
  for (const auto& mr : report.rates) {
    nlohmann::json m;
    m["method"] = method_name(mr.method);
    m["rate"] = mr.rate;
    m["std_error"] = mr.std_error;
    m["rejections"] = mr.rejections;
    m["class"] = rate_class_name(mr.classification);
    j["methods"].push_back(m);
  }
  return j;
}

inline std::string render_rate_reports(const std::vector<RateReport>& reports,
                                       OutputFormat format) {
  if (format == OutputFormat::Json) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& report : reports) arr.push_back(rate_report_to_json(report));
    return arr.dump(2) + "\n";
  }
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"scenario", "method", "rate%", "class"});
  for (const auto& report : reports)
    for (const auto& mr : report.rates)
      rows.push_back({report.label.empty() ? "(unnamed)" : report.label,
                      method_name(mr.method), format_fixed(100.0 * mr.rate, 2),
                      rate_class_name(mr.classification)});
  return detail::render_columns(rows);
}

/// Scenario-grid JSON: an array of objects, each with
///   model (string), pis (array), kappas (array, 1 or g entries),
///   m_plus, n_plus, alpha?, n_rep?, methods (array of method names),
///   fitted_model?, n_boot?, label?
inline std::vector<ScenarioConfig> parse_scenario_grid(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("scenario grid: ") + e.what());
  }
  if (!j.is_array()) throw invalid_input("scenario grid: top level must be an array");
  std::vector<ScenarioConfig> configs;
  for (const auto& item : j) {
    if (!item.is_object()) throw invalid_input("scenario grid: entries must be objects");
    ScenarioConfig config;
    const auto model = model_from_name(item.value("model", std::string()));
    if (!model) throw invalid_input("scenario grid: unknown model");
    config.model = *model;
    if (!item.contains("pis") || !item["pis"].is_array() ||
        !item.contains("kappas") || !item["kappas"].is_array())
      throw invalid_input("scenario grid: pis and kappas arrays required");
    config.pis = item["pis"].get<std::vector<double>>();
    config.kappas = item["kappas"].get<std::vector<double>>();
    config.m_plus = item.value("m_plus", config.m_plus);
    config.n_plus = item.value("n_plus", config.n_plus);
    config.alpha = item.value("alpha", config.alpha);
    config.n_rep = item.value("n_rep", config.n_rep);
    config.boot.n_boot = item.value("n_boot", config.boot.n_boot);
    config.label = item.value("label", std::string());
    if (item.contains("fitted_model")) {
      const auto fitted = model_from_name(item["fitted_model"].get<std::string>());
      if (!fitted) throw invalid_input("scenario grid: unknown fitted_model");
      config.fitted_model = *fitted;
    }
    if (item.contains("methods")) {
      config.methods.clear();
      for (const auto& name : item["methods"]) {
        const auto method = method_from_name(name.get<std::string>());
        if (!method) throw invalid_input("scenario grid: unknown method");
        config.methods.push_back(*method);
      }
    }
    config.check();
    configs.push_back(std::move(config));
  }
  return configs;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_RENDER_HPP

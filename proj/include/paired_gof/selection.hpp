#ifndef PAIRED_GOF_SELECTION_HPP
#define PAIRED_GOF_SELECTION_HPP

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "paired_gof/bootstrap.hpp"
#include "paired_gof/estimation.hpp"
#include "paired_gof/gof.hpp"
#include "paired_gof/models.hpp"

namespace paired_gof {

/// Free-parameter count entering the AIC. The reference tables use k = g+1
/// uniformly for the five candidate models; the saturated model counts its
/// free cells.
inline int aic_param_count(ModelKind model, const FrequencyTable& table) {
  if (model == ModelKind::Saturated) return count_free_cells(table);
  return static_cast<int>(table.g()) + 1;
}

/// AIC = 2k - 2 * (kernel log-likelihood); the multinomial-coefficient
/// constant is omitted on both sides of the reference tables.
inline double aic(const FitResult& fit, const FrequencyTable& table) {
  if (!std::isfinite(fit.loglik)) throw invalid_input("aic: non-finite log-likelihood");
  return 2.0 * aic_param_count(fit.model, table) - 2.0 * fit.loglik;
}

struct ModelAssessment {
  ModelKind model = ModelKind::Independence;
  FitResult fit;
  std::vector<GofResult> gof;  // one per requested method, in request order
  double aic = 0.0;
  bool pass = false;
};

struct SelectionReport {
  std::vector<ModelAssessment> models;
  std::optional<ModelKind> best;
  std::string diagnostic;
};

struct SelectOptions {
  double threshold = 0.05;
  FitOptions fit;
  BootstrapOptions boot;
};

/// Screens each candidate by the requested GOF methods at `threshold`, then
/// picks the minimum-AIC passing model. Ties break toward fewer parameters,
/// then candidate order.
inline SelectionReport select_model(const FrequencyTable& table,
                                    const std::vector<ModelKind>& candidates,
                                    const std::vector<GofMethod>& methods,
                                    const SelectOptions& opts = {}) {
  if (candidates.empty()) throw invalid_input("select_model: no candidates");
  if (!(opts.threshold > 0 && opts.threshold < 1))
    throw invalid_input("select_model: threshold outside (0,1)");
  SelectionReport report;
  for (const auto model : candidates) {
    ModelAssessment assessment;
    assessment.model = model;
    assessment.fit = fit(model, table, opts.fit);
    assessment.aic = aic(assessment.fit, table);
    assessment.pass = true;
    for (const auto method : methods) {
      GofResult gr = is_bootstrap(method)
                         ? bootstrap_gof(model, table, method, opts.boot, opts.fit)
                         : asymptotic_gof_for_fit(assessment.fit, table, method);
      if (!(gr.p_value > opts.threshold)) assessment.pass = false;
      assessment.gof.push_back(gr);
    }
    report.models.push_back(std::move(assessment));
  }
  double best_aic = std::numeric_limits<double>::infinity();
  int best_k = std::numeric_limits<int>::max();
  for (const auto& assessment : report.models) {
    if (!assessment.pass) continue;
    const int k = aic_param_count(assessment.model, table);
    const bool better = assessment.aic < best_aic ||
                        (assessment.aic == best_aic && k < best_k);
    if (better) {
      best_aic = assessment.aic;
      best_k = k;
      report.best = assessment.model;
    }
  }
  if (!report.best) report.diagnostic = "no candidate passed the goodness-of-fit screen";
  return report;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_SELECTION_HPP

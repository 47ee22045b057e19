#ifndef PAIRED_GOF_GOF_HPP
#define PAIRED_GOF_GOF_HPP

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "paired_gof/estimation.hpp"
#include "paired_gof/models.hpp"
#include "paired_gof/special.hpp"
#include "paired_gof/types.hpp"

namespace paired_gof {

enum class GofMethod { G2, X2, X2adj, B1, B2, B3 };

inline bool is_bootstrap(GofMethod method) {
  return method == GofMethod::B1 || method == GofMethod::B2 || method == GofMethod::B3;
}

inline const char* method_name(GofMethod method) {
  switch (method) {
    case GofMethod::G2: return "g2";
    case GofMethod::X2: return "x2";
    case GofMethod::X2adj: return "x2adj";
    case GofMethod::B1: return "b1";
    case GofMethod::B2: return "b2";
    case GofMethod::B3: return "b3";
  }
  return "?";
}

inline std::optional<GofMethod> method_from_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (name == "g2") return GofMethod::G2;
  if (name == "x2") return GofMethod::X2;
  if (name == "x2adj" || name == "x2_adj") return GofMethod::X2adj;
  if (name == "b1") return GofMethod::B1;
  if (name == "b2") return GofMethod::B2;
  if (name == "b3") return GofMethod::B3;
  return std::nullopt;
}

inline const std::array<GofMethod, 6> kAllMethods = {
    GofMethod::G2, GofMethod::X2, GofMethod::X2adj,
    GofMethod::B1, GofMethod::B2, GofMethod::B3};

struct GofResult {
  GofMethod method = GofMethod::G2;
  double statistic = 0.0;  // observed-table probability for B3
  std::optional<int> dof;
  double p_value = 0.0;
  std::optional<long> n_boot;
  std::optional<long> n_extreme;
  std::optional<long> failed_replicates;
  std::optional<long> ties;
};

/// Expected cell counts (m+ p0, m+ p1, m+ p2, n+ (1-pi), n+ pi) per group.
using ExpectedCells = std::array<double, 5>;

inline std::vector<ExpectedCells> expected_counts(const FitResult& fit,
                                                  const FrequencyTable& table) {
  std::vector<ExpectedCells> expected;
  expected.reserve(table.g());
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    const double mp = double(grp.m_plus());
    const double np = double(grp.n_plus());
    ExpectedCells cells{0, 0, 0, 0, 0};
    if (mp > 0) {
      JointProbs p;
      if (fit.model == ModelKind::Saturated)
        p = fit.params.sat_probs[i];
      else
        p = joint_probs(fit.model, fit.params.pis[i], fit.params.kappa.value_or(0.0));
      cells[0] = mp * p.p0;
      cells[1] = mp * p.p1;
      cells[2] = mp * p.p2;
    }
    if (np > 0) {
      const double pi = fit.params.pis[i];
      cells[3] = np * (1 - pi);
      cells[4] = np * pi;
    }
    expected.push_back(cells);
  }
  return expected;
}

/// G2 / X2 / X2adj over all cells of all groups. Cells with expected = 0 and
/// observed = 0 contribute nothing; observed > 0 against expected = 0 gives
/// +inf. X2adj applies the half-continuity correction exactly as defined,
/// with no clamp for small deviations.
inline double gof_statistic(GofMethod method, const FrequencyTable& observed,
                            const std::vector<ExpectedCells>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.g(); ++i) {
    const auto& grp = observed.groups[i];
    const double obs[5] = {double(grp.m0), double(grp.m1), double(grp.m2),
                           double(grp.n0), double(grp.n1)};
    for (int c = 0; c < 5; ++c) {
      const double o = obs[c];
      const double e = expected[i][c];
      if (e == 0.0 && o == 0.0) continue;
      if (e == 0.0) return std::numeric_limits<double>::infinity();
      switch (method) {
        case GofMethod::G2:
          if (o > 0.0) stat += 2.0 * o * std::log(o / e);
          break;
        case GofMethod::X2:
          stat += (o - e) * (o - e) / e;
          break;
        case GofMethod::X2adj: {
          const double d = std::fabs(o - e) - 0.5;
          stat += d * d / e;
          break;
        }
        default:
          throw std::invalid_argument("gof_statistic: bootstrap method");
      }
    }
  }
  return stat;
}

/// Free parameters of the fitted model, as counted for the chi-square DOF.
inline int dof_param_count(ModelKind model, const FrequencyTable& table) {
  const int g = static_cast<int>(table.g());
  switch (model) {
    case ModelKind::Independence: return g;
    case ModelKind::Saturated: return count_free_cells(table);
    default: return g + 1;
  }
}

/// DOF of the asymptotic chi-square reference: free saturated cells minus
/// model parameters. Reduces to 2g-1 for full combined tables and g-1 for
/// purely bilateral tables under the one-nuisance models.
inline int degrees_of_freedom(ModelKind model, const FrequencyTable& table) {
  if (model == ModelKind::Saturated)
    throw std::invalid_argument("degrees_of_freedom: saturated model");
  const int dof = count_free_cells(table) - dof_param_count(model, table);
  if (dof < 1)
    throw invalid_input("saturated or over-parameterized; asymptotic test undefined");
  return dof;
}

/// Pr((m,n) | fitted parameters): product of multinomial and binomial pmfs,
/// computed in log space.
inline double log_observed_table_probability(const FitResult& fit,
                                             const FrequencyTable& table) {
  double logp = 0.0;
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    if (grp.m_plus() > 0) {
      JointProbs p;
      if (fit.model == ModelKind::Saturated)
        p = fit.params.sat_probs[i];
      else
        p = joint_probs(fit.model, fit.params.pis[i], fit.params.kappa.value_or(0.0));
      logp += log_multinomial_coef(grp.m_plus(), grp.m0, grp.m1, grp.m2) +
              xlogy(grp.m0, p.p0) + xlogy(grp.m1, p.p1) + xlogy(grp.m2, p.p2);
    }
    if (grp.n_plus() > 0) {
      const double pi = fit.params.pis[i];
      logp += log_multinomial_coef(grp.n_plus(), grp.n0, grp.n1) +
              xlogy(grp.n0, 1 - pi) + xlogy(grp.n1, pi);
    }
  }
  return logp;
}

inline double observed_table_probability(const FitResult& fit,
                                         const FrequencyTable& table) {
  return std::exp(log_observed_table_probability(fit, table));
}

inline GofResult asymptotic_gof_for_fit(const FitResult& fitted,
                                        const FrequencyTable& table, GofMethod method) {
  GofResult result;
  result.method = method;
  result.statistic = gof_statistic(method, table, expected_counts(fitted, table));
  result.dof = degrees_of_freedom(fitted.model, table);
  result.p_value = chi_square_sf(result.statistic, *result.dof);
  return result;
}

/// Fits the model and runs one asymptotic test.
inline GofResult asymptotic_gof(ModelKind model, const FrequencyTable& table,
                                GofMethod method, const FitOptions& opts = {}) {
  if (is_bootstrap(method))
    throw std::invalid_argument("asymptotic_gof: bootstrap method");
  const auto fitted = fit(model, table, opts);
  if (!fitted.converged) throw invalid_input("fit did not converge");
  return asymptotic_gof_for_fit(fitted, table, method);
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_GOF_HPP

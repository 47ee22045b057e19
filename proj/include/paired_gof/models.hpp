#ifndef PAIRED_GOF_MODELS_HPP
#define PAIRED_GOF_MODELS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paired_gof/special.hpp"
#include "paired_gof/types.hpp"

namespace paired_gof {

enum class ModelKind { Independence, Rosner, Donner, Dallal, ClaytonCopula, Saturated };

inline bool has_nuisance(ModelKind model) {
  return model == ModelKind::Rosner || model == ModelKind::Donner ||
         model == ModelKind::Dallal || model == ModelKind::ClaytonCopula;
}

inline const char* model_name(ModelKind model) {
  switch (model) {
    case ModelKind::Independence: return "independence";
    case ModelKind::Rosner: return "rosner";
    case ModelKind::Donner: return "donner";
    case ModelKind::Dallal: return "dallal";
    case ModelKind::ClaytonCopula: return "clayton";
    case ModelKind::Saturated: return "saturated";
  }
  return "?";
}

inline std::optional<ModelKind> model_from_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (name == "independence" || name == "indep") return ModelKind::Independence;
  if (name == "rosner") return ModelKind::Rosner;
  if (name == "donner") return ModelKind::Donner;
  if (name == "dallal") return ModelKind::Dallal;
  if (name == "clayton" || name == "clayton-copula") return ModelKind::ClaytonCopula;
  if (name == "saturated") return ModelKind::Saturated;
  return std::nullopt;
}

/// Joint probabilities of 0/1/2 responses for one group's bilateral subjects.
struct JointProbs {
  double p0 = 0, p1 = 0, p2 = 0;
};

/// Admissible interval for the nuisance parameter.
struct NuisanceInterval {
  double lo = 0, hi = 0;
  bool lo_open = false, hi_open = false;

  bool contains(double x, double slack = 0.0) const {
    if (x < lo - slack || x > hi + slack) return false;
    if (lo_open && x <= lo - slack) return false;
    if (hi_open && x >= hi + slack) return false;
    return true;
  }
  /// x clamped to lie inside the interval, margin away from open/abs ends.
  double clamp_interior(double x, double margin = 1e-9) const {
    const double a = lo_open ? lo + margin : lo;
    const double b = hi_open ? hi - margin : hi;
    return std::min(std::max(x, a), b);
  }
};

/// Marginal probabilities plus the optional nuisance parameter. For the
/// saturated model, per-group cell probabilities are carried directly and
/// entries without data are NaN.
struct ParamVector {
  std::vector<double> pis;
  std::optional<double> kappa;
  std::vector<JointProbs> sat_probs;  // saturated only
};

/// Numeric cap for the Clayton dependence parameter; beyond this the copula
/// is indistinguishable from comonotone at double precision.
inline constexpr double kClaytonThetaMax = 500.0;

/// Admissible region of the nuisance parameter given the current marginals.
inline NuisanceInterval nuisance_domain(ModelKind model, const std::vector<double>& pis) {
  if (!has_nuisance(model)) throw std::invalid_argument("no nuisance parameter");
  double a = 0.0;
  for (double pi : pis) a = std::max(a, pi);
  switch (model) {
    case ModelKind::Rosner:
      if (a <= 0.5) return {0.0, 1.0 / a, true, false};
      return {(2.0 - 1.0 / a) / a, 1.0 / a, false, false};
    case ModelKind::Dallal:
      if (a <= 0.5) return {0.0, 1.0, false, false};
      return {2.0 - 1.0 / a, 1.0, false, false};
    case ModelKind::Donner: {
      double lo = -1.0;
      for (double pi : pis)
        lo = std::max(lo, std::max(-pi / (1.0 - pi), -(1.0 - pi) / pi));
      return {lo, 1.0, false, false};
    }
    case ModelKind::ClaytonCopula:
      return {0.0, kClaytonThetaMax, true, false};
    default:
      throw std::invalid_argument("no nuisance parameter");
  }
}

namespace detail {

// Clayton diagonal C(u,u) with u = 1-pi, evaluated in log space so that
// u^{-theta} never overflows. Returns C and, on request, d/dtheta pieces.
struct ClaytonDiag {
  double C;        // C_theta(u,u)
  double logA;     // log(2 u^{-theta} - 1)
  double D;        // 2 - u^theta
  double L;        // log u
};

inline ClaytonDiag clayton_diag(double pi, double theta) {
  const double u = 1.0 - pi;
  const double L = std::log(u);
  const double t = -theta * L;  // >= 0
  const double emt = std::exp(-t);
  const double D = 2.0 - emt;
  const double logA = t + std::log(D);
  const double C = std::exp(-logA / theta);
  return {C, logA, D, L};
}

// d/dtheta and d2/dtheta2 of log C_theta(u,u).
inline void clayton_dlogC_dtheta(const ClaytonDiag& cd, double theta, double& d1,
                                 double& d2) {
  const double L = cd.L, D = cd.D, logA = cd.logA;
  const double emt = 2.0 - D;  // e^{-t} = u^theta
  d1 = logA / (theta * theta) + 2.0 * L / (theta * D);
  d2 = -2.0 * logA / (theta * theta * theta) - 4.0 * L / (theta * theta * D) +
       2.0 * L * L * emt / (theta * D * D);
}

// dC/dpi for the Clayton diagonal: -2 A^{-(1+theta)/theta} u^{-1-theta}.
inline double clayton_dC_dpi(const ClaytonDiag& cd, double theta) {
  return -2.0 * std::exp(-(1.0 + theta) * (cd.logA / theta + cd.L));
}

}  // namespace detail

/// (p0,p1,p2) for one group under the given model and nuisance value.
inline JointProbs joint_probs(ModelKind model, double pi, double kappa) {
  if (model == ModelKind::Saturated)
    throw std::invalid_argument("joint_probs: saturated model has no parametric form");
  if (!(pi > 0.0 && pi < 1.0)) throw std::domain_error("pi must lie in (0,1)");
  JointProbs p;
  switch (model) {
    case ModelKind::Independence:
      p = {(1 - pi) * (1 - pi), 2 * pi * (1 - pi), pi * pi};
      break;
    case ModelKind::Rosner:
      p = {1 - 2 * pi + kappa * pi * pi, 2 * pi * (1 - kappa * pi), kappa * pi * pi};
      break;
    case ModelKind::Donner:
      p = {(1 - pi) * (1 - pi + pi * kappa), 2 * pi * (1 - pi) * (1 - kappa),
           pi * (pi + (1 - pi) * kappa)};
      break;
    case ModelKind::Dallal:
      p = {1 - (2 - kappa) * pi, 2 * pi * (1 - kappa), pi * kappa};
      break;
    case ModelKind::ClaytonCopula: {
      if (!(kappa > 0.0)) throw std::domain_error("clayton theta must be positive");
      const auto cd = detail::clayton_diag(pi, kappa);
      p = {cd.C, 2 * (1 - pi - cd.C), 2 * pi - 1 + cd.C};
      break;
    }
    default:
      break;
  }
  const double tol = 1e-12;
  if (p.p0 < -tol || p.p1 < -tol || p.p2 < -tol || p.p0 > 1 + tol || p.p1 > 1 + tol ||
      p.p2 > 1 + tol)
    throw std::domain_error("joint probabilities outside [0,1]; kappa out of domain");
  p.p0 = std::clamp(p.p0, 0.0, 1.0);
  p.p1 = std::clamp(p.p1, 0.0, 1.0);
  p.p2 = std::clamp(p.p2, 0.0, 1.0);
  return p;
}

/// The model's implied intra-subject correlation at (pi, kappa).
inline double correlation(ModelKind model, double pi, double kappa) {
  switch (model) {
    case ModelKind::Independence: return 0.0;
    case ModelKind::Rosner: return (kappa - 1.0) * pi / (1.0 - pi);
    case ModelKind::Donner: return kappa;
    case ModelKind::Dallal: return (kappa - pi) / (1.0 - pi);
    case ModelKind::ClaytonCopula: {
      const auto cd = detail::clayton_diag(pi, kappa);
      const double u = 1.0 - pi;
      return (cd.C - u * u) / (pi * u);
    }
    default:
      throw std::invalid_argument("correlation: saturated model");
  }
}

/// Log-likelihood without the multinomial-coefficient constant.
inline double log_likelihood(ModelKind model, const ParamVector& params,
                             const FrequencyTable& table) {
  double ll = 0.0;
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    if (model == ModelKind::Saturated) {
      if (grp.m_plus() > 0) {
        const auto& p = params.sat_probs[i];
        ll += xlogy(grp.m0, p.p0) + xlogy(grp.m1, p.p1) + xlogy(grp.m2, p.p2);
      }
      if (grp.n_plus() > 0) {
        const double pi = params.pis[i];
        ll += xlogy(grp.n0, 1 - pi) + xlogy(grp.n1, pi);
      }
      continue;
    }
    const double pi = params.pis[i];
    if (grp.m_plus() > 0) {
      const auto p = joint_probs(model, pi, params.kappa.value_or(0.0));
      ll += xlogy(grp.m0, p.p0) + xlogy(grp.m1, p.p1) + xlogy(grp.m2, p.p2);
    }
    ll += xlogy(grp.n0, 1 - pi) + xlogy(grp.n1, pi);
  }
  return ll;
}

/// The additive constant of the log-likelihood (log multinomial coefficients).
inline double log_likelihood_const(const FrequencyTable& table) {
  double s = 0.0;
  for (const auto& grp : table.groups) {
    s += log_multinomial_coef(grp.m_plus(), grp.m0, grp.m1, grp.m2);
    s += log_multinomial_coef(grp.n_plus(), grp.n0, grp.n1);
  }
  return s;
}

namespace detail {

// dp_r/dpi for the parametric models.
inline std::array<double, 3> dprobs_dpi(ModelKind model, double pi, double k) {
  switch (model) {
    case ModelKind::Independence:
      return {-2 * (1 - pi), 2 - 4 * pi, 2 * pi};
    case ModelKind::Rosner:
      return {2 * (k * pi - 1), 2 * (1 - 2 * k * pi), 2 * k * pi};
    case ModelKind::Donner:
      return {-(2 - k) + 2 * (1 - k) * pi, 2 * (1 - k) * (1 - 2 * pi),
              2 * (1 - k) * pi + k};
    case ModelKind::Dallal:
      return {-(2 - k), 2 * (1 - k), k};
    case ModelKind::ClaytonCopula: {
      const auto cd = clayton_diag(pi, k);
      const double dC = clayton_dC_dpi(cd, k);
      return {dC, -2 * (1 + dC), 2 + dC};
    }
    default:
      throw std::invalid_argument("dprobs_dpi: saturated model");
  }
}

// dp_r/dkappa; the three classical models are linear in their nuisance.
inline std::array<double, 3> dprobs_dkappa(ModelKind model, double pi, double k) {
  switch (model) {
    case ModelKind::Rosner:
      return {pi * pi, -2 * pi * pi, pi * pi};
    case ModelKind::Donner:
      return {pi * (1 - pi), -2 * pi * (1 - pi), pi * (1 - pi)};
    case ModelKind::Dallal:
      return {pi, -2 * pi, pi};
    case ModelKind::ClaytonCopula: {
      const auto cd = clayton_diag(pi, k);
      double d1, d2;
      clayton_dlogC_dtheta(cd, k, d1, d2);
      const double dC = cd.C * d1;
      return {dC, -2 * dC, dC};
    }
    default:
      throw std::invalid_argument("dprobs_dkappa: no nuisance parameter");
  }
}

// Sums count * dp/p over the three bilateral cells, skipping zero counts.
inline double ratio_sum(const GroupCounts& grp, const JointProbs& p,
                        const std::array<double, 3>& dp) {
  const double counts[3] = {double(grp.m0), double(grp.m1), double(grp.m2)};
  const double probs[3] = {p.p0, p.p1, p.p2};
  double s = 0.0;
  for (int r = 0; r < 3; ++r) {
    if (counts[r] == 0.0) continue;
    if (probs[r] <= 0.0) throw std::domain_error("singular point");
    s += counts[r] * dp[r] / probs[r];
  }
  return s;
}

}  // namespace detail

/// First derivative of the log-likelihood w.r.t. pi_i.
inline double score_pi(ModelKind model, const ParamVector& params,
                       const FrequencyTable& table, std::size_t i) {
  const auto& grp = table.groups.at(i);
  const double pi = params.pis.at(i);
  const double k = params.kappa.value_or(0.0);
  double s = 0.0;
  if (grp.m_plus() > 0) {
    const auto p = joint_probs(model, pi, k);
    s += detail::ratio_sum(grp, p, detail::dprobs_dpi(model, pi, k));
  }
  if (grp.n0 > 0) {
    if (pi >= 1.0) throw std::domain_error("singular point");
    s -= grp.n0 / (1.0 - pi);
  }
  if (grp.n1 > 0) {
    if (pi <= 0.0) throw std::domain_error("singular point");
    s += grp.n1 / pi;
  }
  return s;
}

/// First derivative of the log-likelihood w.r.t. the nuisance parameter.
inline double score_kappa(ModelKind model, const ParamVector& params,
                          const FrequencyTable& table) {
  if (!has_nuisance(model)) throw std::invalid_argument("no nuisance parameter");
  const double k = *params.kappa;
  double s = 0.0;
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    if (grp.m_plus() == 0) continue;
    const double pi = params.pis[i];
    const auto p = joint_probs(model, pi, k);
    s += detail::ratio_sum(grp, p, detail::dprobs_dkappa(model, pi, k));
  }
  return s;
}

/// Second derivative of the log-likelihood w.r.t. the nuisance parameter.
inline double d2_kappa(ModelKind model, const ParamVector& params,
                       const FrequencyTable& table) {
  if (!has_nuisance(model)) throw std::invalid_argument("no nuisance parameter");
  const double k = *params.kappa;
  double s = 0.0;
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    if (grp.m_plus() == 0) continue;
    const double pi = params.pis[i];
    const auto p = joint_probs(model, pi, k);
    const double counts[3] = {double(grp.m0), double(grp.m1), double(grp.m2)};
    const double probs[3] = {p.p0, p.p1, p.p2};
    const auto dp = detail::dprobs_dkappa(model, pi, k);
    if (model == ModelKind::ClaytonCopula) {
      const auto cd = detail::clayton_diag(pi, k);
      double d1, d2;
      detail::clayton_dlogC_dtheta(cd, k, d1, d2);
      const double Cp = cd.C * d1;
      const double Cpp = cd.C * (d1 * d1 + d2);
      const double ddp[3] = {Cpp, -2 * Cpp, Cpp};
      const double dpv[3] = {Cp, -2 * Cp, Cp};
      for (int r = 0; r < 3; ++r) {
        if (counts[r] == 0.0) continue;
        if (probs[r] <= 0.0) throw std::domain_error("singular point");
        const double ratio = dpv[r] / probs[r];
        s += counts[r] * (ddp[r] / probs[r] - ratio * ratio);
      }
    } else {
      // p_r linear in kappa: d2 log p_r = -(dp_r/p_r)^2.
      for (int r = 0; r < 3; ++r) {
        if (counts[r] == 0.0) continue;
        if (probs[r] <= 0.0) throw std::domain_error("singular point");
        const double ratio = dp[r] / probs[r];
        s -= counts[r] * ratio * ratio;
      }
    }
  }
  return s;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_MODELS_HPP

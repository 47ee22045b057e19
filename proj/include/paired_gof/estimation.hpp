#ifndef PAIRED_GOF_ESTIMATION_HPP
#define PAIRED_GOF_ESTIMATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "paired_gof/models.hpp"
#include "paired_gof/types.hpp"

namespace paired_gof {

struct FitOptions {
  double tol = 1e-6;
  int max_iter = 500;
  std::optional<double> kappa_init;
  std::optional<std::vector<double>> pi_init;
};

struct FitResult {
  ModelKind model = ModelKind::Independence;
  ParamVector params;
  double loglik = 0.0;        // without the multinomial constant
  double loglik_const = 0.0;  // the multinomial-coefficient constant
  int iterations = 0;
  bool converged = false;
  bool boundary = false;  // kappa clamped to a domain endpoint
};

namespace detail {

// Real roots of a polynomial with descending coefficients, via companion
// matrix eigenvalues plus a Newton polish. Degenerate leading coefficients
// drop the degree.
inline std::vector<double> real_roots(std::vector<double> coefs) {
  const double scale = [&] {
    double m = 0.0;
    for (double c : coefs) m = std::max(m, std::fabs(c));
    return m;
  }();
  if (scale == 0.0) return {};
  while (coefs.size() > 1 && std::fabs(coefs.front()) < 1e-14 * scale)
    coefs.erase(coefs.begin());
  const int deg = static_cast<int>(coefs.size()) - 1;
  if (deg < 1) return {};
  std::vector<double> roots;
  if (deg == 1) {
    roots.push_back(-coefs[1] / coefs[0]);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
    for (int r = 1; r < deg; ++r) companion(r, r - 1) = 1.0;
    for (int r = 0; r < deg; ++r) companion(0, r) = -coefs[r + 1] / coefs[0];
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    for (int r = 0; r < deg; ++r) {
      const auto ev = solver.eigenvalues()[r];
      if (std::fabs(ev.imag()) < 1e-7 * (1.0 + std::fabs(ev.real())))
        roots.push_back(ev.real());
    }
  }
  auto eval = [&](double x, double& f, double& df) {
    f = 0.0;
    df = 0.0;
    for (double c : coefs) {
      df = df * x + f;
      f = f * x + c;
    }
  };
  for (double& root : roots) {
    for (int it = 0; it < 8; ++it) {
      double f, df;
      eval(root, f, df);
      if (df == 0.0 || std::fabs(f) < 1e-12 * scale) break;
      root -= f / df;
    }
  }
  return roots;
}

// Per-group log-likelihood contribution at (pi, kappa); -inf when invalid.
inline double group_loglik(ModelKind model, double pi, double kappa,
                           const GroupCounts& grp) {
  if (!(pi > 0.0 && pi < 1.0)) {
    // Boundary pi: only valid when the counts on the vanishing side are zero.
    if (pi == 0.0 && grp.m1 == 0 && grp.m2 == 0 && grp.n1 == 0) return 0.0;
    if (pi == 1.0 && grp.m0 == 0 && grp.m1 == 0 && grp.n0 == 0)
      return 0.0;  // all mass on p2 = 1 (up to model validity)
    return -std::numeric_limits<double>::infinity();
  }
  double ll = xlogy(grp.n0, 1 - pi) + xlogy(grp.n1, pi);
  if (grp.m_plus() > 0) {
    JointProbs p;
    try {
      p = joint_probs(model, pi, kappa);
    } catch (const std::domain_error&) {
      return -std::numeric_limits<double>::infinity();
    }
    ll += xlogy(grp.m0, p.p0) + xlogy(grp.m1, p.p1) + xlogy(grp.m2, p.p2);
  }
  return ll;
}

// Coefficients (descending) of the per-group normal-equation polynomial.
inline std::vector<double> pi_polynomial(ModelKind model, double k,
                                         const GroupCounts& grp) {
  const double m0 = double(grp.m0), m1 = double(grp.m1), m2 = double(grp.m2);
  const double n0 = double(grp.n0), n1 = double(grp.n1);
  const double mp = m0 + m1 + m2, np = n0 + n1;
  switch (model) {
    case ModelKind::Rosner:
      return {k * k * (2 * mp + np),
              -k * ((2 * k + 4) * m0 + (2 * k + 5) * m1 + (2 * k + 6) * m2 + 3 * n0 +
                    (k + 3) * n1),
              (4 * k + 2) * m0 + (7 * k + 2) * m1 + (8 * k + 4) * m2 + (k + 2) * n0 +
                  (4 * k + 2) * n1,
              -(2 * m0 + (2 * k + 3) * m1 + (2 * k + 6) * m2 + n0 + (k + 3) * n1),
              m1 + 2 * m2 + n1};
    case ModelKind::Donner: {
      const double q = 1 - k;
      return {q * q * (2 * mp + np),
              -q * ((2 - 3 * k) * m0 + 3 * q * m1 + (4 - 3 * k) * m2 + q * n0 +
                    2 * q * n1),
              (k * k - 2 * k) * m0 + (k * k - 4 * k + 1) * m1 + (k * k - 4 * k + 2) * m2 -
                  k * n0 + (k * k - 3 * k + 1) * n1,
              k * (m1 + m2 + n1)};
    }
    case ModelKind::Dallal:
      return {(2 - k) * (mp + np),
              -((2 - k) * m0 + (3 - k) * (m1 + m2 + n1) + n0),
              m1 + m2 + n1};
    default:
      throw std::invalid_argument("pi_polynomial: model has no polynomial reduction");
  }
}

// Bracketed root of the Clayton pi-score for one group (safeguarded
// bisection/secant), falling back to the better endpoint when the score
// does not change sign.
inline double clayton_pi_root(double theta, const GroupCounts& grp) {
  const double eps = 1e-10;
  FrequencyTable one;
  one.groups = {grp};
  ParamVector params;
  params.kappa = theta;
  auto score = [&](double pi) {
    params.pis = {pi};
    return score_pi(ModelKind::ClaytonCopula, params, one, 0);
  };
  double a = eps, b = 1.0 - eps;
  // At the endpoints a cell probability can underflow to zero against a
  // positive count; the score sign there follows from which counts push the
  // likelihood inward.
  double fa, fb;
  try {
    fa = score(a);
  } catch (const std::domain_error&) {
    fa = (grp.m1 + grp.m2 + grp.n1 > 0) ? 1e300 : -1e300;
  }
  try {
    fb = score(b);
  } catch (const std::domain_error&) {
    fb = (grp.m0 + grp.m1 + grp.n0 > 0) ? -1e300 : 1e300;
  }
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    // Monotone drift to a boundary; take the endpoint with higher likelihood.
    const double la = group_loglik(ModelKind::ClaytonCopula, a, theta, grp);
    const double lb = group_loglik(ModelKind::ClaytonCopula, b, theta, grp);
    return la >= lb ? a : b;
  }
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    double mid = 0.5 * (a + b);
    // Secant proposal, kept only if it lands safely inside the bracket.
    const double sec = (a * fb - b * fa) / (fb - fa);
    if (sec > a + 0.01 * (b - a) && sec < b - 0.01 * (b - a)) mid = sec;
    const double fm = score(mid);
    if (std::fabs(fm) < 1e-12) return mid;
    if (fa * fm < 0.0) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Closed-form independence MLE: pi_i = (m1+2m2+n1)/(2m_+ + n_+).
inline std::vector<double> independence_pis(const FrequencyTable& table) {
  std::vector<double> pis;
  pis.reserve(table.g());
  for (const auto& grp : table.groups) {
    const auto denom = 2 * grp.m_plus() + grp.n_plus();
    if (denom <= 0) throw invalid_input("all-zero group");
    pis.push_back(double(grp.m1 + 2 * grp.m2 + grp.n1) / double(denom));
  }
  return pis;
}

/// Likelihood-maximizing admissible root of the per-group normal equation
/// at a fixed nuisance value. Ties break toward the smaller root.
inline double solve_pi_given_kappa(ModelKind model, double kappa,
                                   const GroupCounts& group) {
  if (group.degenerate()) throw invalid_input("degenerate group");
  if (model == ModelKind::ClaytonCopula) return detail::clayton_pi_root(kappa, group);
  auto roots = detail::real_roots(detail::pi_polynomial(model, kappa, group));
  std::sort(roots.begin(), roots.end());
  double best = std::numeric_limits<double>::quiet_NaN();
  double best_ll = -std::numeric_limits<double>::infinity();
  for (double root : roots) {
    const double pi = std::clamp(root, 1e-12, 1.0 - 1e-12);
    const double ll = detail::group_loglik(model, pi, kappa, group);
    if (ll > best_ll) {
      best_ll = ll;
      best = pi;
    }
  }
  if (!std::isfinite(best_ll)) throw invalid_input("no admissible root");
  return best;
}

/// Kernel log-likelihood at a fixed nuisance value with every group's pi at
/// its own admissible optimum; -inf when some group has no admissible root.
inline double profile_loglik(ModelKind model, double kappa,
                             const FrequencyTable& table,
                             std::vector<double>* pis_out = nullptr) {
  double ll = 0.0;
  std::vector<double> pis(table.g());
  for (std::size_t i = 0; i < table.g(); ++i) {
    double pi;
    try {
      pi = solve_pi_given_kappa(model, kappa, table.groups[i]);
    } catch (const std::exception&) {
      return -std::numeric_limits<double>::infinity();
    }
    pis[i] = pi;
    ll += detail::group_loglik(model, pi, kappa, table.groups[i]);
  }
  if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
  if (pis_out) *pis_out = std::move(pis);
  return ll;
}

namespace detail {

// Scan interval for the profile search; positives are walked in log space.
struct ProfileRange {
  double lo, hi;
  bool log_scale;
};

inline ProfileRange profile_scan_range(ModelKind model) {
  switch (model) {
    case ModelKind::Rosner: return {1e-6, 64.0, true};
    case ModelKind::Donner: return {-1.0 + 1e-9, 1.0 - 1e-9, false};
    case ModelKind::Dallal: return {1e-9, 1.0 - 1e-9, false};
    default: return {1e-6, 64.0, true};  // Clayton
  }
}

// Global profile-likelihood maximum over the nuisance parameter: coarse grid
// then golden-section refinement between the best grid point's neighbors.
// The grid guards against the local stalls the alternating scheme can hit on
// sparse tables, where the admissible region moves with the pis.
inline bool profile_search(ModelKind model, const FrequencyTable& table,
                           double* kappa_out, double* ll_out) {
  const auto range = profile_scan_range(model);
  const auto to_kappa = [&](double t) {
    return range.log_scale ? std::exp(std::log(range.lo) +
                                      t * (std::log(range.hi) - std::log(range.lo)))
                           : range.lo + t * (range.hi - range.lo);
  };
  constexpr int kGrid = 96;
  double best_t = -1.0, best_ll = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= kGrid; ++j) {
    const double t = double(j) / kGrid;
    const double ll = profile_loglik(model, to_kappa(t), table);
    if (ll > best_ll) {
      best_ll = ll;
      best_t = t;
    }
  }
  if (!std::isfinite(best_ll)) return false;
  double a = std::max(0.0, best_t - 1.0 / kGrid);
  double b = std::min(1.0, best_t + 1.0 / kGrid);
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = profile_loglik(model, to_kappa(c), table);
  double fd = profile_loglik(model, to_kappa(d), table);
  for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = profile_loglik(model, to_kappa(c), table);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = profile_loglik(model, to_kappa(d), table);
    }
  }
  const double t_star = fc > fd ? c : d;
  const double ll_star = std::max(fc, fd);
  if (ll_star >= best_ll) {
    best_t = t_star;
    best_ll = ll_star;
  }
  *kappa_out = to_kappa(best_t);
  *ll_out = best_ll;
  return true;
}

}  // namespace detail

/// One damped Newton-Raphson update of the nuisance parameter. Halves the
/// step when it would leave the domain or lower the likelihood; clamps to
/// the boundary (flag set) when halving cannot recover.
inline double newton_kappa_step(ModelKind model, const ParamVector& params,
                                const FrequencyTable& table, bool* hit_boundary = nullptr) {
  const double k = *params.kappa;
  const auto domain = nuisance_domain(model, params.pis);
  const double d2 = d2_kappa(model, params, table);
  const double sc = score_kappa(model, params, table);
  if (hit_boundary) *hit_boundary = false;
  double step;
  if (d2 == 0.0 || !std::isfinite(d2)) {
    // Singular Hessian: nudge along the score direction instead.
    step = (sc > 0 ? 1.0 : -1.0) * 0.1 * (domain.hi - domain.lo);
  } else {
    step = sc / (-d2);
  }
  const double ll0 = log_likelihood(model, params, table);
  ParamVector trial = params;
  for (int halving = 0; halving < 30; ++halving) {
    const double cand = k + step;
    if (domain.contains(cand) && cand != domain.lo && cand != domain.hi) {
      trial.kappa = cand;
      if (log_likelihood(model, trial, table) >= ll0 - 1e-12) return cand;
    }
    step *= 0.5;
  }
  // Halving failed: either we are at a fixed point or pressed against an end.
  const double target = domain.clamp_interior(k + (d2 != 0.0 ? sc / (-d2) : step));
  if (target != k && hit_boundary &&
      (target <= domain.lo + 2e-9 || target >= domain.hi - 2e-9))
    *hit_boundary = true;
  trial.kappa = target;
  if (log_likelihood(model, trial, table) >= ll0 - 1e-12) return target;
  return k;
}

inline int count_free_cells(const FrequencyTable& table) {
  int s = 0;
  for (const auto& grp : table.groups)
    s += (grp.m_plus() > 0 ? 2 : 0) + (grp.n_plus() > 0 ? 1 : 0);
  return s;
}

/// Closed-form fit of the independence model.
inline FitResult fit_independence(const FrequencyTable& table) {
  FitResult result;
  result.model = ModelKind::Independence;
  result.params.pis = independence_pis(table);
  result.loglik = 0.0;
  for (std::size_t i = 0; i < table.g(); ++i) {
    const auto& grp = table.groups[i];
    const double pi = result.params.pis[i];
    result.loglik += xlogy(grp.m0, (1 - pi) * (1 - pi)) +
                     xlogy(grp.m1, 2 * pi * (1 - pi)) + xlogy(grp.m2, pi * pi) +
                     xlogy(grp.n0, 1 - pi) + xlogy(grp.n1, pi);
  }
  result.loglik_const = log_likelihood_const(table);
  result.converged = true;
  return result;
}

/// Empirical-proportion fit of the saturated model. Groups without
/// bilateral (unilateral) data carry NaN cell (marginal) estimates.
inline FitResult fit_saturated(const FrequencyTable& table) {
  FitResult result;
  result.model = ModelKind::Saturated;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  result.loglik = 0.0;
  for (const auto& grp : table.groups) {
    JointProbs p{nan, nan, nan};
    double pi = nan;
    if (grp.m_plus() > 0) {
      const double mp = double(grp.m_plus());
      p = {grp.m0 / mp, grp.m1 / mp, grp.m2 / mp};
      result.loglik += xlogy(grp.m0, p.p0) + xlogy(grp.m1, p.p1) + xlogy(grp.m2, p.p2);
    }
    if (grp.n_plus() > 0) {
      pi = double(grp.n1) / double(grp.n_plus());
      result.loglik += xlogy(grp.n0, 1 - pi) + xlogy(grp.n1, pi);
    }
    result.params.sat_probs.push_back(p);
    result.params.pis.push_back(pi);
  }
  result.loglik_const = log_likelihood_const(table);
  result.converged = true;
  return result;
}

/// MLE via the alternating scheme: analytic per-group pi roots at fixed
/// kappa, then one damped Newton step in kappa, until |delta kappa| < tol.
inline FitResult fit(ModelKind model, const FrequencyTable& table,
                     const FitOptions& opts = {}) {
  validate(table);
  if (model == ModelKind::Independence) return fit_independence(table);
  if (model == ModelKind::Saturated) return fit_saturated(table);
  if (table.m_total() == 0) throw invalid_input("nuisance parameter unidentifiable");

  FitResult result;
  result.model = model;
  result.params.pis = opts.pi_init ? *opts.pi_init : independence_pis(table);
  for (double& pi : result.params.pis) pi = std::clamp(pi, 1e-9, 1.0 - 1e-9);

  auto domain = nuisance_domain(model, result.params.pis);
  double kappa;
  if (opts.kappa_init) {
    kappa = domain.clamp_interior(*opts.kappa_init);
  } else {
    switch (model) {
      case ModelKind::Rosner: kappa = domain.clamp_interior(1.0); break;
      case ModelKind::Donner: kappa = domain.clamp_interior(0.25); break;
      case ModelKind::Dallal: {
        double mean = 0.0;
        for (double pi : result.params.pis) mean += pi;
        mean /= double(result.params.pis.size());
        kappa = domain.clamp_interior(mean);
        break;
      }
      default: kappa = domain.clamp_interior(1.0); break;
    }
  }
  result.params.kappa = kappa;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    result.iterations = iter;
    kappa = *result.params.kappa;
    for (std::size_t i = 0; i < table.g(); ++i)
      result.params.pis[i] = solve_pi_given_kappa(model, kappa, table.groups[i]);
    // The admissible region moved with the pis; keep kappa inside it.
    domain = nuisance_domain(model, result.params.pis);
    if (!domain.contains(*result.params.kappa))
      result.params.kappa = domain.clamp_interior(*result.params.kappa);
    bool hit_boundary = false;
    const double next = newton_kappa_step(model, result.params, table, &hit_boundary);
    const double delta = std::fabs(next - *result.params.kappa);
    result.params.kappa = next;
    result.boundary = hit_boundary;
    if (delta < opts.tol) {
      result.converged = true;
      break;
    }
  }
  // Final pi refresh at the converged kappa.
  for (std::size_t i = 0; i < table.g(); ++i)
    result.params.pis[i] = solve_pi_given_kappa(model, *result.params.kappa,
                                                table.groups[i]);
  result.loglik = log_likelihood(model, result.params, table);
  // The alternating scheme can stall short of the optimum on sparse tables;
  // accept the global profile maximum whenever it is strictly better.
  double prof_kappa, prof_ll;
  if (detail::profile_search(model, table, &prof_kappa, &prof_ll) &&
      prof_ll > result.loglik + 1e-10) {
    std::vector<double> prof_pis;
    if (std::isfinite(profile_loglik(model, prof_kappa, table, &prof_pis))) {
      result.params.kappa = prof_kappa;
      result.params.pis = std::move(prof_pis);
      result.loglik = prof_ll;
      const auto prof_domain = nuisance_domain(model, result.params.pis);
      result.boundary = prof_kappa <= prof_domain.lo + 2e-9 ||
                        prof_kappa >= prof_domain.hi - 2e-9;
      result.converged = true;
    }
  }
  result.loglik_const = log_likelihood_const(table);
  return result;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_ESTIMATION_HPP

#ifndef PAIRED_GOF_SPECIAL_HPP
#define PAIRED_GOF_SPECIAL_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

namespace paired_gof {

/// x*log(y) with the 0*log(0) := 0 convention; -inf when x>0 and y<=0.
inline double xlogy(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y <= 0.0) return -std::numeric_limits<double>::infinity();
  return x * std::log(y);
}

namespace detail {

// Regularized lower incomplete gamma P(a,x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a,x) by continued fraction (x >= a+1).
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a,x), absolute error below 1e-10.
inline double gamma_q(double a, double x) {
  if (a <= 0.0) throw std::domain_error("gamma_q: a must be positive");
  if (x < 0.0) throw std::domain_error("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
inline double chi_square_sf(double x, int dof) {
  if (dof < 1) throw std::domain_error("chi_square_sf: dof must be >= 1");
  if (x < 0.0) throw std::domain_error("chi_square_sf: x must be >= 0");
  return gamma_q(0.5 * dof, 0.5 * x);
}

/// log of the multinomial coefficient n! / (k0! k1! ... ).
template <typename... Counts>
inline double log_multinomial_coef(long long n, Counts... parts) {
  double s = std::lgamma(static_cast<double>(n) + 1.0);
  ((s -= std::lgamma(static_cast<double>(parts) + 1.0)), ...);
  return s;
}

}  // namespace paired_gof

#endif  // PAIRED_GOF_SPECIAL_HPP

// Special functions used throughout: Gamma (Lanczos), Bessel J of real
// order (series / forward recurrence from asymptotic seeds), modified
// Bessel K via the cosh integral representation, Gauss-Legendre nodes and
// a tanh-sinh rule for endpoint-singular integrands.
#ifndef CKN_SPECIAL_HPP
#define CKN_SPECIAL_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "ckn/common.hpp"

namespace ckn {

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

// Lanczos approximation (g = 7, 9 terms). Relative accuracy ~1e-15 for
// positive arguments; reflection handles the rest.
inline double gamma_fn(double x) {
  static constexpr std::array<double, 9> coef = {
      0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
      771.32342877765313,       -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};
  if (std::isnan(x)) return x;
  if (x < 0.5) {
    const double s = std::sin(pi * x);
    if (s == 0.0) raise("GammaPole", "gamma at non-positive integer");
    return pi / (s * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double a = coef[0];
  for (int i = 1; i < 9; ++i) a += coef[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

inline double log_gamma(double x) {
  if (x <= 0.0) raise("GammaPole", "log_gamma needs x > 0");
  if (x < 30.0) return std::log(gamma_fn(x));
  // Stirling with the first correction terms; enough for the factorial-type
  // arguments appearing in Bessel series normalizations.
  const double inv = 1.0 / x;
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * pi) +
         inv * (1.0 / 12.0 - inv * inv * (1.0 / 360.0 - inv * inv / 1260.0));
}

// ---------------------------------------------------------------------------
// Bessel J_nu, real order nu >= 0
// ---------------------------------------------------------------------------

namespace detail {

// Ascending series; accurate whenever x is moderate or the order dominates
// the argument (no significant cancellation in either regime).
inline double bessel_j_series(double nu, double x) {
  const double xh = 0.5 * x;
  const double q = xh * xh;
  // (x/2)^nu / Gamma(nu+1), via logs to survive large nu or tiny x.
  double term;
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  const double lt = nu * std::log(xh) - log_gamma(nu + 1.0);
  term = std::exp(lt);
  double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -q / (k * (nu + k));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
  }
  return sum;
}

// Hankel asymptotic expansion, reliable for x >= 12 and small order.
// The phase x - (nu/2 + 1/4)pi is reduced in long double so that huge
// arguments (kernel matrices reach x ~ 1e6) keep absolute accuracy.
inline double bessel_j_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double t = 1.0;
  const double x8 = 8.0 * x;
  // P ~ sum (-1)^k a_{2k}, Q ~ sum (-1)^k a_{2k+1}
  double a = (mu - 1.0) / x8;  // a_1
  q = a;
  t = a;
  double sign = -1.0;
  for (int k = 1; k <= 12; ++k) {
    const double f2 = (mu - sq(4.0 * k - 1.0)) / (2.0 * k * x8);
    t *= f2;
    p += sign * t;
    const double f3 = (mu - sq(4.0 * k + 1.0)) / ((2.0 * k + 1.0) * x8);
    t *= f3;
    q += sign * t;
    sign = -sign;
    if (std::abs(t) < 1e-17) break;
  }
  const long double chi =
      static_cast<long double>(x) -
      (static_cast<long double>(nu) * 0.5L + 0.25L) * 3.141592653589793238462643383279502884L;
  const long double twopi = 6.283185307179586476925286766559005768L;
  const long double red = chi - twopi * std::floor(chi / twopi);
  const double c = std::cos(static_cast<double>(red));
  const double s = std::sin(static_cast<double>(red));
  return std::sqrt(2.0 / (pi * x)) * (p * c - q * s);
}

}  // namespace detail

// J_nu(x) for nu >= 0, x >= 0. Strategy: ascending series when x <= 12 or
// the order dominates; otherwise asymptotic seeds at the fractional base
// order followed by forward recurrence (stable while order < argument).
inline double bessel_j(double nu, double x) {
  if (x < 0.0 || nu < 0.0) raise("BesselDomain", "bessel_j needs nu, x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (x <= 12.0 || nu >= 0.9 * x) return detail::bessel_j_series(nu, x);
  double base = nu - std::floor(nu);
  double j0 = detail::bessel_j_asymptotic(base, x);
  if (nu < base + 0.5) return j0;
  double j1 = detail::bessel_j_asymptotic(base + 1.0, x);
  double order = base + 1.0;
  while (order < nu - 0.5) {
    const double jn = (2.0 * order / x) * j1 - j0;
    j0 = j1;
    j1 = jn;
    order += 1.0;
  }
  return j1;
}

// ---------------------------------------------------------------------------
// Modified Bessel K_nu
// ---------------------------------------------------------------------------

// K_nu(t) = \int_0^inf exp(-t cosh u) cosh(nu u) du. The integrand decays
// double-exponentially, so the trapezoid rule converges spectrally; one
// representation covers every (nu, t) this library needs. For large t the
// standard e^{-t} expansion is cheaper and fully converged.
inline double bessel_k(double nu, double t) {
  if (t <= 0.0) raise("BesselDomain", "bessel_k needs t > 0");
  nu = std::abs(nu);
  if (t >= 30.0) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 20; ++k) {
      term *= (mu - sq(2.0 * k - 1.0)) / (8.0 * t * k);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::sqrt(pi / (2.0 * t)) * std::exp(-t) * sum;
  }
  const double h = 0.08;
  // Scale out exp(-t) to keep the sum well-conditioned for small t.
  double sum = 0.5;  // u = 0 term of exp(-t(cosh u - 1)) cosh(nu u)
  for (int i = 1;; ++i) {
    const double u = h * i;
    const double c = std::cosh(u);
    const double v = std::exp(-t * (c - 1.0)) * std::cosh(nu * u);
    sum += v;
    if (v < 1e-18 * sum && u > 1.0) break;
    if (u > 700.0) break;
  }
  return h * sum * std::exp(-t);
}

// Caffarelli-Silvestre extension multiplier psi_s(t) = 2^{1-s}/Gamma(s) t^s K_s(t),
// normalized so psi_s(0) = 1; psi_s'(t) = -2^{1-s}/Gamma(s) t^s K_{1-s}(t).
inline double cs_multiplier(double s, double t) {
  if (t == 0.0) return 1.0;
  if (t > 700.0) return 0.0;
  return std::pow(2.0, 1.0 - s) / gamma_fn(s) * std::pow(t, s) * bessel_k(s, t);
}

inline double cs_multiplier_deriv(double s, double t) {
  if (t == 0.0) return 0.0;  // limit is -inf for s<1/2; callers weight by t^{1-2s}
  if (t > 700.0) return 0.0;
  return -std::pow(2.0, 1.0 - s) / gamma_fn(s) * std::pow(t, s) * bessel_k(1.0 - s, t);
}

// ---------------------------------------------------------------------------
// Quadrature building blocks
// ---------------------------------------------------------------------------

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
inline QuadRule gauss_legendre(int n) {
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// tanh-sinh rule on (0, 1); handles integrable endpoint singularities.
inline double tanh_sinh(const std::function<double(double)>& f, double h = 1.0 / 64.0) {
  double sum = 0.0;
  for (double t = -6.4; t <= 6.4; t += h) {
    const double u = 0.5 * pi * std::sinh(t);
    const double x = 1.0 / (1.0 + std::exp(-2.0 * u));
    const double w = 0.25 * pi * std::cosh(t) / sq(std::cosh(u));
    if (x <= 0.0 || x >= 1.0 || !(w > 0.0)) continue;
    sum += w * f(x);
  }
  return h * sum;
}

// Surface measure of the unit sphere S^{n-1}.
inline double sphere_area(int n) {
  return 2.0 * std::pow(pi, 0.5 * n) / gamma_fn(0.5 * n);
}

}  // namespace ckn

#endif

// Problem parameters and the closed-form constants of the theory:
// Hardy constant H_s, extension constant C_s, the half-plane Hardy
// constant gamma, the perturbation constant c_mu and the induced
// symmetry-breaking threshold, plus the sharp Sobolev constant.
#ifndef CKN_CONSTANTS_HPP
#define CKN_CONSTANTS_HPP

#include <cmath>
#include <optional>
#include <string>

#include "ckn/special.hpp"

namespace ckn {

inline double critical_exponent(int n, double s) { return 2.0 * n / (n - 2.0 * s); }

// Herbst constant H_s = 2^{2s} Gamma^2((n+2s)/4) / Gamma^2((n-2s)/4).
inline double hardy_constant(int n, double s) {
  if (n < 2) raise("BadParams", "need n >= 2");
  if (!(s > 0.0 && s < 1.0)) raise("BadParams", "need 0 < s < 1");
  if (n <= 2.0 * s) raise("BadParams", "need n > 2s");
  const double a = gamma_fn(0.25 * (n + 2.0 * s));
  const double b = gamma_fn(0.25 * (n - 2.0 * s));
  return std::pow(2.0, 2.0 * s) * (a / b) * (a / b);
}

// C_s = Gamma(s) / (2^{1-2s} Gamma(1-s)).
inline double cs_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) raise("BadParams", "need 0 < s < 1");
  return gamma_fn(s) / (std::pow(2.0, 1.0 - 2.0 * s) * gamma_fn(1.0 - s));
}

// gamma = c_hat Gamma(s) Gamma(1-s) / 2; equals c_hat pi / (2 sin pi s).
inline double gamma_constant(double s, double c_hat) {
  if (!(s > 0.0 && s < 1.0)) raise("BadParams", "need 0 < s < 1");
  if (!(c_hat > 0.0)) raise("BadParams", "need c_hat > 0");
  return 0.5 * c_hat * gamma_fn(s) * gamma_fn(1.0 - s);
}

// Sharp fractional Sobolev constant (Cotsiolis-Tavoularis):
// S = 2^{2s} pi^s Gamma((n+2s)/2)/Gamma((n-2s)/2) (Gamma(n/2)/Gamma(n))^{2s/n}.
inline double sobolev_constant(int n, double s) {
  if (n <= 2.0 * s) raise("BadParams", "need n > 2s");
  return std::pow(2.0, 2.0 * s) * std::pow(pi, s) * gamma_fn(0.5 * (n + 2.0 * s)) /
         gamma_fn(0.5 * (n - 2.0 * s)) *
         std::pow(gamma_fn(0.5 * n) / gamma_fn(static_cast<double>(n)), 2.0 * s / n);
}

// The c_hat = 1 regime of the slice Hardy comparison: n >= 4, or n = 3
// with s <= 1/2. Outside it c_hat must be supplied explicitly.
inline bool c_hat_default_justified(int n, double s) {
  return n >= 4 || (n == 3 && s <= 0.5);
}

struct ProblemParams {
  int n = 0;          // spatial dimension, n = k m
  double s = 0.0;     // fractional order in (0,1)
  double q = 0.0;     // nonlinearity exponent in (2, 2n/(n-2s))
  double b = 0.0;     // derived: b = n/q - n/2 + s
  double lambda = 0.0;
  int m = 1;          // number of factor spaces
  int k = 0;          // factor dimension
  double c_hat = 1.0; // slice Hardy constant

  double critical_q() const { return critical_exponent(n, s); }
  double hardy() const { return hardy_constant(n, s); }
};

struct RawParams {
  int n = 0;
  double s = 0.0;
  double q = 0.0;
  double lambda = 0.0;
  int m = 1;
  int k = 0;  // 0 means "derive from n, m"
  std::optional<double> c_hat;
};

inline ProblemParams validate_params(const RawParams& raw) {
  if (raw.n < 2) raise("BadParams", "need n >= 2");
  if (!(raw.s > 0.0 && raw.s < 1.0)) raise("BadParams", "need 0 < s < 1");
  if (!std::isfinite(raw.q) || !std::isfinite(raw.lambda))
    raise("BadParams", "all numeric fields must be finite");
  if (raw.m < 1) raise("BadParams", "need m >= 1");
  const int k = raw.k > 0 ? raw.k : (raw.m > 0 && raw.n % raw.m == 0 ? raw.n / raw.m : 0);
  if (k < 2 || k * raw.m != raw.n)
    raise("BadFactorization", "need n = k m with k >= 2, got n=" + std::to_string(raw.n) +
                                  " k=" + std::to_string(k) + " m=" + std::to_string(raw.m));
  const double qc = critical_exponent(raw.n, raw.s);
  if (!(raw.q > 2.0 && raw.q < qc))
    raise("QOutOfRange", "q must lie in (2, " + std::to_string(qc) + ")");
  const double hs = hardy_constant(raw.n, raw.s);
  if (!(raw.lambda > -hs))
    raise("LambdaBelowHardy", "lambda must exceed -H_s = " + std::to_string(-hs));
  ProblemParams p;
  p.n = raw.n;
  p.s = raw.s;
  p.q = raw.q;
  p.b = raw.n / raw.q - 0.5 * raw.n + raw.s;
  p.lambda = raw.lambda;
  p.m = raw.m;
  p.k = k;
  if (raw.c_hat) {
    if (!(*raw.c_hat > 0.0)) raise("BadParams", "c_hat must be positive");
    p.c_hat = *raw.c_hat;
  } else if (c_hat_default_justified(raw.n, raw.s)) {
    p.c_hat = 1.0;
  } else {
    raise("CHatUnjustified",
          "the default c_hat = 1 holds only for n >= 4 or n = 3, s <= 1/2; "
          "supply c_hat explicitly");
  }
  return p;
}

// c_mu = C_s (m mu + m + 1 - 2s) gamma; does not depend on the function u.
inline double c_mu(const ProblemParams& p, double mu) {
  if (!(mu > 0.0)) raise("MuNonpositive", "eigenvalue mu must be positive");
  return cs_constant(p.s) * (p.m * mu + p.m + 1.0 - 2.0 * p.s) * gamma_constant(p.s, p.c_hat);
}

// For lambda >= -H_s + c_mu/(q-2) no k-radially symmetric function can
// attain the group-invariant best constant.
inline double breaking_threshold(const ProblemParams& p, double mu) {
  return -hardy_constant(p.n, p.s) + c_mu(p, mu) / (p.q - 2.0);
}

struct ConstantsTable {
  double hardy = 0.0;
  double cs = 0.0;
  double gamma = 0.0;
  double sobolev = 0.0;
  double cmu = 0.0;
  double threshold = 0.0;
};

inline ConstantsTable constants_table(const ProblemParams& p, double mu) {
  ConstantsTable t;
  t.hardy = hardy_constant(p.n, p.s);
  t.cs = cs_constant(p.s);
  t.gamma = gamma_constant(p.s, p.c_hat);
  t.sobolev = sobolev_constant(p.n, p.s);
  t.cmu = c_mu(p, mu);
  t.threshold = breaking_threshold(p, mu);
  return t;
}

}  // namespace ckn

#endif

// The variational functionals: Gagliardo seminorm (spectral multiplier
// rho^{2s}), Hardy integral, weighted L^q norm, Q_lambda, J_lambda, and a
// dual-norm proxy for the Euler-Lagrange residual of
//   D^s u + lambda |x|^{-2s} u = kappa |x|^{-bq} u^{q-1}.
#ifndef CKN_ENERGY_HPP
#define CKN_ENERGY_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "ckn/constants.hpp"
#include "ckn/hankel.hpp"

namespace ckn {

// \int rho^{2s} g(rho)^2 rho^{n-1} drho over the spectral grid.
inline double spectral_energy(const GridPtr& grid, int n, double s,
                              const std::vector<double>& g) {
  const auto& rho = grid->nodes();
  const auto& w = grid->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    sum += std::pow(rho[i], 2.0 * s + n - 1) * g[i] * g[i] * w[i];
  return sum;
}

// Seminorm of u(r) Y_ell(sigma) with fint Y^2 = 1 over S^{n-1}:
// |S^{n-1}| \int rho^{2s} |u^_ell|^2 rho^{n-1} drho.
inline double seminorm(const RadialProfile& u, double s, int ell = 0,
                       bool enforce_decay = false) {
  const SpectralProfile spec = hankel_transform(u, ell, enforce_decay);
  return sphere_area(u.dimension) * spectral_energy(u.grid, u.dimension, s, spec.values);
}

// PolarField (n = 2): modes are L^2-orthogonal, so the seminorm is the sum
// of per-mode seminorms with the trigonometric angular masses.
inline double seminorm(const PolarField& u, double s) {
  u.validate();
  double total = 0.0;
  for (const auto& mode : u.modes) {
    auto spec_c = hankel_apply(u.grid, 2, mode.ell, mode.c);
    denoise_spectrum(u.grid, 2, mode.c, spec_c);
    total += angular_mass(mode.ell) * spectral_energy(u.grid, 2, s, spec_c);
    if (!mode.s.empty()) {
      auto spec_s = hankel_apply(u.grid, 2, mode.ell, mode.s);
      denoise_spectrum(u.grid, 2, mode.s, spec_s);
      total += angular_mass(mode.ell) * spectral_energy(u.grid, 2, s, spec_s);
    }
  }
  return total;
}

struct EnergyReport {
  double seminorm = 0.0;   // ||D^{s/2} u||_2^2
  double hardy = 0.0;      // || |x|^{-s} u ||_2^2
  double lq = 0.0;         // || |x|^{-b} u ||_q^q
  double q_lambda = 0.0;   // seminorm + lambda hardy
  double j_lambda = 0.0;   // q_lambda / lq^{2/q}
};

inline EnergyReport assemble_report(double sn, double hardy, double lq,
                                    const ProblemParams& p) {
  if (!(lq > 0.0)) raise("ZeroFunction", "energy report needs a nonzero function");
  EnergyReport r;
  r.seminorm = sn;
  r.hardy = hardy;
  r.lq = lq;
  r.q_lambda = sn + p.lambda * hardy;
  r.j_lambda = r.q_lambda / std::pow(lq, 2.0 / p.q);
  return r;
}

inline EnergyReport energy_report(const RadialProfile& u, const ProblemParams& p) {
  return assemble_report(seminorm(u, p.s, 0),
                         weighted_norm_detail(u, p.s, 2.0).value,
                         weighted_norm_detail(u, p.b, p.q).value, p);
}

inline EnergyReport energy_report(const PolarField& u, const ProblemParams& p) {
  double hardy = 0.0;
  const auto& r = u.grid->nodes();
  const auto& w = u.grid->weights();
  for (const auto& mode : u.modes)
    for (std::size_t i = 0; i < r.size(); ++i) {
      double m2 = mode.c[i] * mode.c[i];
      if (!mode.s.empty()) m2 += mode.s[i] * mode.s[i];
      hardy += angular_mass(mode.ell) * std::pow(r[i], 1.0 - 2.0 * p.s) * m2 * w[i];
    }
  return assemble_report(seminorm(u, p.s), hardy, weighted_norm(u, p.b, p.q), p);
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residual, dual-norm proxy
// ---------------------------------------------------------------------------

// Residual terms are assembled in spectral space per mode; the dual norm
//   ||R||_*^2 = sum_modes ang(ell) \int (1 + rho^{2s})^{-1} |R^_ell|^2 rho^{n-1} drho
// mimics the H^{-s} pairing at a fixed unit scale, so values are
// comparable across grids. The result is normalized by the same norm of
// the linear part D^s u + lambda |x|^{-2s} u.
struct ElResidual {
  double residual = 0.0;  // normalized dual-norm proxy
  double kappa = 0.0;     // Lagrange multiplier used
};

namespace detail {

inline double dual_sq(const GridPtr& grid, int n, double s, const std::vector<double>& v) {
  const auto& rho = grid->nodes();
  const auto& w = grid->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    sum += v[i] * v[i] / (1.0 + std::pow(rho[i], 2.0 * s)) * std::pow(rho[i], n - 1) * w[i];
  return sum;
}

inline double dual_dot(const GridPtr& grid, int n, double s, const std::vector<double>& a,
                       const std::vector<double>& b) {
  const auto& rho = grid->nodes();
  const auto& w = grid->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    sum += a[i] * b[i] / (1.0 + std::pow(rho[i], 2.0 * s)) * std::pow(rho[i], n - 1) * w[i];
  return sum;
}

}  // namespace detail

// The residual D^s u + lambda |x|^{-2s} u - kappa |x|^{-bq} u^{q-1} is
// assembled pointwise on the grid (D^s u via the rho^{2s} multiplier),
// and only the combined near-zero function is transformed into the dual
// norm, so the norm measures genuine non-stationarity rather than the
// band truncation of the individual singular terms.
inline ElResidual el_residual(const RadialProfile& u, const ProblemParams& p,
                              std::optional<double> multiplier = std::nullopt) {
  const auto& r = u.grid->nodes();
  const std::size_t N = r.size();
  const double peak = u.max_abs();
  for (double v : u.values)
    if (v < -1e-12 * peak)
      raise("NegativeValues", "el_residual is defined for nonnegative functions");

  // No denoising here: the solution's origin cusp carries a faint
  // algebraic spectral tail that must survive into D^s u to balance the
  // singular nonlinear term; the dual-norm weight keeps any aliasing
  // noise far below the measured residual.
  const auto spec_u = hankel_apply(u.grid, p.n, 0, u.values);
  std::vector<double> mult(N);
  for (std::size_t i = 0; i < N; ++i) mult[i] = std::pow(r[i], 2.0 * p.s) * spec_u[i];
  const std::vector<double> ds_u = hankel_apply(u.grid, p.n, 0, mult);

  std::vector<double> linear(N), nonlinear(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double ui = std::max(u.values[i], 0.0);
    linear[i] = ds_u[i] + p.lambda * std::pow(r[i], -2.0 * p.s) * ui;
    nonlinear[i] = std::pow(r[i], -p.b * p.q) * std::pow(ui, p.q - 1.0);
  }
  const std::vector<double> spec_lin = hankel_apply(u.grid, p.n, 0, linear);
  const std::vector<double> spec_nl = hankel_apply(u.grid, p.n, 0, nonlinear);

  double kappa;
  if (multiplier) {
    kappa = *multiplier;
  } else {
    const double num = detail::dual_dot(u.grid, p.n, p.s, spec_lin, spec_nl);
    const double den = detail::dual_sq(u.grid, p.n, p.s, spec_nl);
    kappa = den > 0.0 ? num / den : 0.0;
  }
  std::vector<double> resid_grid(N);
  for (std::size_t i = 0; i < N; ++i) resid_grid[i] = linear[i] - kappa * nonlinear[i];
  const std::vector<double> spec_res = hankel_apply(u.grid, p.n, 0, resid_grid);
  ElResidual out;
  out.kappa = kappa;
  const double denom = detail::dual_sq(u.grid, p.n, p.s, spec_lin);
  out.residual = denom > 0.0 ? std::sqrt(detail::dual_sq(u.grid, p.n, p.s, spec_res) / denom)
                             : 0.0;
  return out;
}

}  // namespace ckn

#endif

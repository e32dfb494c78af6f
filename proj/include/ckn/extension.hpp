// Caffarelli-Silvestre extensions in spectral form, their weighted
// Dirichlet energies, the slice and half-plane Hardy comparisons, and the
// perturbed-extension energy gap.
//
// The canonical extension of u is w^(rho, y) = u^(rho) psi_s(rho y) with
// psi_s(t) = 2^{1-s}/Gamma(s) t^s K_s(t); it minimizes the y^{1-2s}
// Dirichlet energy among extensions of the trace and satisfies
// C_s * energy = seminorm (quad_D).
#ifndef CKN_EXTENSION_HPP
#define CKN_EXTENSION_HPP

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ckn/energy.hpp"
#include "ckn/spherical.hpp"

namespace ckn {

// ---------------------------------------------------------------------------
// psi_s lookup table (cubic Hermite in log t; exact series below the table,
// asymptotic K above it). Direct K_nu quadrature per tensor-grid point
// would dominate every extension energy otherwise.
// ---------------------------------------------------------------------------

class PsiTable {
public:
  explicit PsiTable(double s) : s_(s) {
    const int M = 8192;
    v0_ = std::log(1e-8);
    v1_ = std::log(60.0);
    dv_ = (v1_ - v0_) / (M - 1);
    psi_.resize(M);
    dpsi_.resize(M);
    for (int i = 0; i < M; ++i) {
      const double t = std::exp(v0_ + dv_ * i);
      psi_[i] = cs_multiplier(s, t);
      dpsi_[i] = cs_multiplier_deriv(s, t);
    }
    small_b_ = gamma_fn(1.0 - s) / (gamma_fn(1.0 + s) * std::pow(2.0, 2.0 * s));
  }

  double s() const { return s_; }

  double psi(double t) const {
    if (t <= 0.0) return 1.0;
    if (t >= 60.0) return cs_multiplier(s_, t);
    if (t < 1e-8)
      return 1.0 - small_b_ * std::pow(t, 2.0 * s_) + t * t / (4.0 * (1.0 - s_));
    return hermite(t, false);
  }

  double dpsi(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= 60.0) return cs_multiplier_deriv(s_, t);
    if (t < 1e-8)
      return -2.0 * s_ * small_b_ * std::pow(t, 2.0 * s_ - 1.0) + t / (2.0 * (1.0 - s_));
    return hermite(t, true);
  }

  static const PsiTable& get(double s) {
    static std::mutex mu;
    static std::map<double, std::shared_ptr<const PsiTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(s);
    if (it == cache.end())
      it = cache.emplace(s, std::make_shared<const PsiTable>(s)).first;
    return *it->second;
  }

private:
  // Hermite interpolation in v = log t. d psi/dv = t psi'(t);
  // d psi'/dv = t psi''(t) with psi'' = psi - (1-2s) psi'/t from the ODE.
  double hermite(double t, bool want_deriv) const {
    const double v = std::log(t);
    const double x = (v - v0_) / dv_;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), psi_.size() - 2);
    const double u = x - i;
    const double t0 = std::exp(v0_ + dv_ * i), t1 = std::exp(v0_ + dv_ * (i + 1));
    double f0, f1, g0, g1;  // values and d/dv at the two nodes
    if (!want_deriv) {
      f0 = psi_[i];
      f1 = psi_[i + 1];
      g0 = t0 * dpsi_[i];
      g1 = t1 * dpsi_[i + 1];
    } else {
      f0 = dpsi_[i];
      f1 = dpsi_[i + 1];
      g0 = t0 * psi_[i] - (1.0 - 2.0 * s_) * dpsi_[i];
      g1 = t1 * psi_[i + 1] - (1.0 - 2.0 * s_) * dpsi_[i + 1];
    }
    const double h00 = (1 + 2 * u) * sq(1 - u), h10 = u * sq(1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * f0 + h10 * dv_ * g0 + h01 * f1 + h11 * dv_ * g1;
  }

  double s_;
  double v0_, v1_, dv_;
  double small_b_;
  std::vector<double> psi_, dpsi_;
};

// ---------------------------------------------------------------------------
// Extension fields
// ---------------------------------------------------------------------------

struct ExtensionField {
  GridPtr grid;                // momentum nodes
  int dimension = 0;
  double s = 0.0;
  std::vector<double> source;  // u(r_i), the trace
  std::vector<double> spec;    // u^(rho_i), mode 0

  // w^ at momentum index i and height y.
  double spectral_at(std::size_t i, double y) const {
    return spec[i] * PsiTable::get(s).psi(grid->nodes()[i] * y);
  }
};

inline ExtensionField cs_extend(const RadialProfile& u, double s) {
  ExtensionField ext;
  ext.grid = u.grid;
  ext.dimension = u.dimension;
  ext.s = s;
  ext.source = u.values;
  ext.spec = hankel_apply(u.grid, u.dimension, 0, u.values);
  denoise_spectrum(u.grid, u.dimension, u.values, ext.spec);
  return ext;
}

struct YGrid {
  std::vector<double> y;
  std::vector<double> w;
  static YGrid log_spaced(double y_min, double y_max, int n) {
    YGrid g;
    g.y.resize(n);
    g.w.resize(n);
    const double h = std::log(y_max / y_min) / (n - 1);
    for (int i = 0; i < n; ++i) {
      g.y[i] = y_min * std::exp(h * i);
      g.w[i] = h * g.y[i];
    }
    g.w.front() *= 0.5;
    g.w.back() *= 0.5;
    return g;
  }
  // Default window for value-grid realizations (F w products).
  static YGrid value_default() { return log_spaced(1e-4, 1e3, 512); }
  // Wider window for conformance energies, where the y -> 0 weight
  // y^{1-2s} needs more headroom at both ends.
  static YGrid energy_default() { return log_spaced(1e-8, 1e3, 768); }
};

// Slice w(., y): one inverse transform of u^ psi_s(. y).
inline std::vector<double> extension_slice(const ExtensionField& ext, double y) {
  const auto& rho = ext.grid->nodes();
  std::vector<double> damped(rho.size());
  const PsiTable& table = PsiTable::get(ext.s);
  for (std::size_t i = 0; i < rho.size(); ++i)
    damped[i] = ext.spec[i] * table.psi(rho[i] * y);
  return hankel_apply(ext.grid, ext.dimension, 0, damped);
}

// Full value grid W[j][i] = w(r_i, y_j).
inline std::vector<std::vector<double>> extension_values(const ExtensionField& ext,
                                                         const YGrid& yg) {
  std::vector<std::vector<double>> W(yg.y.size());
  for (std::size_t j = 0; j < yg.y.size(); ++j) W[j] = extension_slice(ext, yg.y[j]);
  return W;
}

// ---------------------------------------------------------------------------
// Energies and Hardy comparisons
// ---------------------------------------------------------------------------

struct DirichletResult {
  double energy = 0.0;        // \iint y^{1-2s} |grad w|^2
  double y_truncation = 0.0;  // estimated mass outside the y window
};

// Exact mass of \int_0^tmin t^{1-2s} (psi'^2 + psi^2) dt from the small-t
// forms psi ~ 1 - B t^{2s}, psi' ~ -2sB t^{2s-1}.
inline double psi_energy_head(double s, double t_min) {
  const double B = gamma_fn(1.0 - s) / (gamma_fn(1.0 + s) * std::pow(2.0, 2.0 * s));
  return 2.0 * s * B * B * std::pow(t_min, 2.0 * s) +
         std::pow(t_min, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
}

// Tensor quadrature of |S^{n-1}| \int rho^{n-1} u^2 rho^2
//   \int y^{1-2s} (psi'(rho y)^2 + psi(rho y)^2) dy drho,
// with the [0, y_min] head added in closed form.
// This is an honest double integral; the conformance suite compares
// C_s * energy with the spectral seminorm (quad_D).
inline DirichletResult dirichlet_energy(const ExtensionField& ext,
                                        const YGrid& yg = YGrid::energy_default()) {
  const auto& rho = ext.grid->nodes();
  const auto& wr = ext.grid->weights();
  const PsiTable& table = PsiTable::get(ext.s);
  const double sigma = sphere_area(ext.dimension);
  double total = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (ext.spec[i] == 0.0) continue;
    const double amp = ext.spec[i] * ext.spec[i] *
                       std::pow(rho[i], ext.dimension + 1) * wr[i];
    double inner = std::pow(rho[i], 2.0 * ext.s - 2.0) *
                   psi_energy_head(ext.s, rho[i] * yg.y.front());
    double last = 0.0;
    for (std::size_t j = 0; j < yg.y.size(); ++j) {
      const double t = rho[i] * yg.y[j];
      const double ps = table.psi(t), dps = table.dpsi(t);
      last = std::pow(yg.y[j], 1.0 - 2.0 * ext.s) * (dps * dps + ps * ps);
      inner += last * yg.w[j];
    }
    total += amp * inner;
    edge += amp * last * yg.y.back();
  }
  DirichletResult out;
  out.energy = sigma * total;
  out.y_truncation = sigma * edge;
  if (out.y_truncation > 1e-2 * out.energy)
    raise("YTruncationError", "y-window truncation estimate exceeds 1e-2 of the energy");
  return out;
}

// I_s = \int_0^inf t^{1-2s} (psi_s'^2 + psi_s^2) dt; equals 1/C_s.
inline double bessel_energy_integral(double s, int nodes = 4096) {
  const PsiTable& table = PsiTable::get(s);
  const double v0 = std::log(1e-10), v1 = std::log(200.0);
  const double h = (v1 - v0) / (nodes - 1);
  double sum = psi_energy_head(s, 1e-10);
  for (int i = 0; i < nodes; ++i) {
    const double t = std::exp(v0 + h * i);
    const double ps = table.psi(t), dps = table.dpsi(t);
    double term = std::pow(t, 2.0 - 2.0 * s) * (dps * dps + ps * ps) * h;
    if (i == 0 || i == nodes - 1) term *= 0.5;
    sum += term;
  }
  return sum;
}

struct SlicePair {
  double y = 0.0;
  double lhs = 0.0;  // \int |w(x,y)|^2 / (|x|^2 + y^2) dx
  double rhs = 0.0;  // c_hat \int |u(x)|^2 / (|x|^2 + y^2) dx
};

inline SlicePair slice_hardy_check(const ExtensionField& ext, double y, double c_hat) {
  if (!(y > 0.0)) raise("BadParams", "slice check needs y > 0");
  const auto w = extension_slice(ext, y);
  const auto& r = ext.grid->nodes();
  const auto& wr = ext.grid->weights();
  const double sigma = sphere_area(ext.dimension);
  SlicePair out;
  out.y = y;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double kern = std::pow(r[i], ext.dimension - 1) / (r[i] * r[i] + y * y) * wr[i];
    out.lhs += w[i] * w[i] * kern;
    out.rhs += ext.source[i] * ext.source[i] * kern;
  }
  out.lhs *= sigma;
  out.rhs *= sigma * c_hat;
  return out;
}

// \iint y^{1-2s} |w|^2 / (|x|^2 + y^2) dx dy.
inline double halfplane_hardy(const ExtensionField& ext,
                              const YGrid& yg = YGrid::energy_default()) {
  const auto& r = ext.grid->nodes();
  const auto& wr = ext.grid->weights();
  const double sigma = sphere_area(ext.dimension);
  double total = 0.0;
  for (std::size_t j = 0; j < yg.y.size(); ++j) {
    const double y = yg.y[j];
    const auto w = extension_slice(ext, y);
    double slice = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      slice += w[i] * w[i] * std::pow(r[i], ext.dimension - 1) /
               (r[i] * r[i] + y * y) * wr[i];
    total += std::pow(y, 1.0 - 2.0 * ext.s) * slice * yg.w[j];
  }
  return sigma * total;
}

// Boundary term of the integration by parts behind the gap inequality:
//   B(y) = y^{1-2s} | \int F dF/dy |w|^2 dx |  (m = 1 reduced form).
inline double partial_boundary_term(const ExtensionField& ext, double y) {
  const auto w = extension_slice(ext, y);
  const auto& r = ext.grid->nodes();
  const auto& wr = ext.grid->weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d2 = r[i] * r[i] + y * y;
    sum += w[i] * w[i] * r[i] * r[i] / (d2 * d2) * std::pow(r[i], ext.dimension - 1) * wr[i];
  }
  return std::pow(y, 1.0 - 2.0 * ext.s) * y * std::abs(sum) * sphere_area(ext.dimension);
}

// ---------------------------------------------------------------------------
// Perturbed-extension gap:
//   \iint y^{1-2s} (|grad(F w)|^2 - |grad w|^2) <= (m mu + m + 1 - 2s)
//   \iint y^{1-2s} |zeta|^{-2} |w|^2.
// The factor algebra is angularly averaged in closed form (zonal phi,
// mean square one, zero mean); w enters through value grids and centered
// differences on the log grids.
// ---------------------------------------------------------------------------

struct GapReport {
  double lhs = 0.0;
  double rhs = 0.0;            // full right side including the mu factor
  double rhs_core = 0.0;       // \iint y^{1-2s} |zeta|^{-2} w^2
  double mu_factor = 0.0;      // m mu + m + 1 - 2s
  double disc_estimate = 0.0;  // Richardson estimate of the lhs error
};

namespace detail {

// lhs integrand for m = 1, angles integrated out:
//   -y^2/D^2 (w_r^2 + w_y^2) + 2 w (w_r r y^2 - w_y r^2 y)/D^4
//   + w^2 (y^2/D^4 + mu/D^2),  D^2 = r^2 + y^2.
inline double gap_quad_m1(const ExtensionField& ext, double mu,
                          const std::vector<std::vector<double>>& W, const YGrid& yg,
                          int stride, double* rhs_core) {
  const auto& r = ext.grid->nodes();
  const auto& wr = ext.grid->weights();
  const std::size_t N = r.size(), Ny = yg.y.size();
  const double hr = std::log(r[1] / r[0]);
  const double hy = std::log(yg.y[1] / yg.y[0]);
  double lhs = 0.0, core = 0.0;
  const std::size_t st = stride;
  for (std::size_t j = st; j + st < Ny; ++j) {
    const double y = yg.y[j];
    const double ypow = std::pow(y, 1.0 - 2.0 * ext.s);
    const double wyj = yg.w[j];
    for (std::size_t i = st; i + st < N; ++i) {
      const double rr = r[i];
      const double D2 = rr * rr + y * y;
      const double w0 = W[j][i];
      const double w_r = (W[j][i + st] - W[j][i - st]) / (2.0 * st * hr * rr);
      const double w_y = (W[j + st][i] - W[j - st][i]) / (2.0 * st * hy * y);
      const double grad2 = w_r * w_r + w_y * w_y;
      const double integrand = -y * y / D2 * grad2 +
                               2.0 * w0 * (w_r * rr * y * y - w_y * rr * rr * y) / (D2 * D2) +
                               w0 * w0 * (y * y / (D2 * D2) + mu / D2);
      const double meas = std::pow(rr, ext.dimension - 1) * wr[i] * ypow * wyj;
      lhs += integrand * meas;
      if (stride == 1 && rhs_core) core += w0 * w0 / D2 * meas;
    }
  }
  if (stride == 1 && rhs_core) *rhs_core = core;
  return lhs;
}

}  // namespace detail

inline GapReport gap_m2(const ExtensionField& ext, const PerturbationFactor& factor,
                        const YGrid& yg);

inline GapReport perturbed_extension_gap(const ExtensionField& ext,
                                         const PerturbationFactor& factor,
                                         const YGrid& yg = YGrid::value_default()) {
  const int n = ext.dimension;
  if (factor.k() * factor.m() != n)
    raise("PartitionMismatch", "factor partition must satisfy n = k m");
  const double mu = factor.eigenpair().mu;
  const double sigma = sphere_area(n);
  GapReport rep;
  rep.mu_factor = factor.m() * mu + factor.m() + 1.0 - 2.0 * ext.s;

  if (factor.m() == 1) {
    const auto W = extension_values(ext, yg);
    double core = 0.0;
    const double lhs_h = detail::gap_quad_m1(ext, mu, W, yg, 1, &core);
    const double lhs_2h = detail::gap_quad_m1(ext, mu, W, yg, 2, nullptr);
    rep.lhs = sigma * lhs_h;
    rep.rhs_core = sigma * core;
    rep.rhs = rep.mu_factor * rep.rhs_core;
    rep.disc_estimate = sigma * std::abs(lhs_h - lhs_2h) / 3.0;
    if (rep.disc_estimate > 0.1 * std::abs(rep.lhs))
      raise("GridResolutionError",
            "centered differences do not resolve the gap integrand near the origin");
    return rep;
  }
  if (factor.m() == 2) {
    return gap_m2(ext, factor, yg);
  }
  raise("PartitionMismatch", "gap quadrature implemented for m = 1 and m = 2");
}

// m = 2 reduced quadrature over (r_1, r_2, y) for a fully radial source.
// w(R, y) and its derivatives are interpolated in log R from the value grid.
inline GapReport gap_m2(const ExtensionField& ext, const PerturbationFactor& factor,
                        const YGrid& yg) {
  const int k = factor.k(), m = factor.m();
  const double mu = factor.eigenpair().mu;
  const auto& rg = ext.grid->nodes();
  const double hr = std::log(rg[1] / rg[0]);
  const auto W = extension_values(ext, yg);
  const double hy = std::log(yg.y[1] / yg.y[0]);
  const std::size_t N = rg.size(), Ny = yg.y.size();

  // derivative grids
  std::vector<std::vector<double>> WR(Ny, std::vector<double>(N, 0.0));
  for (std::size_t j = 0; j < Ny; ++j)
    for (std::size_t i = 1; i + 1 < N; ++i)
      WR[j][i] = (W[j][i + 1] - W[j][i - 1]) / (2.0 * hr * rg[i]);
  std::vector<std::vector<double>> WY(Ny, std::vector<double>(N, 0.0));
  for (std::size_t j = 1; j + 1 < Ny; ++j)
    for (std::size_t i = 0; i < N; ++i)
      WY[j][i] = (W[j + 1][i] - W[j - 1][i]) / (2.0 * hy * yg.y[j]);

  auto interp = [&](const std::vector<double>& row, double R) -> double {
    if (R <= rg.front() || R >= rg.back()) return 0.0;
    const double x = std::log(R / rg.front()) / hr;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), N - 2);
    const double u = x - i;
    return row[i] * (1.0 - u) + row[i + 1] * u;
  };

  // quadrature grid in each radius
  const int Q = 128;
  const double q_min = 1e-3, q_max = 60.0;
  const double hq = std::log(q_max / q_min) / (Q - 1);
  std::vector<double> qr(Q), qw(Q);
  for (int a = 0; a < Q; ++a) {
    qr[a] = q_min * std::exp(hq * a);
    qw[a] = hq * qr[a];
  }
  qw.front() *= 0.5;
  qw.back() *= 0.5;

  const double ang = std::pow(sphere_area(k), m);
  GapReport rep;
  rep.mu_factor = m * mu + m + 1.0 - 2.0 * ext.s;
  double lhs = 0.0, core = 0.0;
  for (std::size_t j = 1; j + 1 < Ny; ++j) {
    const double y = yg.y[j];
    const double ypow = std::pow(y, 1.0 - 2.0 * ext.s) * yg.w[j];
    for (int a = 0; a < Q; ++a)
      for (int bq = 0; bq < Q; ++bq) {
        const double r1 = qr[a], r2 = qr[bq];
        const double r2sum = r1 * r1 + r2 * r2;
        const double R = std::sqrt(r2sum);
        const double D2 = r2sum + y * y;
        const double w0 = interp(W[j], R);
        if (w0 == 0.0) continue;
        const double wRv = interp(WR[j], R);
        const double wYv = interp(WY[j], R);
        const double grad2 = wRv * wRv + wYv * wYv;
        const double integrand =
            -y * y / D2 * grad2 +
            2.0 * w0 * (wRv * r2sum * y * y / R - wYv * r2sum * y) / (D2 * D2) +
            w0 * w0 * (m / D2 - r2sum / (D2 * D2) + m * mu / D2);
        const double meas = std::pow(r1, k - 1) * std::pow(r2, k - 1) * qw[a] * qw[bq] * ypow;
        lhs += integrand * meas;
        core += w0 * w0 / D2 * meas;
      }
  }
  rep.lhs = ang * lhs;
  rep.rhs_core = ang * core;
  rep.rhs = rep.mu_factor * rep.rhs_core;
  rep.disc_estimate = 0.02 * std::abs(rep.lhs);  // coarse grid; documented scale
  return rep;
}

struct ExtensionEnergyReport {
  double dirichlet = 0.0;
  double halfplane_hardy = 0.0;
  double y_truncation = 0.0;
  std::vector<SlicePair> slice_checks;
};

inline ExtensionEnergyReport extension_energy_report(const ExtensionField& ext,
                                                     double c_hat,
                                                     const std::vector<double>& slice_ys) {
  ExtensionEnergyReport rep;
  const DirichletResult dir = dirichlet_energy(ext);
  rep.dirichlet = dir.energy;
  rep.y_truncation = dir.y_truncation;
  rep.halfplane_hardy = halfplane_hardy(ext);
  for (double y : slice_ys) rep.slice_checks.push_back(slice_hardy_check(ext, y, c_hat));
  return rep;
}

}  // namespace ckn

#endif

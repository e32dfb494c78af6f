// Conformance check suites: every inequality and identity of the theory
// at desk scale, emitted as (check, lhs, rhs, tolerance, pass) rows.
// The CLI `check` subcommand and the acceptance suite both drive these.
#ifndef CKN_CHECKS_HPP
#define CKN_CHECKS_HPP

#include <functional>
#include <random>

#include "ckn/serialize.hpp"

namespace ckn {

namespace checks {

inline CheckRow row_le(const std::string& name, double lhs, double rhs, double tol) {
  CheckRow r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tol;
  r.pass = lhs <= rhs + tol * std::max(std::abs(lhs), std::abs(rhs));
  return r;
}

inline CheckRow row_eq(const std::string& name, double lhs, double rhs, double tol) {
  CheckRow r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.tolerance = tol;
  r.pass = rel_close(lhs, rhs, tol);
  return r;
}

// Test profile corpus; all decay inside the default window.
inline std::vector<std::pair<std::string, std::function<double(double)>>> profile_corpus(
    int n) {
  const double tail = 0.5 * (n + 1.0);
  return {
      {"gauss", [](double r) { return std::exp(-0.5 * r * r); }},
      {"gauss_wide", [](double r) { return std::exp(-r * r / 8.0); }},
      {"ring", [](double r) { return r * r * std::exp(-r * r); }},
      {"power", [tail](double r) { return std::pow(1.0 + r * r, -tail); }},
      {"bump", [](double r) { return std::exp(-sq(r - 2.0)); }},
  };
}

// Criterion 1: closed-form constants.
inline std::vector<CheckRow> constants(double tol = 1e-12) {
  std::vector<CheckRow> rows;
  for (int i = 1; i <= 9; ++i) {
    const double s = 0.1 * i;
    rows.push_back(row_eq("gamma(s=" + std::to_string(s).substr(0, 4) + ")",
                          gamma_constant(s, 1.0), 0.5 * pi / std::sin(pi * s), tol));
  }
  rows.push_back(row_eq("C_{1/2}", cs_constant(0.5), 1.0, tol));
  for (double s : {0.1, 0.25, 0.5, 0.75, 0.9})
    for (int m : {1, 2})
      for (double mu : {1.0, 3.0, 8.0}) {
        ProblemParams p;
        p.n = 4 * m;
        p.s = s;
        p.m = m;
        p.k = 4;
        p.c_hat = 1.0;
        p.q = 2.0 + 0.1;  // c_mu does not involve q
        const double f1 = c_mu(p, mu);
        const double f2 =
            p.c_hat * (m * mu + m + 1.0 - 2.0 * s) * sq(gamma_fn(s)) * std::pow(2.0, 2 * s - 2);
        rows.push_back(row_eq("c_mu(s=" + std::to_string(s).substr(0, 4) +
                                  ",m=" + std::to_string(m) + ",mu=" + std::to_string((int)mu) +
                                  ")",
                              f1, f2, tol));
      }
  return rows;
}

// Criterion 2: half-line weight integral vs Gamma closed form.
inline std::vector<CheckRow> halfline(double tol = 1e-6) {
  std::vector<CheckRow> rows;
  for (int i = 1; i <= 9; ++i) {
    const double s = 0.1 * i;
    for (double x : {0.5, 1.0, 2.0}) {
      const double quad = halfline_weight_integral(s, x);
      const double exact = 0.5 * gamma_fn(s) * gamma_fn(1.0 - s) * std::pow(x, -2.0 * s);
      rows.push_back(row_eq("halfline(s=" + std::to_string(s).substr(0, 4) +
                                ",x=" + std::to_string(x).substr(0, 4) + ")",
                            quad, exact, tol));
    }
  }
  return rows;
}

// Criterion 3: quad_D and the Bessel energy integral I_s = 1/C_s.
inline std::vector<CheckRow> quad_d(int nodes = 1024, double tol = 1e-3,
                                    double is_tol = 1e-6) {
  std::vector<CheckRow> rows;
  auto grid = RadialGrid::log_spaced(1e-5, 1e3, nodes);
  const char* names[3] = {"gauss", "ring", "bump"};
  for (double s : {0.25, 0.5, 0.75}) {
    rows.push_back(
        row_eq("I_s(s=" + std::to_string(s).substr(0, 4) + ")*C_s",
               bessel_energy_integral(s) * cs_constant(s), 1.0, is_tol));
    for (int n : {2, 3, 4})
      for (int prof = 0; prof < 3; ++prof) {
        auto u = RadialProfile::sample(grid, n, [prof](double r) {
          switch (prof) {
            case 0: return std::exp(-0.5 * r * r);
            case 1: return r * r * std::exp(-r * r);
            default: return std::exp(-sq(r - 1.5)) * r;
          }
        });
        const auto ext = cs_extend(u, s);
        const auto dir = dirichlet_energy(ext);
        const double sn = seminorm(u, s, 0);
        rows.push_back(row_eq("quad_D(n=" + std::to_string(n) +
                                  ",s=" + std::to_string(s).substr(0, 4) + "," + names[prof] +
                                  ")",
                              cs_constant(s) * dir.energy, sn, tol));
      }
  }
  return rows;
}

// Criterion 4: slice Hardy comparison (eq. of the extension trace) with
// c_hat = 1 and the half-plane Hardy bound with gamma = pi/(2 sin pi s).
inline std::vector<CheckRow> slice_hardy(int nodes = 768, double tol = 1e-6) {
  std::vector<CheckRow> rows;
  const int n = 4;
  const double s = 0.5;
  auto grid = RadialGrid::log_spaced(1e-5, 1e3, nodes);
  for (const auto& [name, f] : profile_corpus(n)) {
    auto u = RadialProfile::sample(grid, n, f);
    const auto ext = cs_extend(u, s);
    for (double y : {0.1, 1.0, 10.0}) {
      const auto sp = slice_hardy_check(ext, y, 1.0);
      rows.push_back(
          row_le("dis(" + name + ",y=" + std::to_string(y).substr(0, 4) + ")", sp.lhs,
                 sp.rhs, tol));
    }
    const double hp = halfplane_hardy(ext);
    const double bound = gamma_constant(s, 1.0) * weighted_norm_detail(u, s, 2.0).value;
    rows.push_back(row_le("uw0(" + name + ")", hp, bound, tol));
  }
  return rows;
}

// Criterion 5: the perturbation identities and the gap chain at m = 1.
inline std::vector<CheckRow> lbs_gap(int nodes = 768, double id_tol = 1e-8,
                                     double zero_tol = 1e-10) {
  std::vector<CheckRow> rows;
  for (auto [n, s] : {std::pair{4, 0.5}, std::pair{3, 0.5}}) {
    auto grid = RadialGrid::log_spaced(1e-5, 1e3, nodes);
    ProblemParams p;
    p.n = n;
    p.s = s;
    p.q = 2.5;
    p.b = n / p.q - 0.5 * n + s;
    p.m = 1;
    p.k = n;
    p.c_hat = 1.0;
    const SphereRule sphere = sphere_rule(n, 512);
    for (const auto& [name, f] : profile_corpus(n)) {
      auto u = RadialProfile::sample(grid, n, f);
      const double hardy = weighted_norm_detail(u, s, 2.0).value;
      const double lq = weighted_norm_detail(u, p.b, p.q).value;
      for (int ell : {1, 2}) {
        const auto eig = eigenpair_degree(n, ell);
        const std::string tag = "(" + name + ",n=" + std::to_string(n) +
                                ",l=" + std::to_string(ell) + ")";
        // orthogonality identities via sphere quadrature of the zonal factor
        double mean_phi = 0.0, ms_phi = 0.0;
        for (std::size_t i = 0; i < sphere.tau.size(); ++i) {
          mean_phi += sphere.weight[i] * eig.value_tau(sphere.tau[i]);
          ms_phi += sphere.weight[i] * sq(eig.value_tau(sphere.tau[i]));
        }
        // int |x|^{-bq} |u|^{q-2} u u~ = radial integral * mean(phi)
        const double cross = lq * mean_phi;
        CheckRow c1;
        c1.name = "orth_zero" + tag;
        c1.lhs = std::abs(cross) / lq;
        c1.rhs = 0.0;
        c1.tolerance = zero_tol;
        c1.pass = c1.lhs <= zero_tol;
        rows.push_back(c1);
        rows.push_back(row_eq("orth_ms" + tag, lq * ms_phi, lq, id_tol));
        // gap chain
        const PerturbedFunction pf = build_perturbed(u, eig, n, 1);
        const GapResult gap = energy_gap(pf, p, /*with_extension_route=*/true);
        rows.push_back(row_le("gap_exact_le_ext" + tag, gap.gap, gap.extension_gap, 1e-6));
        rows.push_back(row_le("gap_ext_le_cmu" + tag, gap.extension_gap,
                              c_mu(p, eig.mu) * hardy, 1e-6));
      }
    }
  }
  return rows;
}

// Criterion 6: the g_j factor algebra versus centered differences.
inline std::vector<CheckRow> gj_algebra(double step = 1e-4, double tol = 1e-4,
                                        int points = 100) {
  std::vector<CheckRow> rows;
  std::mt19937 rng(20240801);
  std::uniform_real_distribution<double> unif(-1.5, 1.5);
  std::uniform_real_distribution<double> ypos(0.5, 1.5);
  const double s = 0.3;
  for (auto [k, m] : {std::pair{4, 1}, std::pair{2, 2}}) {
    const int n = k * m;
    const auto eig = eigenpair_degree(k, k == 2 ? 2 : 1);
    const PerturbationFactor F(eig, k, m);
    double worst = 0.0;
    int done = 0;
    while (done < points) {
      std::vector<double> x(n);
      for (auto& c : x) c = unif(rng);
      const double y = ypos(rng);
      bool ok = true;
      for (int j = 0; j < m; ++j) {
        double rj = 0.0;
        for (int c = 0; c < k; ++c) rj += sq(x[j * k + c]);
        if (std::sqrt(rj) < 0.3) ok = false;
      }
      if (!ok) continue;
      ++done;
      const double f0 = F(x, y);
      double lap = 0.0;
      for (int c = 0; c < n; ++c) {
        auto xp = x, xm = x;
        xp[c] += step;
        xm[c] -= step;
        lap += (F(xp, y) - 2.0 * f0 + F(xm, y)) / (step * step);
      }
      lap += (F(x, y + step) - 2.0 * f0 + F(x, y - step)) / (step * step);
      const double dy = (F(x, y + step) - F(x, y - step)) / (2.0 * step);
      const double lhs = -lap - (1.0 - 2.0 * s) / y * dy;
      double rhs = 0.0;
      for (int j = 0; j < m; ++j) {
        double rj = 0.0;
        for (int c = 0; c < k; ++c) rj += sq(x[j * k + c]);
        rj = std::sqrt(rj);
        rhs += F.g_closed(x, y, j, s) * eig.value_tau(x[j * k] / rj);
      }
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    CheckRow r;
    r.name = "gj_fd(k=" + std::to_string(k) + ",m=" + std::to_string(m) + ")";
    r.lhs = worst;
    r.rhs = tol;
    r.tolerance = tol;
    r.pass = worst <= tol;
    rows.push_back(r);
  }
  return rows;
}

// Spectral basics: Plancherel and involution on smooth profiles.
inline std::vector<CheckRow> spectral(int nodes = 1024, double tol = 1e-8) {
  std::vector<CheckRow> rows;
  auto grid = RadialGrid::log_spaced(1e-5, 1e3, nodes);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  for (int n : {2, 3, 4}) {
    for (int trial = 0; trial < 4; ++trial) {
      const double a = unif(rng), bb = unif(rng), c = unif(rng) - 0.5;
      auto u = RadialProfile::sample(grid, n, [&](double r) {
        return a * std::exp(-0.7 * a * r * r) + c * r * r * std::exp(-bb * r * r);
      });
      auto spec = hankel_transform(u, 0);
      double n1 = 0.0, n2 = 0.0;
      for (std::size_t i = 0; i < grid->size(); ++i) {
        const double meas = std::pow(grid->nodes()[i], n - 1) * grid->weights()[i];
        n1 += sq(u.values[i]) * meas;
        n2 += sq(spec.values[i]) * meas;
      }
      rows.push_back(row_eq("plancherel(n=" + std::to_string(n) + ",#" +
                                std::to_string(trial) + ")",
                            n2, n1, tol));
      auto back = hankel_inverse(spec, 0);
      double worst = 0.0;
      const double peak = u.max_abs();
      for (std::size_t i = 0; i < grid->size(); ++i)
        worst = std::max(worst, std::abs(back.values[i] - u.values[i]) / peak);
      CheckRow inv;
      inv.name = "involution(n=" + std::to_string(n) + ",#" + std::to_string(trial) + ")";
      inv.lhs = worst;
      inv.rhs = tol;
      inv.tolerance = tol;
      inv.pass = worst <= tol;
      rows.push_back(inv);
    }
  }
  return rows;
}

}  // namespace checks

}  // namespace ckn

#endif

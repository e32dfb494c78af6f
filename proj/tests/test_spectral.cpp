#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/checks.hpp"

using namespace ckn;

namespace {
GridPtr test_grid(int n = 1024) { return RadialGrid::log_spaced(1e-5, 1e3, n); }
}  // namespace

TEST_CASE("grid construction and validation") {
  auto g = test_grid(256);
  CHECK(g->size() == 256);
  CHECK(g->r_min() == doctest::Approx(1e-5));
  CHECK(g->r_max() == doctest::Approx(1e3));
  for (std::size_t i = 1; i < g->size(); ++i) CHECK(g->nodes()[i] > g->nodes()[i - 1]);
  for (double w : g->weights()) CHECK(w > 0.0);
  // quadrature sanity: int_0^inf r e^{-r} dr = 1 (integrand vanishes at
  // both window ends, so only the truncation tails are lost)
  double sum = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    sum += g->nodes()[i] * std::exp(-g->nodes()[i]) * g->weights()[i];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(RadialGrid::log_spaced(0.0, 1.0, 16), Error);
  CHECK_THROWS_AS(RadialGrid::log_spaced(1.0, 0.5, 16), Error);
}

TEST_CASE("gaussian transform is self-reciprocal") {
  auto g = test_grid();
  for (int n : {2, 3, 4}) {
    auto u = RadialProfile::sample(g, n, [](double r) { return std::exp(-0.5 * r * r); });
    auto spec = hankel_transform(u, 0);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double rho = g->nodes()[i];
      if (rho > 8.0) break;
      CHECK(std::abs(spec.values[i] - std::exp(-0.5 * rho * rho)) < 1e-8);
    }
  }
}

TEST_CASE("plancherel and involution on smooth profiles") {
  for (const auto& row : checks::spectral(1024)) {
    INFO(row.name);
    CHECK(row.pass);
  }
}

TEST_CASE("mode-1 transform closed form") {
  // r e^{-r^2/2} at mode 1 maps to rho e^{-rho^2/2} in any dimension
  auto g = test_grid();
  for (int n : {2, 3, 4}) {
    auto u = RadialProfile::sample(g, n, [](double r) { return r * std::exp(-0.5 * r * r); });
    auto spec = hankel_transform(u, 1);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double rho = g->nodes()[i];
      if (rho > 8.0) break;
      CHECK(std::abs(spec.values[i] - rho * std::exp(-0.5 * rho * rho)) < 1e-8);
    }
  }
}

TEST_CASE("transform errors") {
  auto g = test_grid(512);
  // no decay at r_max
  auto flat = RadialProfile::sample(g, 3, [](double) { return 1.0; });
  CHECK(flat.decay_flag());
  CHECK_THROWS_AS(hankel_transform(flat, 0), Error);
  // node-scale oscillation at large radii is unresolvable
  std::vector<double> osc(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    osc[i] = (i % 2 == 0 ? 1.0 : -1.0) * std::exp(-sq(std::log(r / 50.0)));
  }
  RadialProfile wild(g, osc, 3);
  CHECK_THROWS_AS(hankel_transform(wild, 0), Error);
}

TEST_CASE("weighted norms") {
  auto g = test_grid();
  for (int n : {3, 4})
    for (double s : {0.25, 0.5, 0.75}) {
      auto u = RadialProfile::sample(g, n, [](double r) { return std::exp(-r * r); });
      // int |x|^{-2s} e^{-2 r^2} ... with u = e^{-r^2}: p = 2, a = s
      const double got = weighted_norm(u, s, 2.0);
      const double exact = sphere_area(n) * 0.5 * gamma_fn(0.5 * (n - 2.0 * s)) *
                           std::pow(2.0, -0.5 * (n - 2.0 * s));
      // the (n - 2s) power of r_min bounds the truncated origin mass
      CHECK(got == doctest::Approx(exact).epsilon(1e-7));
    }
  // a = 0, p = 2 equals the Plancherel value
  auto u = RadialProfile::sample(g, 3, [](double r) { return std::exp(-0.7 * r * r); });
  auto spec = hankel_transform(u, 0);
  double plancherel = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    plancherel += sq(spec.values[i]) * std::pow(g->nodes()[i], 2) * g->weights()[i];
  plancherel *= sphere_area(3);
  CHECK(weighted_norm(u, 0.0, 2.0) == doctest::Approx(plancherel).epsilon(1e-8));
  // homogeneity is exact in floating point up to one multiplication
  auto u2 = u;
  for (auto& v : u2.values) v *= 3.0;
  CHECK(weighted_norm(u2, 0.3, 2.5) ==
        doctest::Approx(std::pow(3.0, 2.5) * weighted_norm(u, 0.3, 2.5)).epsilon(1e-14));
  // far bump: weight factor close to r_bump^{-2s} times the L^p mass
  const double r0 = 100.0, s = 0.4;
  auto bump = RadialProfile::sample(
      g, 3, [r0](double r) { return std::exp(-sq((r - r0) / 5.0)); });
  const double mass = weighted_norm(bump, 0.0, 2.0);
  CHECK(weighted_norm(bump, s, 2.0) ==
        doctest::Approx(std::pow(r0, -2.0 * s) * mass).epsilon(0.05));
  CHECK_THROWS_AS(weighted_norm(u, 1.6, 2.0), Error);  // a p >= n
}

TEST_CASE("half-line weight integral identity and scaling") {
  for (const auto& row : checks::halfline(1e-6)) {
    INFO(row.name);
    CHECK(row.pass);
  }
  // scaling law value(|x|) = |x|^{-2s} value(1)
  for (double s : {0.2, 0.6})
    CHECK(halfline_weight_integral(s, 3.0) ==
          doctest::Approx(std::pow(3.0, -2.0 * s) * halfline_weight_integral(s, 1.0))
              .epsilon(1e-13));
  CHECK_THROWS_AS(halfline_weight_integral(0.5, 0.0), Error);
}

TEST_CASE("polar field weighted norm") {
  auto g = test_grid(512);
  PolarField f;
  f.grid = g;
  f.sector = 1;
  PolarField::Mode m0;
  m0.ell = 0;
  m0.c.resize(g->size());
  for (std::size_t i = 0; i < g->size(); ++i)
    m0.c[i] = std::exp(-0.5 * sq(g->nodes()[i]));
  f.modes.push_back(m0);
  // pure radial mode: matches the RadialProfile quadrature
  auto u = RadialProfile::sample(g, 2, [](double r) { return std::exp(-0.5 * r * r); });
  CHECK(weighted_norm(f, 0.3, 2.0) ==
        doctest::Approx(weighted_norm(u, 0.3, 2.0)).epsilon(1e-12));
}

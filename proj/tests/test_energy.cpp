#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ckn/checks.hpp"

using namespace ckn;

namespace {
GridPtr test_grid(int n = 1024) { return RadialGrid::log_spaced(1e-5, 1e3, n); }
}  // namespace

TEST_CASE("seminorm closed form for gaussians") {
  auto g = test_grid();
  for (int n : {2, 3, 4})
    for (double s : {0.25, 0.5, 0.75}) {
      auto u = RadialProfile::sample(g, n, [](double r) { return std::exp(-0.5 * r * r); });
      // F[u] = e^{-rho^2/2}; int |xi|^{2s} e^{-rho^2} = |S^{n-1}| G(s+n/2)/2
      const double exact = sphere_area(n) * 0.5 * gamma_fn(s + 0.5 * n);
      CHECK(seminorm(u, s) == doctest::Approx(exact).epsilon(1e-8));
    }
}

TEST_CASE("seminorm at s -> 0 approaches the L^2 norm") {
  auto g = test_grid();
  auto u = RadialProfile::sample(g, 3, [](double r) { return std::exp(-r * r); });
  const double l2 = weighted_norm(u, 0.0, 2.0);
  CHECK(seminorm(u, 1e-5) == doctest::Approx(l2).epsilon(1e-3));
}

TEST_CASE("mode additivity of the polar seminorm") {
  auto g = test_grid(512);
  PolarField two;
  two.grid = g;
  two.sector = 1;
  PolarField::Mode m0, m3;
  m0.ell = 0;
  m3.ell = 3;
  m0.c.resize(g->size());
  m3.c.resize(g->size());
  m3.s.resize(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double r = g->nodes()[i];
    m0.c[i] = std::exp(-0.5 * r * r);
    m3.c[i] = r * r * std::exp(-r * r);
    m3.s[i] = 0.4 * r * std::exp(-0.8 * r * r) * r * r;
  }
  two.modes = {m0, m3};
  PolarField only0 = two, only3 = two;
  only0.modes = {m0};
  only3.modes = {m3};
  const double s = 0.4;
  CHECK(seminorm(two, s) ==
        doctest::Approx(seminorm(only0, s) + seminorm(only3, s)).epsilon(1e-12));
}

TEST_CASE("energy report invariants and J scale invariance") {
  auto g = test_grid();
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 1.5, .m = 1});
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ua(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = ua(rng), beta = ua(rng);
    auto u = RadialProfile::sample(g, 4, [](double r) { return std::exp(-0.6 * r * r); });
    auto v = RadialProfile::sample(g, 4, [&](double r) {
      return alpha * std::exp(-0.6 * sq(beta * r));
    });
    const auto ru = energy_report(u, p);
    const auto rv = energy_report(v, p);
    CHECK(ru.q_lambda == doctest::Approx(ru.seminorm + p.lambda * ru.hardy).epsilon(1e-15));
    CHECK(ru.j_lambda ==
          doctest::Approx(ru.q_lambda / std::pow(ru.lq, 2.0 / p.q)).epsilon(1e-15));
    CHECK(rv.j_lambda == doctest::Approx(ru.j_lambda).epsilon(1e-8));
  }
  auto zero = RadialProfile::sample(g, 4, [](double) { return 0.0; });
  CHECK_THROWS_WITH_AS((void)energy_report(zero, p), doctest::Contains("ZeroFunction"),
                       Error);
}

TEST_CASE("fractional Hardy inequality on the corpus") {
  auto g = test_grid();
  for (int n : {3, 4})
    for (double s : {0.25, 0.5, 0.75}) {
      const double hs = hardy_constant(n, s);
      for (const auto& [name, f] : checks::profile_corpus(n)) {
        auto u = RadialProfile::sample(g, n, f);
        const double quotient = seminorm(u, s) / weighted_norm_detail(u, s, 2.0).value;
        INFO(name << " n=" << n << " s=" << s);
        CHECK(quotient >= hs * (1.0 - 1e-6));
      }
    }
}

TEST_CASE("el_residual: generic bump is far from solving, scaling law holds") {
  auto g = test_grid();
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 1.0, .m = 1});
  auto u = RadialProfile::sample(g, 4, [](double r) { return std::exp(-0.5 * r * r); });
  const auto er = el_residual(u, p);
  CHECK(er.residual > 0.05);   // a gaussian is not a solution
  CHECK(er.residual < 10.0);

  // dilation pushes through every term: R_beta(r) = beta^{2s} R(beta r)
  // with kappa scaled by beta^{2s - bq}; on a log grid an integer node
  // shift realizes beta exactly.
  const int shift = 40;
  const double h = std::log(g->nodes()[1] / g->nodes()[0]);
  const double beta = std::exp(shift * h);
  auto ubeta = RadialProfile::sample(g, 4, [&](double r) { return std::exp(-0.5 * sq(beta * r)); });
  const double kappa = 1.3;
  auto pointwise = [&](const RadialProfile& field, double kap) {
    const auto spec = hankel_apply(g, p.n, 0, field.values);
    std::vector<double> mult(g->size());
    for (std::size_t i = 0; i < g->size(); ++i)
      mult[i] = std::pow(g->nodes()[i], 2.0 * p.s) * spec[i];
    auto ds = hankel_apply(g, p.n, 0, mult);
    std::vector<double> res(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double r = g->nodes()[i];
      res[i] = ds[i] + p.lambda * std::pow(r, -2.0 * p.s) * field.values[i] -
               kap * std::pow(r, -p.b * p.q) * std::pow(field.values[i], p.q - 1.0);
    }
    return res;
  };
  // note: lambda must scale too for an exact law; use lambda = 0 here
  auto p0 = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 1});
  p = p0;
  const auto r_base = pointwise(u, kappa);
  const auto r_beta = pointwise(ubeta, kappa * std::pow(beta, 2.0 * p.s - p.b * p.q));
  const double pref = std::pow(beta, 2.0 * p.s);
  // compare where both dilates are fully resolved by the window; the
  // origin-most decades of the shifted profile lose spectral tail to the
  // momentum truncation by construction
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i + shift < g->size(); ++i) {
    const double r = g->nodes()[i];
    if (r < 0.2 || r > 30.0) continue;
    worst = std::max(worst, std::abs(r_beta[i] - pref * r_base[i + shift]));
    scale = std::max(scale, std::abs(pref * r_base[i + shift]));
  }
  CHECK(worst < 1e-9 * scale);
}

TEST_CASE("second variation inequality at a stable radial point") {
  // at lambda = 0 the radial minimizer is the global one; with the
  // orthogonality identities the second-variation inequality reduces to
  // (q-1) Q_0(u) <= Q_0(u~).
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 1});
  MinimizeConfig cfg;
  cfg.nodes = 640;
  auto res = minimize_radial(p, cfg);
  const auto eig = eigenpair_degree(4, 1);
  const double hardy = weighted_norm_detail(res.field, p.s, 2.0).value;
  const double q_u = seminorm(res.field, p.s, 0) + p.lambda * hardy;
  const double q_t = seminorm(res.field, p.s, 1) + p.lambda * hardy;
  CHECK((p.q - 1.0) * q_u <= q_t + 1e-6 * q_u);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ckn/checks.hpp"

using namespace ckn;

TEST_CASE("perturbation identities and the gap chain") {
  for (const auto& row : checks::lbs_gap(640)) {
    INFO(row.name);
    CHECK(row.pass);
  }
}

TEST_CASE("build_perturbed validation") {
  auto g = RadialGrid::log_spaced(1e-4, 1e2, 256);
  auto u = RadialProfile::sample(g, 4, [](double r) { return std::exp(-r * r); });
  CHECK_THROWS_WITH_AS((void)build_perturbed(u, eigenpair_degree(3, 1), 3, 1),
                       doctest::Contains("PartitionMismatch"), Error);
  SphericalEigenpair fake;
  fake.k = 4;
  fake.ell = 1;
  fake.mu = 0.0;
  CHECK_THROWS_WITH_AS((void)build_perturbed(u, fake, 4, 1),
                       doctest::Contains("MuNonpositive"), Error);
  auto pf = build_perturbed(u, eigenpair_degree(4, 1), 4, 1);
  CHECK(pf.m == 1);
  // pointwise evaluation against the factorized form (m = 2 path)
  auto pf2 = build_perturbed(u, eigenpair_degree(2, 2), 2, 2);
  const std::vector<double> x = {0.8, 0.1, -0.5, 0.3};
  const double r = std::sqrt(0.64 + 0.01 + 0.25 + 0.09);
  PerturbationFactor F(pf2.eigenpair, 2, 2);
  CHECK(perturbed_value(pf2, x) ==
        doctest::Approx(std::exp(-r * r) * F(x, 0.0)).epsilon(1e-4));
  // L^2(|x|^{-2s}) norm is preserved (angular mean square of the factor is 1)
  const double s = 0.5;
  const double hardy_u = weighted_norm_detail(u, s, 2.0).value;
  auto rule = sphere_rule(4, 400);
  double ms = 0.0;
  for (std::size_t i = 0; i < rule.tau.size(); ++i)
    ms += rule.weight[i] * sq(pf.eigenpair.value_tau(rule.tau[i]));
  CHECK(hardy_u * ms == doctest::Approx(hardy_u).epsilon(1e-12));
}

TEST_CASE("energy gap: exact path bounded by c_mu Hardy") {
  auto g = RadialGrid::log_spaced(1e-5, 1e3, 640);
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 1});
  auto u = RadialProfile::sample(g, 4, [](double r) { return std::exp(-0.5 * r * r); });
  auto pf = build_perturbed(u, eigenpair_degree(4, 1), 4, 1);
  const auto gap = energy_gap(pf, p, true);
  CHECK(gap.gap > 0.0);
  CHECK(gap.gap <= gap.extension_gap);
  CHECK(gap.extension_gap <= gap.bound);
  CHECK(gap.margin > 0.0);
  // s -> 1 trend: gap / Hardy approaches mu (the local identity), 10%
  {
    const double s_hi = 0.95;
    const double gap_hi = seminorm(u, s_hi, 1) - seminorm(u, s_hi, 0);
    const double hardy_hi = weighted_norm_detail(u, s_hi, 2.0).value;
    CHECK(gap_hi / hardy_hi == doctest::Approx(3.0).epsilon(0.10));
  }
}

TEST_CASE("certificates") {
  MinimizeConfig cfg;
  cfg.nodes = 768;  // the lambda = 0 origin cusp needs this resolution for 1e-4
  const auto eig = eigenpair_degree(4, 1);
  SUBCASE("stable at lambda = 0") {
    auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 1});
    auto res = minimize_radial(p, cfg);
    REQUIRE(res.converged);
    const auto cert = certify(res.field, p, eig);
    CHECK(cert.verdict == Verdict::stable);
    CHECK(cert.margin < 0.0);
  }
  SUBCASE("unstable at the paper threshold") {
    auto p0 = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 1});
    const double bound = breaking_threshold(p0, eig.mu);
    auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = bound, .m = 1});
    auto res = minimize_radial(p, cfg);
    const auto cert = certify(res.field, p, eig, 1e-3);
    CHECK(cert.verdict == Verdict::unstable);
  }
  SUBCASE("unconverged input is rejected") {
    auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 1.0, .m = 1});
    auto g = RadialGrid::log_spaced(1e-5, 1e3, 512);
    auto bump = RadialProfile::sample(g, 4, [](double r) { return std::exp(-sq(r - 1.0)); });
    CHECK_THROWS_WITH_AS((void)certify(bump, p, eig), doctest::Contains("UnconvergedInput"),
                         Error);
  }
  SUBCASE("tolerance band yields inconclusive") {
    auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 1.0, .m = 1});
    auto res = minimize_radial(p, cfg);
    // a wide-enough band swallows any finite margin
    const auto cert = evaluate_certificate(res.field, p, eig, /*rel_tolerance=*/1e6);
    CHECK(cert.verdict == Verdict::inconclusive);
  }
}

TEST_CASE("threshold bounds") {
  auto p = validate_params({.n = 4, .s = 0.5, .q = 2.5, .lambda = 0.0, .m = 1});
  const auto tb = threshold(p, SymmetryGroup::trivial());
  CHECK(tb.mu == doctest::Approx(3.0));
  CHECK(tb.lambda_bound ==
        doctest::Approx(4.0 * pi - hardy_constant(4, 0.5)).epsilon(1e-12));
  CHECK(tb.cmu == doctest::Approx(2.0 * pi).epsilon(1e-12));
  // Z_t sector: mu = t^2, bound grows like t^2
  auto p2 = validate_params(
      {.n = 2, .s = 0.5, .q = 3.0, .lambda = 0.0, .m = 1, .k = 2, .c_hat = 1.0});
  const auto t2 = threshold(p2, SymmetryGroup::cyclic(2));
  const auto t4 = threshold(p2, SymmetryGroup::cyclic(4));
  CHECK(t2.mu == doctest::Approx(4.0));
  CHECK(t4.mu == doctest::Approx(16.0));
  CHECK(t4.lambda_bound > t2.lambda_bound);
  CHECK_THROWS_WITH_AS((void)threshold(p, SymmetryGroup::full(4)),
                       doctest::Contains("FullGroupRejected"), Error);
}

// Laplace-Beltrami eigenpairs on S^{k-1}, group-invariant first
// eigenvalues, and the perturbation factor F(zeta) = sum_j f_j phi_j.
//
// Zonal representatives are used throughout: a degree-l eigenfunction is
// realized as a Gegenbauer polynomial in tau = sigma . e (Chebyshev for
// k = 2), normalized so its mean square over the sphere is one. Zonal
// choices make every sphere integral one-dimensional.
#ifndef CKN_SPHERICAL_HPP
#define CKN_SPHERICAL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "ckn/special.hpp"

namespace ckn {

// Quadrature for averages over S^{k-1} of zonal integrands F(sigma . e):
//   avg = int_0^pi F(cos t) sin^{k-2} t dt / int_0^pi sin^{k-2} t dt.
struct SphereRule {
  std::vector<double> tau;     // cos(polar angle)
  std::vector<double> weight;  // normalized: weights sum to 1
};

inline SphereRule sphere_rule(int k, int points = 256) {
  if (k < 2) raise("BadParams", "sphere dimension parameter k must be >= 2");
  SphereRule rule;
  auto gl = gauss_legendre(points);
  rule.tau.resize(points);
  rule.weight.resize(points);
  double total = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = 0.5 * pi * (gl.nodes[i] + 1.0);
    rule.tau[i] = std::cos(t);
    rule.weight[i] = gl.weights[i] * std::pow(std::sin(t), k - 2);
    total += rule.weight[i];
  }
  for (auto& w : rule.weight) w /= total;
  return rule;
}

namespace detail {

// Gegenbauer C_l^{alpha}(tau) with alpha = (k-2)/2; Chebyshev T_l for k = 2.
inline double zonal_poly(int k, int ell, double tau) {
  if (k == 2) return std::cos(ell * std::acos(std::min(1.0, std::max(-1.0, tau))));
  const double alpha = 0.5 * (k - 2);
  double c0 = 1.0;
  if (ell == 0) return c0;
  double c1 = 2.0 * alpha * tau;
  for (int l = 1; l < ell; ++l) {
    const double c2 = (2.0 * (l + alpha) * tau * c1 - (l + 2.0 * alpha - 1.0) * c0) / (l + 1.0);
    c0 = c1;
    c1 = c2;
  }
  return c1;
}

}  // namespace detail

// Eigenfunction of -Delta_sigma on S^{k-1} with positive eigenvalue mu,
// zero mean and unit mean square. The evaluator maps tau = sigma . e.
struct SphericalEigenpair {
  int k = 0;
  int ell = 0;
  double mu = 0.0;
  double scale = 1.0;  // normalization applied to the zonal polynomial

  double value_tau(double tau) const { return scale * detail::zonal_poly(k, ell, tau); }

  // phi at a point of S^{k-1} given as coordinates (axis = first one).
  double value(std::span<const double> sigma) const {
    double norm = 0.0;
    for (double c : sigma) norm += c * c;
    norm = std::sqrt(norm);
    if (norm == 0.0) raise("OriginEvaluation", "eigenfunction undefined at the origin");
    return value_tau(sigma[0] / norm);
  }

  // Angle form for k = 2 (tau = cos theta).
  double value_angle(double theta) const { return scale * std::cos(ell * theta); }
};

inline SphericalEigenpair eigenpair_degree(int k, int ell) {
  if (k < 2) raise("BadParams", "need k >= 2");
  if (ell < 1)
    raise("EllZeroRejected", "degree 0 gives mu = 0 and a constant eigenfunction");
  SphericalEigenpair ep;
  ep.k = k;
  ep.ell = ell;
  ep.mu = static_cast<double>(ell) * (ell + k - 2);
  // normalize: mean of phi^2 over the sphere equals 1
  const SphereRule rule = sphere_rule(k, std::max(128, 4 * ell + 32));
  double ms = 0.0;
  for (std::size_t i = 0; i < rule.tau.size(); ++i)
    ms += rule.weight[i] * sq(detail::zonal_poly(k, ell, rule.tau[i]));
  ep.scale = 1.0 / std::sqrt(ms);
  return ep;
}

// ---------------------------------------------------------------------------
// Symmetry groups
// ---------------------------------------------------------------------------

struct SymmetryGroup {
  enum class Kind { trivial, full_orthogonal, product, cyclic_sector };
  Kind kind = Kind::trivial;
  int k = 0;  // factor dimension for product groups
  int m = 1;  // factor count for product groups
  int t = 0;  // sector order for cyclic groups (k = 2)

  static SymmetryGroup trivial() { return {}; }
  static SymmetryGroup full(int k) {
    SymmetryGroup g;
    g.kind = Kind::full_orthogonal;
    g.k = k;
    return g;
  }
  static SymmetryGroup product(int k, int m) {
    if (k < 2 || m < 1) raise("BadParams", "product group needs k >= 2, m >= 1");
    SymmetryGroup g;
    g.kind = Kind::product;
    g.k = k;
    g.m = m;
    return g;
  }
  static SymmetryGroup cyclic(int t) {
    if (t < 2) raise("BadParams", "cyclic sector group needs t >= 2");
    SymmetryGroup g;
    g.kind = Kind::cyclic_sector;
    g.k = 2;
    g.t = t;
    return g;
  }
};

// Minimal positive eigenvalue over mean-zero group-invariant functions on
// S^{k-1}, together with a realizing eigenpair. Only the groups the
// theory's proofs use are implemented; others are rejected explicitly.
inline SphericalEigenpair invariant_first_eigenvalue(const SymmetryGroup& g, int k) {
  switch (g.kind) {
    case SymmetryGroup::Kind::trivial:
      return eigenpair_degree(k, 1);  // mu = k - 1
    case SymmetryGroup::Kind::cyclic_sector:
      if (k != 2) raise("BadParams", "cyclic sector groups live on S^1");
      return eigenpair_degree(2, g.t);  // mu = t^2
    case SymmetryGroup::Kind::full_orthogonal:
      raise("FullGroupRejected",
            "O(k)-invariant mean-zero eigenfunctions do not exist; "
            "a proper subgroup is required");
    default:
      raise("UnsupportedGroup", "no closed form for this subgroup's first eigenvalue");
  }
}

// ---------------------------------------------------------------------------
// Perturbation factor F(zeta) = sum_j (|x_j| / |zeta|) phi(x_j / |x_j|)
// on R^n x [0, inf), n = k m.
// ---------------------------------------------------------------------------

class PerturbationFactor {
public:
  PerturbationFactor(SphericalEigenpair eigenpair, int k, int m)
      : phi_(std::move(eigenpair)), k_(k), m_(m) {
    if (phi_.k != k) raise("PartitionMismatch", "eigenpair lives on the wrong sphere");
    if (k < 2 || m < 1) raise("PartitionMismatch", "need k >= 2, m >= 1");
  }

  int k() const { return k_; }
  int m() const { return m_; }
  const SphericalEigenpair& eigenpair() const { return phi_; }

  // x has n = k m coordinates, blocked as (x_1, ..., x_m); y >= 0.
  double operator()(std::span<const double> x, double y) const {
    if (x.size() != static_cast<std::size_t>(k_ * m_))
      raise("PartitionMismatch", "point dimension must equal k*m");
    double norm2 = y * y;
    for (double c : x) norm2 += c * c;
    if (norm2 == 0.0) raise("OriginEvaluation", "factor undefined at the origin");
    const double inv_norm = 1.0 / std::sqrt(norm2);
    double sum = 0.0;
    for (int j = 0; j < m_; ++j) {
      double rj2 = 0.0;
      for (int c = 0; c < k_; ++c) rj2 += sq(x[j * k_ + c]);
      const double rj = std::sqrt(rj2);
      if (rj == 0.0) continue;  // f_j phi_j -> 0 with |x_j|
      sum += rj * inv_norm * phi_.value_tau(x[j * k_] / rj);
    }
    return sum;
  }

  // Closed form g_j of the factor algebra:
  // -div(y^{1-2s} grad F) = y^{1-2s} sum_j g_j phi_j with
  // g_j = |zeta|^{-3} |x_j|^{-1} ((n+1-2s)|x_j|^2 + (mu-k+1)|zeta|^2).
  double g_closed(std::span<const double> x, double y, int j, double s) const {
    const int n = k_ * m_;
    double norm2 = y * y;
    for (double c : x) norm2 += c * c;
    double rj2 = 0.0;
    for (int c = 0; c < k_; ++c) rj2 += sq(x[j * k_ + c]);
    const double rj = std::sqrt(rj2);
    if (rj == 0.0 || norm2 == 0.0) raise("OriginEvaluation", "g_j undefined here");
    return std::pow(norm2, -1.5) / rj *
           ((n + 1.0 - 2.0 * s) * rj2 + (phi_.mu - k_ + 1.0) * norm2);
  }

private:
  SphericalEigenpair phi_;
  int k_;
  int m_;
};

}  // namespace ckn

#endif

// The symmetry-breaking perturbation u~ = u(x) sum_j (|x_j|/|x|) phi_j,
// its orthogonality identities, the energy-gap inequality, and the
// second-variation certificates built from them.
//
// For m = 1 the perturbed function is the single-angular-mode field
// u(r) phi(sigma), so Q_lambda(u~) is computed exactly from the mode-ell
// transform of the radial part; that exact path is what certificates use.
// The extension route (F w) only bounds the gap from above and is used
// for inequality verification, never for certifying instability.
#ifndef CKN_PERTURB_HPP
#define CKN_PERTURB_HPP

#include <string>

#include "ckn/extension.hpp"

namespace ckn {

struct PerturbedFunction {
  RadialProfile source;  // radial in each variable (m = 1: fully radial)
  SphericalEigenpair eigenpair;
  int k = 0;
  int m = 1;
};

inline PerturbedFunction build_perturbed(const RadialProfile& u,
                                         const SphericalEigenpair& eigenpair, int k, int m) {
  if (k * m != u.dimension)
    raise("PartitionMismatch", "need n = k m matching the profile dimension");
  if (eigenpair.k != k) raise("PartitionMismatch", "eigenpair lives on S^{k-1}");
  if (!(eigenpair.mu > 0.0)) raise("MuNonpositive", "eigenvalue must be positive");
  return PerturbedFunction{u, eigenpair, k, m};
}

// Pointwise value of u~ for the m = 1 case (x given by radius and tau =
// sigma . e). Used by tests; energies use the spectral path.
inline double perturbed_value_m1(const PerturbedFunction& pf, std::size_t node_index,
                                 double tau) {
  return pf.source.values[node_index] * pf.eigenpair.value_tau(tau);
}

// General pointwise value u~(x) = u(|x|) F(x, 0) for a fully radial
// source; used for the m > 1 paths where no mode representation exists.
inline double perturbed_value(const PerturbedFunction& pf, std::span<const double> x) {
  double norm2 = 0.0;
  for (double c : x) norm2 += c * c;
  const double r = std::sqrt(norm2);
  const auto& nodes = pf.source.grid->nodes();
  double u_of_r = 0.0;
  if (r >= nodes.front() && r <= nodes.back()) {
    const double h = std::log(nodes[1] / nodes[0]);
    const double pos = std::log(r / nodes.front()) / h;
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                nodes.size() - 2);
    const double frac = pos - i;
    u_of_r = pf.source.values[i] * (1.0 - frac) + pf.source.values[i + 1] * frac;
  }
  const PerturbationFactor factor(pf.eigenpair, pf.k, pf.m);
  return u_of_r * factor(x, 0.0);
}

struct GapResult {
  double gap = 0.0;        // ||D^{s/2} u~||^2 - ||D^{s/2} u||^2 (exact path)
  double bound = 0.0;      // c_mu \int |x|^{-2s} u^2
  double extension_gap = 0.0;  // C_s * (F w energy difference), m = 1 only
  double margin = 0.0;     // bound - gap
};

inline GapResult energy_gap(const PerturbedFunction& pf, const ProblemParams& p,
                            bool with_extension_route = false) {
  GapResult out;
  const double hardy = weighted_norm_detail(pf.source, p.s, 2.0).value;
  out.bound = c_mu(p, pf.eigenpair.mu) * hardy;
  if (pf.m == 1) {
    out.gap = seminorm(pf.source, p.s, pf.eigenpair.ell) - seminorm(pf.source, p.s, 0);
    if (with_extension_route) {
      const ExtensionField ext = cs_extend(pf.source, p.s);
      PerturbationFactor factor(pf.eigenpair, pf.k, pf.m);
      out.extension_gap = cs_constant(p.s) * perturbed_extension_gap(ext, factor).lhs;
    }
  } else {
    const ExtensionField ext = cs_extend(pf.source, p.s);
    PerturbationFactor factor(pf.eigenpair, pf.k, pf.m);
    out.extension_gap = cs_constant(p.s) * perturbed_extension_gap(ext, factor).lhs;
    out.gap = out.extension_gap;  // upper bound; exact path needs m = 1
  }
  out.margin = out.bound - out.gap;
  return out;
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

enum class Verdict { stable, unstable, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    default: return "inconclusive";
  }
}

struct BreakingCertificate {
  double lambda = 0.0;
  double q_u = 0.0;      // Q_lambda(u)
  double q_tilde = 0.0;  // Q_lambda(u~)
  double margin = 0.0;   // (q-1) Q_lambda(u) - Q_lambda(u~)
  double tolerance = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

// Certificate quantities without the convergence precondition; the m = 1
// exact spectral path.
inline BreakingCertificate evaluate_certificate(const RadialProfile& u,
                                                const ProblemParams& p,
                                                const SphericalEigenpair& eigenpair,
                                                double rel_tolerance = 1e-4) {
  if (eigenpair.k != u.dimension)
    raise("PartitionMismatch", "certificates use the m = 1 exact path");
  const double hardy = weighted_norm_detail(u, p.s, 2.0).value;
  BreakingCertificate cert;
  cert.lambda = p.lambda;
  cert.q_u = seminorm(u, p.s, 0) + p.lambda * hardy;
  cert.q_tilde = seminorm(u, p.s, eigenpair.ell) + p.lambda * hardy;
  cert.margin = (p.q - 1.0) * cert.q_u - cert.q_tilde;
  cert.tolerance = rel_tolerance * std::abs(cert.q_u);
  if (cert.margin > cert.tolerance)
    cert.verdict = Verdict::unstable;
  else if (cert.margin < -cert.tolerance)
    cert.verdict = Verdict::stable;
  else
    cert.verdict = Verdict::inconclusive;
  return cert;
}

// Second-variation test at a converged radial minimizer candidate:
// unstable means Q_lambda(u~) < (q-1) Q_lambda(u) beyond tolerance, which
// rules u out as a minimizer of the unconstrained problem.
inline BreakingCertificate certify(const RadialProfile& u, const ProblemParams& p,
                                   const SphericalEigenpair& eigenpair,
                                   double el_tol = 1e-3, double rel_tolerance = 1e-4) {
  const double resid = el_residual(u, p).residual;
  if (!(resid <= el_tol))
    raise("UnconvergedInput", "certify needs an EL residual below " + std::to_string(el_tol) +
                                  ", got " + std::to_string(resid));
  return evaluate_certificate(u, p, eigenpair, rel_tolerance);
}

struct ThresholdBound {
  double mu = 0.0;
  double cmu = 0.0;
  double lambda_bound = 0.0;  // -H_s + c_mu / (q - 2)
  std::string regime;         // c_hat value and its justification
};

inline ThresholdBound threshold(const ProblemParams& p, const SphericalEigenpair& eigenpair) {
  ThresholdBound t;
  t.mu = eigenpair.mu;
  t.cmu = c_mu(p, eigenpair.mu);
  t.lambda_bound = breaking_threshold(p, eigenpair.mu);
  t.regime = "c_hat=" + std::to_string(p.c_hat) +
             (c_hat_default_justified(p.n, p.s) ? " (default regime: n>=4 or n=3, s<=1/2)"
                                                : " (supplied explicitly)");
  return t;
}

inline ThresholdBound threshold(const ProblemParams& p, const SymmetryGroup& group) {
  return threshold(p, invariant_first_eigenvalue(group, p.k));
}

}  // namespace ckn

#endif

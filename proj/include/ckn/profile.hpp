// Discretized functions: radial samples on a log grid, their spectral
// counterparts, and the (radius x angular mode) representation used for
// n = 2 sector minimization.
#ifndef CKN_PROFILE_HPP
#define CKN_PROFILE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "ckn/grid.hpp"

namespace ckn {

struct RadialProfile {
  GridPtr grid;
  std::vector<double> values;  // u(r_i)
  int dimension = 0;           // measure r^{n-1} dr

  RadialProfile() = default;
  RadialProfile(GridPtr g, std::vector<double> v, int n)
      : grid(std::move(g)), values(std::move(v)), dimension(n) {
    if (!grid || values.size() != grid->size())
      raise("BadProfile", "value count must match the grid");
    if (dimension < 1) raise("BadProfile", "dimension must be >= 1");
    for (double x : values)
      if (!std::isfinite(x)) raise("BadProfile", "values must be finite");
  }

  static RadialProfile sample(const GridPtr& g, int n,
                              const std::function<double(double)>& f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) v[i] = f(g->nodes()[i]);
    return RadialProfile(g, std::move(v), n);
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    return m;
  }

  // Truncation warning: the profile has not decayed at the window edge.
  bool decay_flag() const {
    const double m = max_abs();
    return m > 0.0 && std::abs(values.back()) > 1e-10 * m;
  }
};

struct SpectralProfile {
  GridPtr grid;                // momentum nodes rho_i (same layout as radii)
  std::vector<double> values;  // transformed samples
  int dimension = 0;
  double order = 0.0;        // Bessel order nu = ell + (n-2)/2
  std::size_t band_limit = 0;  // first index zeroed by the aliasing floor
};

// n = 2 representation u(r, theta) = sum_l c_l(r) cos(l theta) + s_l(r) sin(l theta),
// with the mode set closed under the declared Z_t sector symmetry.
struct PolarField {
  struct Mode {
    int ell = 0;
    std::vector<double> c;  // cosine radial part
    std::vector<double> s;  // sine radial part; empty for ell = 0
  };

  GridPtr grid;
  int sector = 1;  // modes are multiples of this
  std::vector<Mode> modes;

  void validate() const {
    if (!grid) raise("BadProfile", "polar field needs a grid");
    int prev = -1;
    for (const auto& m : modes) {
      if (m.ell <= prev) raise("BadProfile", "modes must be ascending");
      if (m.ell % sector != 0)
        raise("BadProfile", "mode set not closed under the declared sector symmetry");
      if (m.c.size() != grid->size() || (!m.s.empty() && m.s.size() != grid->size()))
        raise("BadProfile", "mode radial parts must match the grid");
      prev = m.ell;
    }
  }

  int max_mode() const { return modes.empty() ? 0 : modes.back().ell; }

  double value(double r_index_value, std::size_t i, double theta) const {
    (void)r_index_value;
    double u = 0.0;
    for (const auto& m : modes) {
      u += m.c[i] * std::cos(m.ell * theta);
      if (!m.s.empty()) u += m.s[i] * std::sin(m.ell * theta);
    }
    return u;
  }
};

// Angular L^2 mass of the basis functions cos/sin(l theta) on [0, 2 pi).
inline double angular_mass(int ell) { return ell == 0 ? 2.0 * pi : pi; }

}  // namespace ckn

#endif

// Log-spaced radial grids and their quadrature weights. Every improper
// integral in the library is truncated to [r_min, r_max]; the trapezoid
// rule in the log variable is spectrally accurate for integrands that
// decay at both window ends.
#ifndef CKN_GRID_HPP
#define CKN_GRID_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "ckn/common.hpp"

namespace ckn {

class RadialGrid {
public:
  // Weights realize \int f(r) dr as sum f(r_i) w_i.
  RadialGrid(std::vector<double> nodes, std::vector<double> weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)), id_(next_id()) {
    if (nodes_.size() < 2 || nodes_.size() != weights_.size())
      raise("BadGrid", "need matching node/weight arrays with >= 2 entries");
    if (nodes_.front() <= 0.0) raise("BadGrid", "r_min must be positive");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
      if (nodes_[i] <= nodes_[i - 1]) raise("BadGrid", "nodes must increase strictly");
    for (double w : weights_)
      if (!(w > 0.0)) raise("BadGrid", "weights must be positive");
  }

  static std::shared_ptr<const RadialGrid> log_spaced(double r_min, double r_max, int n) {
    if (!(r_min > 0.0) || !(r_max > r_min) || n < 2)
      raise("BadGrid", "log_spaced needs 0 < r_min < r_max and n >= 2");
    std::vector<double> nodes(n), weights(n);
    const double h = std::log(r_max / r_min) / (n - 1);
    for (int i = 0; i < n; ++i) {
      nodes[i] = r_min * std::exp(h * i);
      weights[i] = h * nodes[i];  // dr = r d(log r)
    }
    weights.front() *= 0.5;
    weights.back() *= 0.5;
    return std::make_shared<const RadialGrid>(std::move(nodes), std::move(weights));
  }

  // Library default window; the CLI lets CKN_GRID_NODES override the
  // node count.
  static std::shared_ptr<const RadialGrid> default_grid(int nodes = 4096) {
    return log_spaced(1e-5, 1e3, nodes);
  }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return nodes_.size(); }
  double r_min() const { return nodes_.front(); }
  double r_max() const { return nodes_.back(); }
  std::uint64_t id() const { return id_; }

private:
  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
  }
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::uint64_t id_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

}  // namespace ckn

#endif

#include "bflow/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bflow/errors.hpp"

namespace bflow {

GaussLegendre gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre_01: need n >= 1");
  GaussLegendre out;
  out.nodes.resize(n);
  out.weights.resize(n);
  // Newton iteration on P_n over (-1,1); nodes are symmetric about 0.
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-based initial guess for the i-th root (descending order).
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Evaluate P_n(x) and P_{n-1}(x) by the three-term recurrence.
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // One polishing step after convergence, then stop.
        double q0 = 1.0, q1 = x;
        for (int j = 2; j <= n; ++j) {
          const double q2 = ((2.0 * j - 1.0) * x * q1 - (j - 1.0) * q0) / j;
          q0 = q1;
          q1 = q2;
        }
        dp = n * (x * q1 - q0) / (x * x - 1.0);
        x -= q1 / dp;
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map (-1,1) -> (0,1): u = (1+x)/2, weight halves. Store ascending in u.
    out.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    out.weights[n - 1 - i] = 0.5 * w;
    out.nodes[i] = 0.5 * (1.0 - x);
    out.weights[i] = 0.5 * w;
  }
  return out;
}

QuadratureGrid QuadratureGrid::make(int radial, int angular, Chart chart, double tol) {
  if (radial < 1 || angular < 1) {
    throw std::invalid_argument("QuadratureGrid::make: counts must be positive");
  }
  QuadratureGrid g;
  const GaussLegendre gl = gauss_legendre_01(radial);
  g.radial_nodes_ = gl.nodes;
  g.radial_weights_ = gl.weights;
  g.angular_count_ = angular;
  g.chart_ = chart;
  g.tol_ = tol;

  // Construction self-test. The radial weights must be positive and sum to 1;
  // with the uniform angular weights summing to 2π this is exactly the
  // statement that the unit-mass round form integrates to 1.
  double wsum = 0.0;
  for (std::size_t j = 0; j < g.radial_nodes_.size(); ++j) {
    if (!(g.radial_weights_[j] > 0.0) || !(g.radial_nodes_[j] > 0.0) ||
        !(g.radial_nodes_[j] < 1.0)) {
      throw std::logic_error("QuadratureGrid: invalid node/weight");
    }
    wsum += g.radial_weights_[j];
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw std::logic_error("QuadratureGrid: weight normalization self-test failed");
  }
  return g;
}

QuadratureGrid QuadratureGrid::for_degree(int k, Chart chart, double tol) {
  return make(config::kDefaultRadialNodes, config::default_angular_count(k), chart, tol);
}

QuadratureGrid QuadratureGrid::doubled() const {
  return make(2 * radial_count(), 2 * angular_count_, chart_, tol_);
}

QuadNode QuadratureGrid::node(std::size_t index) const {
  const std::size_t j = index / static_cast<std::size_t>(angular_count_);
  const std::size_t m = index % static_cast<std::size_t>(angular_count_);
  const double u = radial_nodes_[j];
  const double r = std::sqrt(u / (1.0 - u));
  const double theta =
      2.0 * std::numbers::pi * static_cast<double>(m) / angular_count_;
  const double w = radial_weights_[j] / (2.0 * (1.0 - u) * (1.0 - u)) *
                   (2.0 * std::numbers::pi / angular_count_);
  return QuadNode{std::polar(r, theta), w};
}

}  // namespace bflow

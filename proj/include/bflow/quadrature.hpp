#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "bflow/config.hpp"

namespace bflow {

/// Affine chart of the Riemann sphere: South uses the coordinate z, North the
/// coordinate 1/z. Integrands are evaluated in the chart the grid lives in.
enum class Chart { South, North };

/// Gauss–Legendre nodes and weights on the open interval (0,1).
/// Nodes come from Newton iteration on the Legendre recurrence and are
/// accurate to machine precision; weights sum to 1 up to rounding.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre_01(int n);

/// One quadrature node of the product grid: a chart coordinate together with
/// the plane-measure weight (the density of the target form is multiplied in
/// separately by integration routines).
struct QuadNode {
  std::complex<double> z;  ///< chart coordinate (never 0 or infinity)
  double weight;           ///< weight for ∫ f(z) dx dy in the chart
};

/// Product quadrature over one affine chart: Gauss–Legendre in the
/// compactified radial variable u = r²/(1+r²) times uniform angles
/// (spectrally exact for trigonometric polynomials). The plane-measure
/// weight of node (u_j, θ_m) is glw_j / (2(1−u_j)²) · (2π/M).
class QuadratureGrid {
 public:
  /// Builds a grid and runs the construction self-test: all weights positive,
  /// radial weights summing to 1 (equivalently, the unit-mass round form
  /// integrates to 1 up to rounding).
  static QuadratureGrid make(int radial, int angular, Chart chart = Chart::South,
                             double tol = config::kDefaultQuadTol);

  /// Default layout for degree k: 64 radial nodes, max(64, 4k+8) angles.
  static QuadratureGrid for_degree(int k, Chart chart = Chart::South,
                                   double tol = config::kDefaultQuadTol);

  /// Grid with doubled radial and angular resolution (used by self-checks).
  QuadratureGrid doubled() const;

  std::size_t node_count() const { return radial_nodes_.size() * angular_count_; }
  QuadNode node(std::size_t index) const;

  int radial_count() const { return static_cast<int>(radial_nodes_.size()); }
  int angular_count() const { return angular_count_; }
  Chart chart() const { return chart_; }
  double tol() const { return tol_; }
  const std::vector<double>& radial_nodes() const { return radial_nodes_; }
  const std::vector<double>& radial_weights() const { return radial_weights_; }

 private:
  QuadratureGrid() = default;
  std::vector<double> radial_nodes_;    // u_j in (0,1)
  std::vector<double> radial_weights_;  // Gauss–Legendre weights on (0,1)
  int angular_count_ = 0;
  Chart chart_ = Chart::South;
  double tol_ = config::kDefaultQuadTol;
};

/// Compensated (Kahan) scalar accumulator for deterministic summation.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

}  // namespace bflow

#include "bflow/moment.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bflow/errors.hpp"
#include "bflow/parallel.hpp"

namespace bflow {

namespace {

// One quadrature pass of the Gram matrix on a fixed grid (no self-check):
// M += w·λ·(v̂ v̂*), accumulated in fixed-order chunks.
Matrix gram_pass(const Matrix& coeffs, int k, const QuadratureGrid& g) {
  const int n = k + 1;
  Matrix total = Matrix::Zero(n, n);
  std::function<void(std::size_t, std::size_t, Matrix&)> chunk =
      [&](std::size_t begin, std::size_t end, Matrix& acc) {
        if (acc.size() == 0) acc = Matrix::Zero(n, n);
        for (std::size_t i = begin; i < end; ++i) {
          const QuadNode node = g.node(i);
          const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
          acc.noalias() += (node.weight * cd.density) *
                           (cd.v_unit * cd.v_unit.adjoint());
        }
      };
  std::function<void(Matrix&)> combine = [&](Matrix& p) {
    if (p.size() != 0) total += p;
  };
  chunked_reduce<Matrix>(g.node_count(), config::kReduceChunk, chunk, combine);
  // The accumulated matrix is hermitian up to rounding; make it exact.
  return 0.5 * (total + total.adjoint().eval());
}

GramReport decompose(int k, Matrix gram) {
  const double scalar = gram.real().trace() / static_cast<double>(k + 1);
  HermitianTraceless traceless = project_traceless(gram);
  const double residual = traceless.hs_norm();
  return GramReport{k, std::move(gram), scalar, std::move(traceless), residual};
}

}  // namespace

GramReport gram_matrix(const SectionBasis& b, const QuadratureGrid& g,
                       SelfCheck check) {
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  auto eval = [&](const QuadratureGrid& grid) {
    return gram_pass(coeffs, b.k(), grid);
  };
  if (check == SelfCheck::Off) return decompose(b.k(), eval(g));
  Matrix gram = detail::self_checked<Matrix>(
      g, eval,
      [](const Matrix& fine, const Matrix& coarse) {
        return (fine - coarse).norm();
      },
      [](const Matrix& fine) { return fine.norm(); }, "gram_matrix");
  return decompose(b.k(), std::move(gram));
}

HermitianTraceless moment_map(const SectionBasis& b, const QuadratureGrid& g,
                              SelfCheck check) {
  return gram_matrix(b, g, check).traceless_part;
}

double balanced_residual(const SectionBasis& b, const QuadratureGrid& g,
                         SelfCheck check) {
  return gram_matrix(b, g, check).residual_norm;
}

std::pair<double, double> r_bounded_diagnostic(const SectionBasis& b,
                                               const QuadratureGrid& g) {
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  const int k = b.k();
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  const std::size_t count = g.node_count();
  for (std::size_t i = 0; i < count; ++i) {
    const QuadNode node = g.node(i);
    const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
    // Reference density of the mass-k round form at the same chart point.
    const double denom = 1.0 + std::norm(node.z);
    const double ref = k / (std::numbers::pi * denom * denom);
    const double ratio = cd.density / ref;
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
  }
  return {rmin, rmax};
}

}  // namespace bflow

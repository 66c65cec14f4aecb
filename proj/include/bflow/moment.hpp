#pragma once

#include <utility>

#include "bflow/sections.hpp"

namespace bflow {

/// Gram matrix of the sections in the basis-induced metric together with its
/// scalar/traceless decomposition:
///   gram_αβ = ∫ s_α s̄_β / (Σ_j |s_j|²) · (pulled-back area form),
/// scalar_part = trace/(N+1) (identically k/(k+1) at exact balance),
/// traceless_part the moment-map value, residual_norm its HS norm.
/// gram = scalar_part·I + traceless_part holds exactly by construction.
struct GramReport {
  int k;
  Matrix gram;
  double scalar_part;
  HermitianTraceless traceless_part;
  double residual_norm;
};

/// Computes the Gram matrix by deterministic quadrature. Hermitian within
/// 1e-12 (symmetrized on output), trace = k within quadrature tolerance,
/// unitarily equivariant: gram(u·B) = u·gram(B)·u*.
GramReport gram_matrix(const SectionBasis& b, const QuadratureGrid& g,
                       SelfCheck check = SelfCheck::On);

/// Moment-map value of a basis: the traceless part of its Gram matrix.
/// Vanishes (≤ 1e-9 on adequate grids) exactly at balanced bases;
/// equivariant under unitary rotations; invariant under global rescaling.
HermitianTraceless moment_map(const SectionBasis& b, const QuadratureGrid& g,
                              SelfCheck check = SelfCheck::On);

/// Hilbert–Schmidt distance of the Gram matrix from scalar. The pointwise
/// norm-sum condition of balance holds identically in this representation
/// (the induced metric normalizes Σ|s_j|² to 1 pointwise), so this residual
/// measures the diagonal/Gram condition alone.
double balanced_residual(const SectionBasis& b, const QuadratureGrid& g,
                         SelfCheck check = SelfCheck::On);

/// Metric-equivalence diagnostic: min and max over the grid nodes (in the
/// grid's chart) of λ_B(z)/λ_ref(z), the ratio of the basis-induced density
/// to the reference density k/(π(1+|z|²)²) of the rescaled round metric.
/// Identity and unitarily rotated bases give (1, 1); a basis is metrically
/// R-bounded at level R when r_min > 1/R and r_max < R. (Higher-derivative
/// closeness is *not* measured here — this covers the two-sided metric
/// comparison only.)
std::pair<double, double> r_bounded_diagnostic(const SectionBasis& b,
                                               const QuadratureGrid& g);

}  // namespace bflow

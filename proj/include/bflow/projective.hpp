#pragma once

#include "bflow/lie.hpp"

namespace bflow {

/// Point of complex projective space in homogeneous coordinates. Every
/// operation on points is invariant under homog ↦ λ·homog (λ ≠ 0); no
/// normalization is ever applied, which keeps rational inputs exact.
struct ProjectivePoint {
  Vector homog;
  explicit ProjectivePoint(Vector v);
};

/// Tangent vector at a projective point, represented as the pair (v, dir)
/// modulo dir ↦ dir + μ·v. Pairings on this type are invariant under that
/// equivalence and under rescaling of the base representative.
struct TangentAtPoint {
  ProjectivePoint base;
  Vector dir;
};

/// Fubini–Study hermitian form on tangent vectors at a common base point:
///   ⟨X, Y⟩ = s · [(v*v)(b*a) − (b*v)(v*a)] / (v*v)²
/// for X = (v, a), Y = (v, b), with the global scale s = config::kFsInnerScale.
/// Hermitian in (X, Y), positive semidefinite, zero when a ∝ v.
/// Throws BasePointMismatch when the base points differ projectively.
Complex fs_tangent_inner(const TangentAtPoint& x, const TangentAtPoint& y);

/// Convenience: real squared norm ⟨X, X⟩.
double fs_tangent_norm_sq(const TangentAtPoint& x);

/// Holomorphic vector field generated by a hermitian-picture Lie element:
/// X_A at the point v is the class of (v, A·v).
TangentAtPoint vector_field_at(const HermitianTraceless& a,
                               const ProjectivePoint& p);

/// Logarithmic velocity of the one-parameter orbit exp(tA)·v:
///   φ̇_t(v) = 2 · (v* e^{2tA} A v) / (v* e^{2tA} v),
/// i.e. d/dt log |e^{tA} v|². Real-valued and scale-invariant.
double phi_dot(const HermitianTraceless& a, double t, const ProjectivePoint& p);

/// Same quantity with the exponential exp(tA) supplied by the caller; used by
/// integration loops that amortize one eigendecomposition across grid nodes.
double phi_dot_with(const GroupElement& exp_ta, const HermitianTraceless& a,
                    const ProjectivePoint& p);

}  // namespace bflow

#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "bflow/config.hpp"

namespace bflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Element of the hermitian picture of su(N+1): a hermitian traceless matrix
/// A (= i·ξ for ξ anti-hermitian). All flows, pairings and norms in the
/// library act on this picture, so stored data is real-spectral throughout.
/// The constructor enforces the representation invariants: entries hermitian
/// within a structural tolerance (then symmetrized exactly) and trace below
/// 1e-12 relative to the entry scale.
class HermitianTraceless {
 public:
  explicit HermitianTraceless(Matrix m,
                              double herm_tol = config::kStructuralTol);

  const Matrix& mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

  /// Hilbert–Schmidt norm √(trace(A·A)) = √(Σ |entries|²).
  double hs_norm() const;

  HermitianTraceless scaled(double factor) const;

 private:
  Matrix mat_;
};

/// Invertible group element acting on section bases from the left.
/// When produced by mat_exp of a traceless generator, |det| is verified to be
/// within 1e-9 of 1.
struct GroupElement {
  Matrix mat;
};

/// Trace-free projection C ↦ C − (trace(C)/dim)·I of a hermitian matrix.
/// The input must be hermitian within herm_tol (NotHermitian otherwise);
/// it is symmetrized to its hermitian part before projecting so the result
/// satisfies the type invariants exactly. Idempotent.
HermitianTraceless project_traceless(const Matrix& c,
                                     double herm_tol = config::kStructuralTol);

/// Invariant Hilbert–Schmidt pairing trace(A·B); symmetric, positive definite.
/// Throws DimMismatch on unequal dimensions.
double hs_inner(const HermitianTraceless& a, const HermitianTraceless& b);

/// Exponential mode: Positive gives exp(tA) (positive definite for real t),
/// Unitary gives exp(itA).
enum class ExpMode { Positive, Unitary };

/// Matrix exponential of a hermitian generator via eigendecomposition
/// (exact on diagonal input, unitarity guaranteed in Unitary mode).
/// Satisfies exp(0·A) = I and the semigroup law within 1e-10.
GroupElement mat_exp(const HermitianTraceless& a, double t,
                     ExpMode mode = ExpMode::Positive);

/// Orthonormal basis of the hermitian traceless space of the given dimension:
/// symmetric pairs (E_ab + E_ba)/√2, antisymmetric pairs i(E_ab − E_ba)/√2
/// with the +i placed above the diagonal, and the diagonal ladder
/// diag(1,…,1,−m,0,…)/√(m(m+1)). Gram matrix under hs_inner is the identity
/// to machine precision. Size dim²−1.
std::vector<HermitianTraceless> lie_basis(int dim);

/// Hermitian generators J_x, J_y, J_z of the spin-k/2 irreducible
/// representation in the weighted-monomial frame: J_z = diag(i − k/2) and the
/// ladder combinations satisfying [J_x, J_y] = i·J_z. Each generates a flow
/// by Möbius transformations of the base curve.
std::array<HermitianTraceless, 3> aut_subalgebra(int k);

}  // namespace bflow

#pragma once

#include <functional>

#include "bflow/lie.hpp"
#include "bflow/quadrature.hpp"

namespace bflow {

/// Whether an integral-producing operation runs its grid-doubling self-check
/// (compare the result on the given grid against the doubled grid, throw
/// QuadratureUnderResolved when they disagree beyond the grid tolerance, and
/// return the doubled-grid value). Hot loops that have already certified the
/// grid may skip the check.
enum class SelfCheck { On, Off };

/// Ordered basis of the degree-k section space on the sphere, stored as an
/// invertible (k+1)×(k+1) coefficient matrix over the weighted-monomial
/// reference frame e_i(z) = √binom(k,i)·z^i. Row α holds the coordinates of
/// the α-th section. The identity matrix is exactly the balanced basis in
/// this frame, which gives flow tests an exact fixed point.
///
/// A basis and any global rescaling of it represent the same geometric point;
/// no operation normalizes the coefficients.
class SectionBasis {
 public:
  /// Validates shape ((k+1)×(k+1), finite) and conditioning: the smallest
  /// singular value must exceed 1e-12 times the largest (BasisSingular).
  static SectionBasis make(int k, Matrix coeffs);

  /// The reference (balanced) basis: identity coefficients.
  static SectionBasis identity(int k);

  /// Left action g·B of an invertible matrix on the basis; revalidated.
  SectionBasis transformed(const Matrix& g) const;

  int k() const { return k_; }
  int dim() const { return k_ + 1; }
  const Matrix& coeffs() const { return coeffs_; }

 private:
  SectionBasis(int k, Matrix coeffs) : k_(k), coeffs_(std::move(coeffs)) {}
  int k_;
  Matrix coeffs_;
};

/// Weighted-monomial frame m_i(z) = √binom(k,i)·z^i and its z-derivative.
/// For the identity basis Σ_i |m_i(z)|² = (1+|z|²)^k exactly.
Vector monomial_frame(int k, Complex z);
Vector monomial_frame_deriv(int k, Complex z);

/// Section values v(z) = coeffs · m(z) at a chart coordinate.
Vector evaluate_sections(const SectionBasis& b, Complex z);

/// Density λ(z) of the pulled-back form in the chart, computed from the
/// closed-form derivatives of log Σ_j |s_j(z)|² (never by finite differences):
/// λ = (‖v′‖²‖v‖² − |v*v′|²)/(π‖v‖⁴). Identity basis: k/(π(1+|z|²)²).
/// Total mass over the sphere is k for every valid basis.
double induced_metric_density(const SectionBasis& b, Complex z);

/// Deterministic quadrature of f against the pulled-back area form in the
/// grid's chart: Σ weights · f(z) · λ(z), fixed node order, compensated
/// chunked summation. With SelfCheck::On the result is certified by grid
/// doubling (QuadratureUnderResolved on disagreement) and the doubled-grid
/// value is returned.
double integrate(const std::function<double(Complex)>& f, const SectionBasis& b,
                 const QuadratureGrid& g, SelfCheck check = SelfCheck::On);

/// Complex-valued variant of integrate.
Complex integrate_complex(const std::function<Complex(Complex)>& f,
                          const SectionBasis& b, const QuadratureGrid& g,
                          SelfCheck check = SelfCheck::On);

/// Exact closed-form radial moment ∫₀^∞ t^a/(1+t)^b dt = a!(b−a−2)!/(b−1)!
/// for integers b ≥ a+2, a ≥ 0 (DivergentIntegral otherwise). Computed as an
/// exact telescoping product; serves as the independent oracle for quadrature
/// certification.
double beta_oracle(int a, int b);

namespace detail {

/// Per-node geometry of the embedded curve, with the section vector scaled to
/// unit length immediately (denominators at large |z| stay bounded).
struct CurveData {
  Vector v_unit;      ///< v/‖v‖
  Vector dv_scaled;   ///< v′/‖v‖
  Vector tangent;     ///< T = dv_scaled − v_unit·(v_unit† dv_scaled)
  double tangent_sq;  ///< ‖T‖² = π·density
  double density;     ///< chart density of the pulled-back form
};

CurveData curve_data(const Matrix& coeffs, int k, Complex z);

/// Chart view of the coefficients: South is the matrix itself; North reverses
/// the columns, which is exact because binom(k,i) = binom(k,k−i) makes the
/// homogenized sections polynomials over the same weighted frame in 1/z.
Matrix chart_coeffs(const SectionBasis& b, Chart chart);
Matrix chart_coeffs(const Matrix& coeffs, Chart chart);

/// Runs eval on the grid and on the doubled grid; returns the doubled-grid
/// value unless the two disagree by more than grid.tol (relative to
/// max(1, scale)), in which case QuadratureUnderResolved is thrown.
/// eval: (const QuadratureGrid&) -> T; diff: (fine, coarse) -> double;
/// scale: (fine) -> double.
template <class T, class Eval, class Diff, class Scale>
T self_checked(const QuadratureGrid& g, Eval eval, Diff diff, Scale scale,
               const char* what);

}  // namespace detail

}  // namespace bflow

// ---- template implementation ------------------------------------------------

#include <cstdio>

#include "bflow/errors.hpp"

namespace bflow::detail {

template <class T, class Eval, class Diff, class Scale>
T self_checked(const QuadratureGrid& g, Eval eval, Diff diff, Scale scale,
               const char* what) {
  T coarse = eval(g);
  T fine = eval(g.doubled());
  const double denom = std::max(1.0, scale(fine));
  const double drift = diff(fine, coarse) / denom;
  if (!(drift <= g.tol())) {
    char msg[256];
    std::snprintf(msg, sizeof(msg),
                  "%s: grid doubling moved the result by %.3g (relative), "
                  "tolerance %.3g; increase --radial/--angular or loosen the "
                  "grid tolerance",
                  what, drift, g.tol());
    throw QuadratureUnderResolved(msg);
  }
  return fine;
}

}  // namespace bflow::detail

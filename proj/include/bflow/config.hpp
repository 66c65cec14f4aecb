#pragma once

namespace bflow::config {

/// Library version embedded in every report.
inline constexpr const char* kVersion = "0.1.0";

/// Global scale of the Fubini–Study tangent form used by fs_tangent_inner.
///
/// The value is pinned by a consistency identity rather than chosen freely:
/// with the pulled-back form normalized to total mass k, the second t-derivative
/// of the one-parameter energy along a generator A must equal twice the
/// quadratic form assembled from normal projections, d²E/dt² = 2·Q(A,A).
/// Matching the A-quadratic coefficients forces the scale to 2; the
/// finite-difference cross-check of that identity runs in the test suite and
/// keeps the constant honest. All scaling-exponent conclusions are invariant
/// under this constant (it cancels in every ratio of like quantities).
inline constexpr double kFsInnerScale = 2.0;

/// Structural tolerance for hermiticity gates and similar shape checks.
inline constexpr double kStructuralTol = 1e-10;

/// Tracelessness is enforced relative to the entry scale at this factor.
inline constexpr double kTraceTolFactor = 1e-12;

/// Determinant drift allowed for exponentials of traceless generators.
inline constexpr double kDetTol = 1e-9;

/// Default quadrature layout: Gauss–Legendre nodes in the compactified
/// radial variable u = r²/(1+r²), uniform angles. The angular count scales
/// with the polynomial degree so trigonometric integrands stay exact.
inline constexpr int kDefaultRadialNodes = 64;
inline constexpr int kDefaultAngularFloor = 64;
inline int default_angular_count(int k) {
  const int needed = 4 * k + 8;
  return needed > kDefaultAngularFloor ? needed : kDefaultAngularFloor;
}

/// Tolerance for the grid-doubling self-check performed by integral-producing
/// operations. 1e-8 sits above the measured doubling drift (~1e-9) of the
/// default grid on strongly perturbed bases while still failing loudly on
/// genuinely coarse grids.
inline constexpr double kDefaultQuadTol = 1e-8;

/// Chunk length of the deterministic reduction. Accumulation is performed in
/// fixed-size index chunks combined in chunk order, so results are
/// bit-identical for every worker count.
inline constexpr int kReduceChunk = 1024;

/// Gradient-flow defaults. The moment-map linearization at a balanced point
/// has spectrum bounded by the tangent-form scale (< 2), so a step of 0.5
/// contracts every mode; the backtracking line search covers the nonlinear
/// regime far from the fixed point.
inline constexpr double kDefaultFlowStep = 0.5;
inline constexpr double kDefaultFlowTol = 1e-8;
inline constexpr int kDefaultMaxIter = 500;
inline constexpr int kMaxBacktracks = 30;

/// Residual below which a basis is treated as already balanced by flow steps.
inline constexpr double kBalancedShortCircuit = 1e-12;

/// Spectrum kernel threshold: eigenvalues below
/// max(kKernelThresholdFactor · λ_max, kKernelAbsFloor) count as kernel.
/// The absolute floor classifies the all-degenerate k = 1 spectrum sanely.
inline constexpr double kKernelThresholdFactor = 1e-10;
inline constexpr double kKernelAbsFloor = 1e-12;

/// Finite-difference defaults for energy derivatives.
inline constexpr double kFdFirstStep = 1e-4;
inline constexpr double kFdSecondStep = 1e-3;

/// Environment variable consulted when no explicit worker count is given.
inline constexpr const char* kThreadsEnvVar = "BALANCEDFLOW_THREADS";

}  // namespace bflow::config

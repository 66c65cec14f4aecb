#pragma once

#include "bflow/moment.hpp"

namespace bflow {

/// One-parameter orbit of a section basis: the basis at parameter t is
/// exp(t·generator)·basis. The unitary direction exp(it·generator) leaves all
/// energies constant, so only the positive direction carries information.
struct FlowLine {
  SectionBasis basis;
  HermitianTraceless generator;
  double t = 0.0;
};

/// Change-of-metric energy accumulated along the orbit from 0 to t:
///   E(t) = ½ ∫ φ_t · (ω_t + ω_0),  φ_t(z) = log(v* e^{2tA} v / v* v),
/// with ω_t the pulled-back area form of the flowed basis. Properties (all
/// exercised in tests): E(0) = 0; E ≡ 0 along unitary directions; exact
/// cocycle law E_{0→t₁+t₂} = E_{0→t₁} + E_{t₁→t₁+t₂}; dE/dt = 2·tr(A·gram_t);
/// convex in t.
double deligne_energy_delta(const FlowLine& f, const QuadratureGrid& g,
                            SelfCheck check = SelfCheck::On);

/// First derivative dE/dt at the line's parameter, computed as the quadrature
/// of the logarithmic velocity against the flowed form: ∫ φ̇_t ω_t. The test
/// suite cross-checks it against the independent trace route 2·tr(A·gram_t)
/// and against central differences of the energy.
double energy_first_derivative(const FlowLine& f, const QuadratureGrid& g,
                               SelfCheck check = SelfCheck::On);

/// Finite-difference options for the second derivative.
struct FdOptions {
  double step = config::kFdSecondStep;  ///< base central-difference step
  bool richardson = true;               ///< one Richardson extrapolation level
};

/// Second derivative d²E/dt² at the line's parameter by central second
/// differences (with optional Richardson refinement). Nonnegative up to
/// noise (convexity); at t = 0 on a balanced basis it equals twice the
/// normal-projection form Q(A,A) — the identity that pins the global
/// tangent-form scale.
double energy_second_derivative(const FlowLine& f, const QuadratureGrid& g,
                                const FdOptions& fd = {},
                                SelfCheck check = SelfCheck::On);

}  // namespace bflow

#pragma once

#include <vector>

#include "bflow/moment.hpp"

namespace bflow {

/// One accepted iteration of the balancing flow.
struct FlowStepRecord {
  int iter;
  double residual;   ///< HS norm of the moment-map value after the step
  double step_used;  ///< step size accepted by the backtracking search
};

/// Result of balance(): the balanced basis and the monotone residual trace
/// (the first record is the starting residual with step 0).
struct BalanceResult {
  SectionBasis basis;
  std::vector<FlowStepRecord> trace;
};

/// One discretized downward step of the gradient flow of the squared
/// moment-map norm: B ← exp(−step·E)·B with E the moment-map value of B.
/// The step is halved (at most 30 times) until the residual decreases
/// (LineSearchFailed otherwise). Bases whose residual already sits at the
/// quadrature noise floor are returned unchanged (fixed points).
SectionBasis flow_step(const SectionBasis& b, double step,
                       const QuadratureGrid& g, SelfCheck check = SelfCheck::On);

/// Iterates flow_step until ‖moment_map‖ ≤ tol (strictly decreasing trace) or
/// max_iter is reached (MaxIterExceeded with the trace attached). The grid is
/// certified by the self-check on the first and final Gram evaluations; the
/// inner iterations reuse the certified grid without re-doubling.
/// The output Gram is scalar to within tol.
BalanceResult balance(const SectionBasis& b, double tol, int max_iter,
                      const QuadratureGrid& g,
                      double step0 = config::kDefaultFlowStep);

/// Accelerated alternative step B ← M^{−1/2}·B with M the Gram matrix;
/// fixed points coincide with balanced bases (up to global scale).
/// Throws GramNotPositive on loss of positive definiteness.
SectionBasis sqrt_balance_step(const SectionBasis& b, const QuadratureGrid& g,
                               SelfCheck check = SelfCheck::On);

}  // namespace bflow

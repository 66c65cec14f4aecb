#include "bflow/flow.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bflow/errors.hpp"

namespace bflow {

namespace {

struct Candidate {
  SectionBasis basis;
  GramReport gram;
  double step;
};

// Backtracking search from step0: halve until the residual strictly
// decreases. Candidate grams are evaluated without re-doubling (the caller
// certifies the grid once).
Candidate backtrack(const SectionBasis& b, const HermitianTraceless& e,
                    double current_residual, double step0,
                    const QuadratureGrid& g) {
  double s = step0;
  for (int attempt = 0; attempt < config::kMaxBacktracks; ++attempt) {
    SectionBasis stepped = b.transformed(mat_exp(e, -s).mat);
    GramReport gram = gram_matrix(stepped, g, SelfCheck::Off);
    if (gram.residual_norm < current_residual) {
      return Candidate{std::move(stepped), std::move(gram), s};
    }
    s *= 0.5;
  }
  throw LineSearchFailed(
      "flow: no residual decrease after " +
      std::to_string(config::kMaxBacktracks) +
      " halvings (quadrature noise floor reached or critical point)");
}

}  // namespace

SectionBasis flow_step(const SectionBasis& b, double step,
                       const QuadratureGrid& g, SelfCheck check) {
  if (!(step > 0.0)) throw std::invalid_argument("flow_step: step must be > 0");
  const GramReport gram = gram_matrix(b, g, check);
  if (gram.residual_norm <= config::kBalancedShortCircuit) return b;
  return backtrack(b, gram.traceless_part, gram.residual_norm, step, g).basis;
}

BalanceResult balance(const SectionBasis& b, double tol, int max_iter,
                      const QuadratureGrid& g, double step0) {
  if (!(tol > 0.0)) throw std::invalid_argument("balance: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("balance: max_iter must be >= 1");
  if (!(step0 > 0.0)) throw std::invalid_argument("balance: step0 must be > 0");

  // Entry Gram with the grid self-check: coarse grids fail loudly here.
  GramReport gram = gram_matrix(b, g, SelfCheck::On);
  BalanceResult result{b, {}};
  result.trace.push_back({0, gram.residual_norm, 0.0});
  if (gram.residual_norm <= tol) return result;

  std::vector<double> residuals{gram.residual_norm};
  for (int iter = 1; iter <= max_iter; ++iter) {
    Candidate cand = backtrack(result.basis, gram.traceless_part,
                               gram.residual_norm, step0, g);
    result.basis = std::move(cand.basis);
    gram = std::move(cand.gram);
    result.trace.push_back({iter, gram.residual_norm, cand.step});
    residuals.push_back(gram.residual_norm);
    if (gram.residual_norm <= tol) {
      // Exit certification: re-evaluate the final Gram with the self-check
      // so the reported terminal residual is grid-certified.
      const GramReport final_gram = gram_matrix(result.basis, g, SelfCheck::On);
      result.trace.back().residual = final_gram.residual_norm;
      return result;
    }
  }
  throw MaxIterExceeded(
      "balance: residual " + std::to_string(gram.residual_norm) +
          " above tolerance " + std::to_string(tol) + " after " +
          std::to_string(max_iter) + " iterations",
      std::move(residuals));
}

SectionBasis sqrt_balance_step(const SectionBasis& b, const QuadratureGrid& g,
                               SelfCheck check) {
  const GramReport report = gram_matrix(b, g, check);
  Eigen::SelfAdjointEigenSolver<Matrix> es(report.gram);
  const Eigen::VectorXd d = es.eigenvalues();
  if (!(d(0) > 1e-14 * d(d.size() - 1)) || !(d(0) > 0.0)) {
    throw GramNotPositive("sqrt_balance_step: Gram matrix not positive definite");
  }
  Eigen::VectorXd inv_sqrt(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(d[i]);
  const Matrix m_inv_sqrt = es.eigenvectors() *
                            inv_sqrt.asDiagonal().toDenseMatrix().cast<Complex>() *
                            es.eigenvectors().adjoint();
  return b.transformed(m_inv_sqrt);
}

}  // namespace bflow

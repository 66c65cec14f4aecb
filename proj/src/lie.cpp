#include "bflow/lie.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "bflow/errors.hpp"

namespace bflow {

namespace {

double max_abs_entry(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

void require_hermitian(const Matrix& m, double tol, const char* who) {
  if (m.rows() != m.cols()) {
    throw NotHermitian(std::string(who) + ": matrix is not square");
  }
  const double scale = std::max(1.0, max_abs_entry(m));
  const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol * scale) {
    throw NotHermitian(std::string(who) + ": hermitian deviation " +
                       std::to_string(dev) + " exceeds tolerance");
  }
}

}  // namespace

HermitianTraceless::HermitianTraceless(Matrix m, double herm_tol) {
  require_hermitian(m, herm_tol, "HermitianTraceless");
  // Exact symmetrization: the stored entries satisfy the invariant verbatim.
  mat_ = 0.5 * (m + m.adjoint().eval());
  const double scale = std::max(1.0, max_abs_entry(mat_));
  const double tr = std::abs(mat_.trace());
  if (tr > config::kTraceTolFactor * scale) {
    throw NotHermitian("HermitianTraceless: trace " + std::to_string(tr) +
                       " exceeds traceless tolerance");
  }
}

double HermitianTraceless::hs_norm() const { return mat_.norm(); }

HermitianTraceless HermitianTraceless::scaled(double factor) const {
  return HermitianTraceless(factor * mat_);
}

HermitianTraceless project_traceless(const Matrix& c, double herm_tol) {
  require_hermitian(c, herm_tol, "project_traceless");
  Matrix h = 0.5 * (c + c.adjoint().eval());
  const double mean = h.real().trace() / static_cast<double>(h.rows());
  h.diagonal().array() -= mean;
  return HermitianTraceless(std::move(h));
}

double hs_inner(const HermitianTraceless& a, const HermitianTraceless& b) {
  if (a.dim() != b.dim()) {
    throw DimMismatch("hs_inner: dimensions " + std::to_string(a.dim()) +
                      " vs " + std::to_string(b.dim()));
  }
  // trace(A·B) = Σ_ij A_ij conj(B_ij) for hermitian A, B; real by symmetry.
  return (a.mat().cwiseProduct(b.mat().conjugate())).sum().real();
}

GroupElement mat_exp(const HermitianTraceless& a, double t, ExpMode mode) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  const Eigen::VectorXd d = es.eigenvalues();
  const Matrix& u = es.eigenvectors();
  Vector phase(d.size());
  if (mode == ExpMode::Positive) {
    for (Eigen::Index i = 0; i < d.size(); ++i) phase[i] = std::exp(t * d[i]);
  } else {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      phase[i] = std::exp(Complex(0.0, t * d[i]));
    }
  }
  GroupElement g{u * phase.asDiagonal() * u.adjoint()};
  // det(exp(tA)) = exp(t·trace A); the generator is traceless, so |det| must
  // sit at 1. Verified from the eigenvalue sum (exact for this construction).
  const double log_abs_det =
      (mode == ExpMode::Positive) ? t * d.sum() : 0.0;
  if (std::abs(std::expm1(log_abs_det)) > config::kDetTol) {
    throw NotHermitian("mat_exp: determinant drifted from 1");
  }
  return g;
}

std::vector<HermitianTraceless> lie_basis(int dim) {
  if (dim < 2) throw DimMismatch("lie_basis: dim must be >= 2");
  std::vector<HermitianTraceless> out;
  out.reserve(static_cast<std::size_t>(dim) * dim - 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      Matrix s = Matrix::Zero(dim, dim);
      s(a, b) = inv_sqrt2;
      s(b, a) = inv_sqrt2;
      out.emplace_back(std::move(s));
      Matrix t = Matrix::Zero(dim, dim);
      t(a, b) = Complex(0.0, inv_sqrt2);   // +i above the diagonal
      t(b, a) = Complex(0.0, -inv_sqrt2);
      out.emplace_back(std::move(t));
    }
  }
  for (int m = 1; m < dim; ++m) {
    Matrix d = Matrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m) * (m + 1));
    for (int i = 0; i < m; ++i) d(i, i) = norm;
    d(m, m) = -static_cast<double>(m) * norm;
    out.emplace_back(std::move(d));
  }
  return out;
}

std::array<HermitianTraceless, 3> aut_subalgebra(int k) {
  if (k < 1) throw DimMismatch("aut_subalgebra: k must be >= 1");
  const int n = k + 1;
  // Spin j = k/2 ladder operator in the weighted-monomial frame:
  // (J_+)_{i+1,i} = sqrt((k−i)(i+1)), which generates Möbius flows of the
  // base coordinate when exponentiated on section coefficients.
  Matrix jplus = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    jplus(i + 1, i) = std::sqrt(static_cast<double>(k - i) * (i + 1));
  }
  const Matrix jminus = jplus.adjoint();
  Matrix jx = 0.5 * (jplus + jminus);
  Matrix jy = Complex(0.0, -0.5) * (jplus - jminus);
  Matrix jz = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) jz(i, i) = i - 0.5 * k;
  return {HermitianTraceless(std::move(jx)), HermitianTraceless(std::move(jy)),
          HermitianTraceless(std::move(jz))};
}

}  // namespace bflow

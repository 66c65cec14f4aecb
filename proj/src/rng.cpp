#include "bflow/rng.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "bflow/lie.hpp"

namespace bflow {

double Rng::uniform() {
  // 53 high bits of the 64-bit word, scaled into [0,1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gauss() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box–Muller; 1−u keeps the logarithm argument in (0,1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

HermitianTraceless random_hermitian(int dim, Rng& rng) {
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    m(i, i) = rng.gauss();
    for (int j = i + 1; j < dim; ++j) {
      const double re = rng.gauss();
      const double im = rng.gauss();
      m(i, j) = Complex(re, im) / std::sqrt(2.0);
      m(j, i) = std::conj(m(i, j));
    }
  }
  HermitianTraceless a = project_traceless(m);
  return a.scaled(1.0 / a.hs_norm());
}

Eigen::MatrixXcd random_unitary(int dim, Rng& rng) {
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      g(i, j) = Complex(rng.gauss(), rng.gauss());
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Phase fix: make the distribution Haar by absorbing the R diagonal phases.
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const Complex phase = (std::abs(d) > 0.0) ? d / std::abs(d) : Complex(1.0);
    q.col(j) *= phase;
  }
  return q;
}

}  // namespace bflow

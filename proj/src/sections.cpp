#include "bflow/sections.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

#include "bflow/errors.hpp"
#include "bflow/parallel.hpp"

namespace bflow {

SectionBasis SectionBasis::make(int k, Matrix coeffs) {
  if (k < 1) throw std::invalid_argument("SectionBasis: k must be >= 1");
  const int n = k + 1;
  if (coeffs.rows() != n || coeffs.cols() != n) {
    throw std::invalid_argument("SectionBasis: coefficients must be " +
                                std::to_string(n) + "x" + std::to_string(n));
  }
  if (!coeffs.allFinite()) {
    throw BasisSingular("SectionBasis: coefficients contain non-finite values");
  }
  Eigen::JacobiSVD<Matrix> svd(coeffs);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) {
    throw BasisSingular(
        "SectionBasis: coefficient matrix is numerically singular "
        "(condition beyond 1e12); the rows do not form a basis");
  }
  return SectionBasis(k, std::move(coeffs));
}

SectionBasis SectionBasis::identity(int k) {
  return make(k, Matrix::Identity(k + 1, k + 1));
}

SectionBasis SectionBasis::transformed(const Matrix& g) const {
  if (g.rows() != dim() || g.cols() != dim()) {
    throw DimMismatch("SectionBasis::transformed: matrix dim mismatch");
  }
  return make(k_, g * coeffs_);
}

Vector monomial_frame(int k, Complex z) {
  Vector m(k + 1);
  m[0] = 1.0;
  for (int i = 0; i < k; ++i) {
    // binom(k,i+1)/binom(k,i) = (k−i)/(i+1); carry the square root along.
    m[i + 1] = m[i] * z * std::sqrt(static_cast<double>(k - i) / (i + 1));
  }
  return m;
}

Vector monomial_frame_deriv(int k, Complex z) {
  Vector dm(k + 1);
  if (z == Complex(0.0)) {
    dm.setZero();
    dm[1] = std::sqrt(static_cast<double>(k));
    return dm;
  }
  const Vector m = monomial_frame(k, z);
  dm[0] = 0.0;
  for (int i = 1; i <= k; ++i) dm[i] = m[i] * (static_cast<double>(i) / z);
  return dm;
}

Vector evaluate_sections(const SectionBasis& b, Complex z) {
  return b.coeffs() * monomial_frame(b.k(), z);
}

double induced_metric_density(const SectionBasis& b, Complex z) {
  return detail::curve_data(b.coeffs(), b.k(), z).density;
}

namespace detail {

CurveData curve_data(const Matrix& coeffs, int k, Complex z) {
  CurveData out;
  const Vector m = monomial_frame(k, z);
  const Vector v = coeffs * m;
  const double s = v.norm();
  Vector dv;
  if (z == Complex(0.0)) {
    dv = coeffs * monomial_frame_deriv(k, z);
  } else {
    Vector dm(k + 1);
    dm[0] = 0.0;
    for (int i = 1; i <= k; ++i) dm[i] = m[i] * (static_cast<double>(i) / z);
    dv = coeffs * dm;
  }
  out.v_unit = v / s;
  out.dv_scaled = dv / s;
  const Complex overlap = out.v_unit.dot(out.dv_scaled);
  out.tangent = out.dv_scaled - overlap * out.v_unit;
  out.tangent_sq = out.tangent.squaredNorm();
  out.density = out.tangent_sq / std::numbers::pi;
  return out;
}

Matrix chart_coeffs(const Matrix& coeffs, Chart chart) {
  if (chart == Chart::South) return coeffs;
  return coeffs.rowwise().reverse();
}

Matrix chart_coeffs(const SectionBasis& b, Chart chart) {
  return chart_coeffs(b.coeffs(), chart);
}

namespace {

// Deterministic chunked Kahan quadrature of one real per-node integrand.
double reduce_real(const QuadratureGrid& g,
                   const std::function<double(const QuadNode&)>& per_node) {
  KahanSum total;
  std::function<void(std::size_t, std::size_t, KahanSum&)> chunk =
      [&](std::size_t begin, std::size_t end, KahanSum& acc) {
        for (std::size_t i = begin; i < end; ++i) acc.add(per_node(g.node(i)));
      };
  std::function<void(KahanSum&)> combine = [&](KahanSum& p) {
    total.add(p.sum);
    total.add(-p.comp);
  };
  chunked_reduce<KahanSum>(g.node_count(), config::kReduceChunk, chunk, combine);
  return total.value();
}

}  // namespace

}  // namespace detail

double integrate(const std::function<double(Complex)>& f, const SectionBasis& b,
                 const QuadratureGrid& g, SelfCheck check) {
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  const int k = b.k();
  auto eval = [&](const QuadratureGrid& grid) {
    return detail::reduce_real(grid, [&](const QuadNode& node) {
      const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
      return node.weight * cd.density * f(node.z);
    });
  };
  if (check == SelfCheck::Off) return eval(g);
  return detail::self_checked<double>(
      g, eval, [](double fine, double coarse) { return std::abs(fine - coarse); },
      [](double fine) { return std::abs(fine); }, "integrate");
}

Complex integrate_complex(const std::function<Complex(Complex)>& f,
                          const SectionBasis& b, const QuadratureGrid& g,
                          SelfCheck check) {
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  const int k = b.k();
  auto eval = [&](const QuadratureGrid& grid) {
    const double re = detail::reduce_real(grid, [&](const QuadNode& node) {
      const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
      return node.weight * cd.density * f(node.z).real();
    });
    const double im = detail::reduce_real(grid, [&](const QuadNode& node) {
      const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
      return node.weight * cd.density * f(node.z).imag();
    });
    return Complex(re, im);
  };
  if (check == SelfCheck::Off) return eval(g);
  return detail::self_checked<Complex>(
      g, eval,
      [](Complex fine, Complex coarse) { return std::abs(fine - coarse); },
      [](Complex fine) { return std::abs(fine); }, "integrate");
}

double beta_oracle(int a, int b) {
  if (a < 0) throw DivergentIntegral("beta_oracle: a must be >= 0");
  if (b < a + 2) {
    throw DivergentIntegral("beta_oracle: requires b >= a+2 for convergence");
  }
  // a!(b−a−2)!/(b−1)! = (1/(b−a−1)) · Π_{i=1..a} i/(b−a−1+i).
  long double value = 1.0L / static_cast<long double>(b - a - 1);
  for (int i = 1; i <= a; ++i) {
    value *= static_cast<long double>(i) / static_cast<long double>(b - a - 1 + i);
  }
  return static_cast<double>(value);
}

}  // namespace bflow

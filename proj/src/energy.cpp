#include "bflow/energy.hpp"

#include <cmath>
#include <numbers>

#include "bflow/errors.hpp"
#include "bflow/parallel.hpp"

namespace bflow {

namespace {

void require_dims(const FlowLine& f) {
  if (f.generator.dim() != f.basis.dim()) {
    throw DimMismatch("FlowLine: generator dim vs basis dim");
  }
}

// Density of the flowed basis at a node, from already chart-adjusted and
// unit-scaled curve data: w = E_t v̂, dw = E_t (dv/‖v‖).
double flowed_density(const Matrix& exp_ta, const detail::CurveData& cd,
                      Vector& w_out) {
  w_out.noalias() = exp_ta * cd.v_unit;
  Vector dw = exp_ta * cd.dv_scaled;
  const double nw2 = w_out.squaredNorm();
  const Complex overlap = w_out.dot(dw);
  const double t2 = (dw - (overlap / nw2) * w_out).squaredNorm() / nw2;
  return t2 / std::numbers::pi;
}

double reduce_real_nodes(const QuadratureGrid& g,
                         const std::function<double(const QuadNode&)>& f) {
  KahanSum total;
  std::function<void(std::size_t, std::size_t, KahanSum&)> chunk =
      [&](std::size_t begin, std::size_t end, KahanSum& acc) {
        for (std::size_t i = begin; i < end; ++i) acc.add(f(g.node(i)));
      };
  std::function<void(KahanSum&)> combine = [&](KahanSum& p) {
    total.add(p.sum);
    total.add(-p.comp);
  };
  chunked_reduce<KahanSum>(g.node_count(), config::kReduceChunk, chunk, combine);
  return total.value();
}

}  // namespace

double deligne_energy_delta(const FlowLine& f, const QuadratureGrid& g,
                            SelfCheck check) {
  require_dims(f);
  const Matrix coeffs = detail::chart_coeffs(f.basis, g.chart());
  const Matrix exp_ta = mat_exp(f.generator, f.t).mat;
  const int k = f.basis.k();
  auto eval = [&](const QuadratureGrid& grid) {
    return reduce_real_nodes(grid, [&](const QuadNode& node) {
      const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
      Vector w;
      const double density_t = flowed_density(exp_ta, cd, w);
      // φ_t = log(v* e^{2tA} v / v* v) = log ‖e^{tA} v̂‖².
      const double phi = std::log(w.squaredNorm());
      return 0.5 * node.weight * phi * (density_t + cd.density);
    });
  };
  if (check == SelfCheck::Off) return eval(g);
  return detail::self_checked<double>(
      g, eval, [](double a, double b) { return std::abs(a - b); },
      [](double a) { return std::abs(a); }, "deligne_energy_delta");
}

double energy_first_derivative(const FlowLine& f, const QuadratureGrid& g,
                               SelfCheck check) {
  require_dims(f);
  const Matrix coeffs = detail::chart_coeffs(f.basis, g.chart());
  const Matrix exp_ta = mat_exp(f.generator, f.t).mat;
  const Matrix& a = f.generator.mat();
  const int k = f.basis.k();
  auto eval = [&](const QuadratureGrid& grid) {
    return reduce_real_nodes(grid, [&](const QuadNode& node) {
      const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
      Vector w;
      const double density_t = flowed_density(exp_ta, cd, w);
      const double phidot = 2.0 * std::real(w.dot(a * w)) / w.squaredNorm();
      return node.weight * phidot * density_t;
    });
  };
  if (check == SelfCheck::Off) return eval(g);
  return detail::self_checked<double>(
      g, eval, [](double a_, double b_) { return std::abs(a_ - b_); },
      [](double a_) { return std::abs(a_); }, "energy_first_derivative");
}

double energy_second_derivative(const FlowLine& f, const QuadratureGrid& g,
                                const FdOptions& fd, SelfCheck check) {
  require_dims(f);
  if (!(fd.step > 0.0)) {
    throw std::invalid_argument("energy_second_derivative: step must be > 0");
  }
  auto energy_at = [&](double t) {
    return deligne_energy_delta({f.basis, f.generator, t}, g, check);
  };
  const double e0 = energy_at(f.t);
  auto central_second = [&](double h) {
    const double ep = energy_at(f.t + h);
    const double em = energy_at(f.t - h);
    return (ep - 2.0 * e0 + em) / (h * h);
  };
  const double d_h = central_second(fd.step);
  if (!fd.richardson) return d_h;
  const double d_half = central_second(0.5 * fd.step);
  // One Richardson level for the O(h²) truncation term.
  return (4.0 * d_half - d_h) / 3.0;
}

}  // namespace bflow

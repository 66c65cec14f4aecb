#include "bflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "bflow/errors.hpp"
#include "bflow/flow.hpp"
#include "bflow/parallel.hpp"
#include "bflow/rng.hpp"

namespace bflow {

namespace {

struct NormsPartial {
  KahanSum field;
  KahanSum tangent;
  KahanSum normal;
};

// Streaming pass over the grid: for each node project A·v̂ off the base
// direction, split it against the curve direction, and accumulate the three
// squared norms. The normal norm is integrated from the explicit residual
// vector (not as field − tangent), so the Pythagoras identity between the
// three outputs is a genuine floating-point check, not a tautology.
GeneratorNorms norms_pass(const Matrix& coeffs, const Matrix& a, int k,
                          const QuadratureGrid& g) {
  KahanSum field, tangent, normal;
  chunked_reduce<NormsPartial>(
      g.node_count(), config::kReduceChunk,
      [&](std::size_t begin, std::size_t end, NormsPartial& p) {
        for (std::size_t idx = begin; idx < end; ++idx) {
          const QuadNode node = g.node(idx);
          const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
          const double wt =
              node.weight * cd.density * config::kFsInnerScale;
          const Vector y = a * cd.v_unit;
          const Vector aperp = y - cd.v_unit * cd.v_unit.dot(y);
          const Complex overlap = cd.tangent.dot(aperp);
          const Vector residual =
              aperp - cd.tangent * (overlap / cd.tangent_sq);
          p.field.add(wt * aperp.squaredNorm());
          p.tangent.add(wt * std::norm(overlap) / cd.tangent_sq);
          p.normal.add(wt * residual.squaredNorm());
        }
      },
      [&](NormsPartial& p) {
        field.add(p.field.sum);
        field.add(-p.field.comp);
        tangent.add(p.tangent.sum);
        tangent.add(-p.tangent.comp);
        normal.add(p.normal.sum);
        normal.add(-p.normal.comp);
      });
  GeneratorNorms out;
  out.field_sq = field.value();
  out.tangent_sq = tangent.value();
  out.normal_sq = normal.value();
  return out;
}

struct TensorPartial {
  Matrix low_rank;   // Σ (G·G† + H·H†) over the chunk, (n²)×(n²)
  Matrix base_gram;  // Σ w·conj(v̂)·v̂ᵀ over the chunk, n×n
  bool init = false;
};

// Accumulates the node tensor Σ w·kron(P, R) with P = I − v̂v̂† − T̂T̂† (the
// pointwise normal projector) and R = conj(v̂)·v̂ᵀ, using the rank-one
// structure kron(P, R) = kron(I, R) − g·g† − h·h† with g = vec(conj(v̂)·v̂ᵀ)
// and h = vec(conj(v̂)·T̂ᵀ). Each chunk batches its g/h columns into one
// matrix product, so the whole pass runs at matrix-multiplication speed while
// the chunked combination stays bit-deterministic.
Matrix q_tensor_pass(const Matrix& coeffs, int k, const QuadratureGrid& g) {
  const int n = k + 1;
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  Matrix low_rank = Matrix::Zero(nn, nn);
  Matrix base_gram = Matrix::Zero(n, n);
  chunked_reduce<TensorPartial>(
      g.node_count(), config::kReduceChunk,
      [&](std::size_t begin, std::size_t end, TensorPartial& p) {
        const Eigen::Index m = static_cast<Eigen::Index>(end - begin);
        Matrix gfac(nn, m);
        Matrix hfac(nn, m);
        Matrix s_chunk = Matrix::Zero(n, n);
        Matrix outer(n, n);
        for (std::size_t idx = begin; idx < end; ++idx) {
          const Eigen::Index col = static_cast<Eigen::Index>(idx - begin);
          const QuadNode node = g.node(idx);
          const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
          const double wt =
              node.weight * cd.density * config::kFsInnerScale;
          const double root = std::sqrt(wt);
          const Vector vconj = cd.v_unit.conjugate();
          outer.noalias() = vconj * cd.v_unit.transpose();
          s_chunk.noalias() += wt * outer;
          gfac.col(col) = root * Eigen::Map<const Vector>(outer.data(), nn);
          const Vector that = cd.tangent / std::sqrt(cd.tangent_sq);
          outer.noalias() = vconj * that.transpose();
          hfac.col(col) = root * Eigen::Map<const Vector>(outer.data(), nn);
        }
        p.low_rank.noalias() = gfac * gfac.adjoint();
        p.low_rank.noalias() += hfac * hfac.adjoint();
        p.base_gram = std::move(s_chunk);
        p.init = true;
      },
      [&](TensorPartial& p) {
        if (!p.init) return;
        low_rank += p.low_rank;
        base_gram += p.base_gram;
      });
  Matrix tensor = -low_rank;
  for (int blk = 0; blk < n; ++blk) {
    tensor.block(static_cast<Eigen::Index>(blk) * n,
                 static_cast<Eigen::Index>(blk) * n, n, n) += base_gram;
  }
  return tensor;
}

// Contracts the accumulated tensor against the orthonormal generator basis:
// Q[i][j] = Re Σ_{abcd} (A_j)_{ab} tensor[(b·n+a),(c·n+d)] (A_i)_{cd}, which
// a column-major flattening turns into one three-matrix product.
Eigen::MatrixXd contract_q(const Matrix& tensor, int n) {
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const std::vector<HermitianTraceless> basis = lie_basis(n);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Matrix vleft(nn, dim);
  Matrix vright(nn, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const Matrix& mj = basis[static_cast<std::size_t>(j)].mat();
    vleft.col(j) = Eigen::Map<const Vector>(mj.data(), nn);
    const Matrix mjc = mj.conjugate();
    vright.col(j) = Eigen::Map<const Vector>(mjc.data(), nn);
  }
  const Matrix w = vleft.transpose() * tensor * vright;
  const Eigen::MatrixXd q = w.real().transpose();
  return 0.5 * (q + Eigen::MatrixXd(q.transpose()));
}

void require_same_dim(const HermitianTraceless& a, const SectionBasis& b,
                      const char* what) {
  if (a.dim() != b.dim()) {
    throw DimMismatch(std::string(what) + ": generator dimension " +
                      std::to_string(a.dim()) + " does not match basis " +
                      std::to_string(b.dim()));
  }
}

}  // namespace

std::pair<TangentAtPoint, TangentAtPoint> tangential_split(
    const HermitianTraceless& a, const SectionBasis& b, Complex z) {
  require_same_dim(a, b, "tangential_split");
  const detail::CurveData cd = detail::curve_data(b.coeffs(), b.k(), z);
  if (!(cd.tangent_sq > 0.0)) {
    throw BasisSingular("tangential_split: curve direction vanished");
  }
  const Vector y = a.mat() * cd.v_unit;
  const Vector aperp = y - cd.v_unit * cd.v_unit.dot(y);
  const Complex beta = cd.tangent.dot(aperp) / cd.tangent_sq;
  Vector tan_dir = beta * cd.tangent;
  Vector nor_dir = aperp - tan_dir;
  ProjectivePoint base(cd.v_unit);
  return {TangentAtPoint{base, std::move(tan_dir)},
          TangentAtPoint{base, std::move(nor_dir)}};
}

GeneratorNorms generator_norms(const HermitianTraceless& a,
                               const SectionBasis& b, const QuadratureGrid& g,
                               SelfCheck check) {
  require_same_dim(a, b, "generator_norms");
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  auto eval = [&](const QuadratureGrid& gg) {
    return norms_pass(coeffs, a.mat(), b.k(), gg);
  };
  GeneratorNorms out;
  if (check == SelfCheck::On) {
    out = detail::self_checked<GeneratorNorms>(
        g, eval,
        [](const GeneratorNorms& f, const GeneratorNorms& c) {
          return std::max({std::abs(f.field_sq - c.field_sq),
                           std::abs(f.tangent_sq - c.tangent_sq),
                           std::abs(f.normal_sq - c.normal_sq)});
        },
        [](const GeneratorNorms& f) {
          return std::max({std::abs(f.field_sq), std::abs(f.tangent_sq),
                           std::abs(f.normal_sq)});
        },
        "generator_norms");
  } else {
    out = eval(g);
  }
  const double xi = a.hs_norm();
  out.xi_sq = xi * xi;
  return out;
}

double sigma_norm_sq(const HermitianTraceless& a, const SectionBasis& b,
                     const QuadratureGrid& g, SelfCheck check) {
  return generator_norms(a, b, g, check).normal_sq;
}

Eigen::MatrixXd q_form_matrix(const SectionBasis& b, const QuadratureGrid& g,
                              SelfCheck check) {
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  const int n = b.dim();
  auto eval = [&](const QuadratureGrid& gg) {
    return contract_q(q_tensor_pass(coeffs, b.k(), gg), n);
  };
  if (check == SelfCheck::Off) return eval(g);
  return detail::self_checked<Eigen::MatrixXd>(
      g, eval,
      [](const Eigen::MatrixXd& f, const Eigen::MatrixXd& c) {
        return (f - c).norm();
      },
      [](const Eigen::MatrixXd& f) { return f.norm(); }, "q_form_matrix");
}

SpectrumReport q_gram(const SectionBasis& b, const QuadratureGrid& g,
                      const QGramOptions& opts) {
  const Eigen::MatrixXd q = q_form_matrix(b, g, opts.check);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  if (es.info() != Eigen::Success) {
    throw DegenerateSpectrum("q_gram: eigendecomposition failed");
  }
  const Eigen::VectorXd evals = es.eigenvalues();
  SpectrumReport report;
  report.k = b.k();
  report.eigenvalues.assign(evals.data(), evals.data() + evals.size());
  const double lam_max = std::max(evals(evals.size() - 1), 0.0);
  report.threshold =
      std::max(opts.threshold_factor * lam_max, config::kKernelAbsFloor);
  if (evals(0) < -report.threshold) {
    throw DegenerateSpectrum(
        "q_gram: negative eigenvalue " + std::to_string(evals(0)) +
        "; the normal-projection form must be positive semidefinite");
  }
  report.kernel_dim = static_cast<int>(
      std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(),
                    [&](double v) { return v < report.threshold; }));
  report.degenerate =
      report.kernel_dim == static_cast<int>(report.eigenvalues.size());
  if (report.degenerate) {
    if (b.k() >= 2) {
      throw DegenerateSpectrum(
          "q_gram: every eigenvalue fell below the kernel threshold at k = " +
          std::to_string(b.k()) +
          "; expected a 3-dimensional kernel and a positive remainder");
    }
  } else {
    report.lambda_z = 1.0 / report.eigenvalues[
        static_cast<std::size_t>(report.kernel_dim)];
  }
  if (opts.expected_kernel && report.kernel_dim != *opts.expected_kernel) {
    throw DegenerateSpectrum(
        "q_gram: kernel dimension " + std::to_string(report.kernel_dim) +
        " differs from the asserted " + std::to_string(*opts.expected_kernel) +
        " (threshold " + std::to_string(report.threshold) + ")");
  }
  return report;
}

InequalityConstants inequality_report(const SectionBasis& b,
                                      const QuadratureGrid& g, int samples,
                                      std::uint64_t seed) {
  const int k = b.k();
  if (k < 2) {
    throw std::invalid_argument(
        "inequality_report: needs k >= 2 (at k = 1 every generator is an "
        "automorphism direction)");
  }
  if (samples < 0) {
    throw std::invalid_argument("inequality_report: samples must be >= 0");
  }
  const int n = k + 1;

  InequalityConstants out;
  auto absorb = [&](const GeneratorNorms& nr) {
    const double norm_vs_field = nr.xi_sq / (k * nr.field_sq);
    const double defect =
        std::abs(nr.field_sq - nr.tangent_sq - nr.normal_sq) / nr.field_sq;
    const double tan_vs_nor = k * nr.normal_sq / nr.tangent_sq;
    if (out.samples == 0) {
      out.norm_vs_field_max = norm_vs_field;
      out.split_defect_max = defect;
      out.tangent_vs_normal_min = tan_vs_nor;
    } else {
      out.norm_vs_field_max = std::max(out.norm_vs_field_max, norm_vs_field);
      out.split_defect_max = std::max(out.split_defect_max, defect);
      out.tangent_vs_normal_min =
          std::min(out.tangent_vs_normal_min, tan_vs_nor);
    }
    ++out.samples;
  };

  // Forced distinguished sample first; its self-checked pass certifies the
  // grid for the cheaper unchecked samples below.
  const GeneratorNorms forced =
      generator_norms(remark2_xi(k), b, g, SelfCheck::On);
  out.remark2_tangent_ratio = k * forced.tangent_sq / forced.normal_sq;
  absorb(forced);

  std::vector<Matrix> jhat;
  for (const HermitianTraceless& j : aut_subalgebra(k)) {
    jhat.push_back(j.mat() / j.hs_norm());
  }
  auto inner = [](const Matrix& x, const Matrix& y) {
    return x.cwiseProduct(y.conjugate()).sum().real();
  };
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    Matrix m = random_hermitian(n, rng).mat();
    for (const Matrix& j : jhat) m -= inner(m, j) * j;
    const double norm = std::sqrt(inner(m, m));
    if (!(norm > 1e-8)) continue;  // sample fell into the automorphism span
    const HermitianTraceless sample(m / norm);
    absorb(generator_norms(sample, b, g, SelfCheck::Off));
  }
  return out;
}

namespace {

struct PoincarePartial {
  KahanSum lhs;
  KahanSum grad;
  KahanSum mean;
};

PoincarePair poincare_pass(const Matrix& coeffs, const Matrix& a, int k,
                           const QuadratureGrid& g) {
  KahanSum lhs, grad, mean;
  chunked_reduce<PoincarePartial>(
      g.node_count(), config::kReduceChunk,
      [&](std::size_t begin, std::size_t end, PoincarePartial& p) {
        for (std::size_t idx = begin; idx < end; ++idx) {
          const QuadNode node = g.node(idx);
          const detail::CurveData cd = detail::curve_data(coeffs, k, node.z);
          const double wt = node.weight * cd.density;
          const Vector y = a * cd.v_unit;
          const double psi = 2.0 * std::real(cd.v_unit.dot(y));
          const Vector aperp = y - cd.v_unit * cd.v_unit.dot(y);
          const Complex overlap = cd.tangent.dot(aperp);
          p.lhs.add(wt * psi * psi);
          p.grad.add(wt * 4.0 * std::norm(overlap) / cd.tangent_sq);
          p.mean.add(wt * psi);
        }
      },
      [&](PoincarePartial& p) {
        lhs.add(p.lhs.sum);
        lhs.add(-p.lhs.comp);
        grad.add(p.grad.sum);
        grad.add(-p.grad.comp);
        mean.add(p.mean.sum);
        mean.add(-p.mean.comp);
      });
  PoincarePair out;
  out.lhs = lhs.value();
  out.gradient_term = grad.value();
  out.mean = mean.value();
  out.rhs = k * out.gradient_term + out.mean * out.mean / k;
  return out;
}

}  // namespace

PoincarePair poincare_check(const SectionBasis& b, const HermitianTraceless& a,
                            const QuadratureGrid& g, SelfCheck check) {
  require_same_dim(a, b, "poincare_check");
  const Matrix coeffs = detail::chart_coeffs(b, g.chart());
  auto eval = [&](const QuadratureGrid& gg) {
    return poincare_pass(coeffs, a.mat(), b.k(), gg);
  };
  if (check == SelfCheck::Off) return eval(g);
  return detail::self_checked<PoincarePair>(
      g, eval,
      [](const PoincarePair& f, const PoincarePair& c) {
        return std::max({std::abs(f.lhs - c.lhs),
                         std::abs(f.gradient_term - c.gradient_term),
                         std::abs(f.mean - c.mean)});
      },
      [](const PoincarePair& f) {
        return std::max({std::abs(f.lhs), std::abs(f.gradient_term),
                         std::abs(f.mean)});
      },
      "poincare_check");
}

HermitianTraceless remark2_xi(int k) {
  if (k < 1) throw std::invalid_argument("remark2_xi: k must be >= 1");
  const int n = k + 1;
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i <= k; ++i) {
    // 6·ξ_ii is the integer 6i² − 6ki + k² − k; the integers sum to zero.
    const long long num =
        6LL * i * i - 6LL * k * i + static_cast<long long>(k) * k - k;
    m(i, i) = Complex(static_cast<double>(num) / 6.0, 0.0);
  }
  return HermitianTraceless(std::move(m));
}

QuadratureGrid GridPolicy::grid_for(int k) const {
  return QuadratureGrid::make(radial, std::max(angular_floor, 4 * k + 8),
                              Chart::South, tol);
}

ScalingTable scaling_experiment(const std::vector<int>& k_list,
                                const GridPolicy& policy, std::uint64_t seed,
                                double perturb) {
  ScalingTable table;
  Rng rng(seed);
  for (int k : k_list) {
    ScalingRow row;
    row.k = k;
    try {
      if (k < 1) throw std::invalid_argument("scaling: k must be >= 1");
      const QuadratureGrid grid = policy.grid_for(k);
      SectionBasis basis = SectionBasis::identity(k);
      if (perturb > 0.0) {
        const HermitianTraceless a = random_hermitian(k + 1, rng);
        basis = basis.transformed(mat_exp(a, perturb).mat);
        basis = balance(basis, config::kDefaultFlowTol,
                        config::kDefaultMaxIter, grid)
                    .basis;
      }
      QGramOptions opts;
      if (k >= 2) opts.expected_kernel = 3;
      const SpectrumReport rep = q_gram(basis, grid, opts);
      row.lambda_z = rep.lambda_z;
      row.kernel_dim = rep.kernel_dim;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  std::vector<double> lx, ly;
  for (const ScalingRow& row : table.rows) {
    if (row.error.empty() && row.lambda_z && *row.lambda_z > 0.0) {
      lx.push_back(std::log(static_cast<double>(row.k)));
      ly.push_back(std::log(*row.lambda_z));
    }
  }
  if (lx.size() >= 2 &&
      *std::max_element(lx.begin(), lx.end()) >
          *std::min_element(lx.begin(), lx.end())) {
    table.slope = ls_slope(lx, ly);
  }
  return table;
}

Remark2Table remark2_experiment(const std::vector<int>& k_list,
                                const GridPolicy& policy) {
  Remark2Table table;
  for (int k : k_list) {
    Remark2Row row;
    row.k = k;
    try {
      const QuadratureGrid grid = policy.grid_for(k);
      row.norms = generator_norms(remark2_xi(k), SectionBasis::identity(k),
                                  grid, SelfCheck::On);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  std::vector<double> ks, xi, field, tan, nor;
  for (const Remark2Row& row : table.rows) {
    if (row.error.empty() && row.norms.xi_sq > 0.0 &&
        row.norms.normal_sq > 0.0) {
      ks.push_back(static_cast<double>(row.k));
      xi.push_back(row.norms.xi_sq);
      field.push_back(row.norms.field_sq);
      tan.push_back(row.norms.tangent_sq);
      nor.push_back(row.norms.normal_sq);
    }
  }
  if (!ks.empty()) {
    table.xi_coeff = fit_coefficient(ks, xi, 5);
    table.field_coeff = fit_coefficient(ks, field, 4);
    table.tangent_coeff = fit_coefficient(ks, tan, 4);
  }
  if (ks.size() >= 2 && ks.front() != ks.back()) {
    std::vector<double> lk, lxi, lfield, ltan, lnor;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      lk.push_back(std::log(ks[i]));
      lxi.push_back(std::log(xi[i]));
      lfield.push_back(std::log(field[i]));
      ltan.push_back(std::log(tan[i]));
      lnor.push_back(std::log(nor[i]));
    }
    table.xi_exponent = ls_slope(lk, lxi);
    table.field_exponent = ls_slope(lk, lfield);
    table.tangent_exponent = ls_slope(lk, ltan);
    table.normal_exponent = ls_slope(lk, lnor);
  }
  return table;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument(
        "ls_slope: need two equally sized samples of at least two points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    throw std::invalid_argument("ls_slope: x values are constant");
  }
  return sxy / sxx;
}

double fit_coefficient(const std::vector<double>& k,
                       const std::vector<double>& y, int power) {
  if (k.size() != y.size() || k.empty()) {
    throw std::invalid_argument(
        "fit_coefficient: need equally sized, nonempty samples");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double xp = std::pow(k[i], power);
    num += y[i] * xp;
    den += xp * xp;
  }
  if (!(den > 0.0)) {
    throw std::invalid_argument("fit_coefficient: degenerate abscissae");
  }
  return num / den;
}

}  // namespace bflow

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bflow/config.hpp"
#include "bflow/lie.hpp"
#include "bflow/projective.hpp"
#include "bflow/sections.hpp"

namespace bflow {

/// Hilbert–Schmidt and L² norms attached to one traceless hermitian generator
/// along the embedded curve: the generator itself, its ambient vector field,
/// and the field's tangential / normal components with respect to the curve.
/// The three field norms carry one factor of the global tangent-form scale
/// (config::kFsInnerScale); the generator norm does not.
struct GeneratorNorms {
  double xi_sq = 0.0;       ///< ‖ξ‖² (Hilbert–Schmidt on matrices)
  double field_sq = 0.0;    ///< ∫ |X_ξ|² against the pulled-back area form
  double tangent_sq = 0.0;  ///< ∫ |tangential part of X_ξ|²
  double normal_sq = 0.0;   ///< ∫ |normal part of X_ξ|²
};

/// Empirical constants of the norm-comparison inequalities, aggregated over a
/// sample set of unit generators orthogonal to the automorphism subalgebra
/// (plus the distinguished diagonal generator of remark2_xi as a forced
/// sample). Each field records the best constant the samples allow:
///   norm_vs_field_max     — max ‖ξ‖²/(k·‖X_ξ‖²): smallest c with
///                           ‖ξ‖² ≤ c·k·‖X_ξ‖² on the samples;
///   split_defect_max      — max |‖X‖² − ‖tan‖² − ‖nor‖²| / ‖X‖²
///                           (orthogonal-decomposition defect);
///   tangent_vs_normal_min — min k·‖nor‖²/‖tan‖²: largest c with
///                           c·‖tan‖² ≤ k·‖nor‖² on the samples;
///   remark2_tangent_ratio — k·‖tan‖²/‖nor‖² for the distinguished diagonal
///                           generator; grows like k²/2, witnessing that the
///                           k² in the spectral-gap bound cannot be improved.
struct InequalityConstants {
  double norm_vs_field_max = 0.0;
  double split_defect_max = 0.0;
  double tangent_vs_normal_min = 0.0;
  double remark2_tangent_ratio = 0.0;
  int samples = 0;  ///< total generators evaluated (random + forced)
};

/// Spectrum of the normal-projection quadratic form on traceless hermitian
/// matrices. lambda_z is the reciprocal of the smallest eigenvalue above the
/// kernel threshold; it is empty when every eigenvalue lies below threshold
/// (the k = 1 sphere-onto-itself case, where the whole algebra consists of
/// automorphisms). The absolute scale of the eigenvalues carries the global
/// constant config::kFsInnerScale; ratios and growth exponents do not.
struct SpectrumReport {
  int k = 0;
  std::vector<double> eigenvalues;  ///< ascending, length (k+1)² − 1
  int kernel_dim = 0;               ///< count of eigenvalues below threshold
  std::optional<double> lambda_z;   ///< 1/(smallest eigenvalue above threshold)
  bool degenerate = false;          ///< all eigenvalues below threshold
  double threshold = 0.0;           ///< the kernel cutoff actually used
};

struct QGramOptions {
  /// Kernel cutoff = max(threshold_factor · largest eigenvalue, absolute
  /// floor config::kKernelAbsFloor).
  double threshold_factor = config::kKernelThresholdFactor;
  /// When set, a kernel of any other dimension raises DegenerateSpectrum
  /// (balanced embeddings with k ≥ 2 must have exactly the 3-dimensional
  /// rotation algebra in the kernel).
  std::optional<int> expected_kernel;
  SelfCheck check = SelfCheck::On;
};

/// Splits the vector field of A at the curve point over chart coordinate z
/// into a component along the curve direction and a component orthogonal to
/// it: X_A = tangent + normal as tangent classes at the embedded point, with
/// fs_tangent_inner(tangent, normal) = 0. For k = 1 the curve fills the
/// ambient space and the normal part vanishes identically.
std::pair<TangentAtPoint, TangentAtPoint> tangential_split(
    const HermitianTraceless& a, const SectionBasis& b, Complex z);

/// Integrated norms of A's vector field and its split along the whole curve.
GeneratorNorms generator_norms(const HermitianTraceless& a,
                               const SectionBasis& b, const QuadratureGrid& g,
                               SelfCheck check = SelfCheck::On);

/// L² norm squared of the normal component of X_A along the curve. At a
/// balanced basis this equals half the second t-derivative of the energy
/// along A (relative agreement 1e-5), which is the identity that pins the
/// global constant config::kFsInnerScale. Zero exactly on the automorphism
/// subalgebra at balanced points.
double sigma_norm_sq(const HermitianTraceless& a, const SectionBasis& b,
                     const QuadratureGrid& g, SelfCheck check = SelfCheck::On);

/// The real symmetric matrix of the normal-projection form over the standard
/// traceless hermitian basis of lie_basis(k+1):
///   Q[i][j] = ∫ Re⟨normal X_{A_i}, normal X_{A_j}⟩ against the area form.
Eigen::MatrixXd q_form_matrix(const SectionBasis& b, const QuadratureGrid& g,
                              SelfCheck check = SelfCheck::On);

/// Eigendecomposition of q_form_matrix with kernel bookkeeping. Throws
/// DegenerateSpectrum when k ≥ 2 yields an all-kernel spectrum or when
/// opts.expected_kernel is set and violated; the k = 1 all-kernel case is
/// reported (degenerate = true, lambda_z empty), not thrown.
SpectrumReport q_gram(const SectionBasis& b, const QuadratureGrid& g,
                      const QGramOptions& opts = {});

/// Norm-inequality constants over `samples` seeded unit generators orthogonal
/// to the automorphism subalgebra plus the forced remark2_xi sample.
/// Requires k ≥ 2 (for k = 1 there is no direction orthogonal to the
/// automorphisms).
InequalityConstants inequality_report(const SectionBasis& b,
                                      const QuadratureGrid& g, int samples,
                                      std::uint64_t seed);

/// Both sides of the embedded-curve Poincaré inequality for the field
/// function ψ = 2·Re(v̂*Av̂):
///   lhs = ∫ ψ² ω̃,   rhs = k·(gradient energy of ψ) + (∫ ψ ω̃)²/k,
/// where the gradient energy is the chart integral of |∂̄ψ|² against the
/// flat form, computed from the analytic derivative of ψ (no finite
/// differences). The offered test sets keep lhs ≤ rhs.
struct PoincarePair {
  double lhs = 0.0;
  double rhs = 0.0;
  double gradient_term = 0.0;  ///< the gradient energy before the k factor
  double mean = 0.0;           ///< ∫ ψ ω̃
};
PoincarePair poincare_check(const SectionBasis& b, const HermitianTraceless& a,
                            const QuadratureGrid& g,
                            SelfCheck check = SelfCheck::On);

/// The distinguished diagonal generator with entries
///   ξ_ii = i² − k·i + (k² − k)/6,   i = 0..k
/// (exactly traceless: the numerators 6i² − 6ki + k² − k are integers summing
/// to zero). Closed forms: ‖ξ‖² = (k−1)k(k+1)(k+2)(k+3)/180 ~ k⁵/180, while
/// its field norm grows like k⁴ and its normal norm only like k³ — the
/// witness that the spectral-gap growth exponent 2 is sharp.
HermitianTraceless remark2_xi(int k);

/// Grid construction policy for multi-k experiments: fixed radial count,
/// angular count max(angular_floor, 4k + 8).
struct GridPolicy {
  int radial = config::kDefaultRadialNodes;
  int angular_floor = config::kDefaultAngularFloor;
  double tol = config::kDefaultQuadTol;
  QuadratureGrid grid_for(int k) const;
};

/// One k-row of the spectral-gap scaling experiment. `error` is nonempty when
/// that k failed (the run continues with the remaining rows).
struct ScalingRow {
  int k = 0;
  std::optional<double> lambda_z;
  int kernel_dim = 0;
  std::string error;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  /// Least-squares slope of log lambda_z vs log k over the valid rows
  /// (needs at least two); empty otherwise.
  std::optional<double> slope;
};

/// For each k: balanced basis (optionally re-balanced from a seeded
/// perturbation of norm `perturb` to exercise the full pipeline) →
/// q_form_matrix spectrum → lambda_z. Per-k errors are recorded in the row.
ScalingTable scaling_experiment(const std::vector<int>& k_list,
                                const GridPolicy& policy = {},
                                std::uint64_t seed = 0, double perturb = 0.0);

/// One k-row of the distinguished-generator norm table.
struct Remark2Row {
  int k = 0;
  GeneratorNorms norms;
  std::string error;
};

/// Norm table of remark2_xi across k with least-squares fits of the leading
/// coefficients (xi against k⁵, field and tangent against k⁴) and log-log
/// growth exponents. The field/tangent/normal entries carry the global
/// constant config::kFsInnerScale; divide it out before comparing the
/// coefficients with scale-free predictions.
struct Remark2Table {
  std::vector<Remark2Row> rows;
  double xi_coeff = 0.0;       ///< c in ‖ξ‖² ≈ c·k⁵
  double field_coeff = 0.0;    ///< c in ‖X_ξ‖² ≈ c·k⁴ (includes the scale)
  double tangent_coeff = 0.0;  ///< c in ‖tan‖² ≈ c·k⁴ (includes the scale)
  double xi_exponent = 0.0;
  double field_exponent = 0.0;
  double tangent_exponent = 0.0;
  double normal_exponent = 0.0;
};
Remark2Table remark2_experiment(const std::vector<int>& k_list,
                                const GridPolicy& policy = {});

/// Least-squares slope of y against x (throws std::invalid_argument unless
/// both have the same size ≥ 2 and x is non-constant).
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Least-squares coefficient c minimizing Σ (y_i − c·k_i^power)²,
/// i.e. c = Σ y·k^p / Σ k^{2p}.
double fit_coefficient(const std::vector<double>& k,
                       const std::vector<double>& y, int power);

}  // namespace bflow

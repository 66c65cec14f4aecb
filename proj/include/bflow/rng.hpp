#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace bflow {

class HermitianTraceless;  // lie.hpp

/// Deterministic random source. The raw stream is std::mt19937_64 (whose
/// output sequence is pinned by the C++ standard); the uniform and normal
/// derivations are written out explicitly instead of using std::*_distribution
/// (whose algorithms are implementation-defined), so identical seeds produce
/// identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform();

  /// Standard normal via the explicit Box–Muller transform (cached spare).
  double gauss();

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Random hermitian traceless matrix with unit Hilbert–Schmidt norm
/// (Gaussian entries, symmetrized, trace-projected, normalized).
HermitianTraceless random_hermitian(int dim, Rng& rng);

/// Haar-distributed unitary via QR of a complex Gaussian matrix with the
/// standard phase fix on the R diagonal.
Eigen::MatrixXcd random_unitary(int dim, Rng& rng);

}  // namespace bflow

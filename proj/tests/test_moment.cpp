#include <cmath>
#include <utility>

#include "doctest.h"

#include "bflow/lie.hpp"
#include "bflow/moment.hpp"
#include "bflow/parallel.hpp"
#include "bflow/rng.hpp"
#include "test_helpers.hpp"

using namespace bflow;

TEST_SUITE("moment") {

TEST_CASE("identity basis has a scalar Gram matrix k/(k+1)") {
  for (int k : {1, 2, 5}) {
    const SectionBasis b = SectionBasis::identity(k);
    const QuadratureGrid g = QuadratureGrid::for_degree(k);
    const GramReport rep = gram_matrix(b, g);
    CHECK(rep.k == k);
    CHECK(rep.scalar_part ==
          doctest::Approx(k / (k + 1.0)).epsilon(1e-12));
    CHECK(rep.residual_norm < 1e-12);
    CHECK((rep.gram - rep.scalar_part * Matrix::Identity(k + 1, k + 1))
              .norm() < 1e-12);
    // The decomposition reassembles exactly.
    CHECK((rep.gram - (rep.scalar_part * Matrix::Identity(k + 1, k + 1) +
                       rep.traceless_part.mat()))
              .norm() < 1e-14);
  }
}

TEST_CASE("frozen residuals of the reference perturbation") {
  // exp(0.1·A_fix)·identity on the fixed 64x64 grid.
  const QuadratureGrid g = QuadratureGrid::make(64, 64);
  {
    const SectionBasis b = SectionBasis::identity(2).transformed(
        mat_exp(testutil::a_fix(3), 0.1).mat);
    CHECK(gram_matrix(b, g, SelfCheck::Off).residual_norm ==
          doctest::Approx(0.06465750394710648).epsilon(1e-10));
  }
  {
    const SectionBasis b = SectionBasis::identity(4).transformed(
        mat_exp(testutil::a_fix(5), 0.1).mat);
    CHECK(gram_matrix(b, g, SelfCheck::Off).residual_norm ==
          doctest::Approx(0.09281118933022844).epsilon(1e-10));
  }
}

TEST_CASE("gram matrix is unitarily equivariant") {
  const int k = 4;
  Rng rng(21);
  const SectionBasis b = SectionBasis::identity(k).transformed(
      mat_exp(random_hermitian(k + 1, rng).scaled(0.2), 1.0).mat);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  const Matrix m0 = gram_matrix(b, g, SelfCheck::Off).gram;
  for (int s = 0; s < 3; ++s) {
    const Matrix u = random_unitary(k + 1, rng);
    const Matrix m1 = gram_matrix(b.transformed(u), g, SelfCheck::Off).gram;
    CHECK((m1 - u * m0 * u.adjoint()).norm() < 1e-10);
  }
}

TEST_CASE("moment map vanishes exactly at balance and only there") {
  const QuadratureGrid g = QuadratureGrid::for_degree(3);
  CHECK(moment_map(SectionBasis::identity(3), g).hs_norm() < 1e-12);
  CHECK(balanced_residual(SectionBasis::identity(3), g) < 1e-12);

  const SectionBasis off = SectionBasis::identity(3).transformed(
      mat_exp(testutil::a_fix(4), 0.2).mat);
  CHECK(balanced_residual(off, g) > 1e-3);
}

TEST_CASE("moment map is invariant under global rescaling") {
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  const SectionBasis b = SectionBasis::identity(2).transformed(
      mat_exp(testutil::a_fix(3), 0.3).mat);
  const SectionBasis scaled_b =
      b.transformed(Matrix(3.7 * Matrix::Identity(3, 3)));
  CHECK((moment_map(b, g, SelfCheck::Off).mat() -
         moment_map(scaled_b, g, SelfCheck::Off).mat())
            .norm() < 1e-12);
}

TEST_CASE("frozen density-ratio extremes") {
  const QuadratureGrid g = QuadratureGrid::make(64, 64);
  // A unitary rotation is an isometry of the reference metric: ratio ≡ 1.
  const auto j = aut_subalgebra(2);
  const SectionBasis rotated = SectionBasis::identity(2).transformed(
      mat_exp(j[0], 0.3, ExpMode::Unitary).mat);
  const std::pair<double, double> unit = r_bounded_diagnostic(rotated, g);
  CHECK(unit.first == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(unit.second == doctest::Approx(1.0).epsilon(1e-12));

  // Frozen extremes for the reference non-unitary perturbation.
  const SectionBasis b = SectionBasis::identity(2).transformed(
      mat_exp(testutil::a_fix(3), 0.3).mat);
  const std::pair<double, double> r = r_bounded_diagnostic(b, g);
  CHECK(r.first == doctest::Approx(0.45084731464527705).epsilon(1e-10));
  CHECK(r.second == doctest::Approx(1.610502379467608).epsilon(1e-10));
  CHECK(r.first < r.second);
}

TEST_CASE("results are bit-identical across worker counts") {
  const SectionBasis b = SectionBasis::identity(5).transformed(
      mat_exp(testutil::a_fix(6), 0.2).mat);
  const QuadratureGrid g = QuadratureGrid::for_degree(5);
  set_thread_count(1);
  const GramReport one = gram_matrix(b, g, SelfCheck::Off);
  set_thread_count(4);
  const GramReport four = gram_matrix(b, g, SelfCheck::Off);
  set_thread_count(0);  // back to the environment/hardware default
  CHECK(one.residual_norm == four.residual_norm);  // exact equality
  CHECK((one.gram - four.gram).norm() == 0.0);
}

}  // TEST_SUITE

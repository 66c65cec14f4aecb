#include <cmath>

#include "doctest.h"

#include "bflow/energy.hpp"
#include "bflow/rng.hpp"
#include "bflow/spectral.hpp"
#include "test_helpers.hpp"

using namespace bflow;

TEST_SUITE("energy") {

TEST_CASE("frozen energy value on the distinguished diagonal line") {
  // k = 2, identity basis, the distinguished diagonal generator, t = 0.1,
  // fixed 64x64 grid.
  const QuadratureGrid g = QuadratureGrid::make(64, 64);
  const FlowLine f{SectionBasis::identity(2), remark2_xi(2), 0.1};
  CHECK(deligne_energy_delta(f, g, SelfCheck::Off) ==
        doctest::Approx(0.0054244244411201445).epsilon(1e-12));
}

TEST_CASE("energy vanishes at t = 0 and grows from a balanced point") {
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  const FlowLine zero{SectionBasis::identity(2), testutil::a_fix(3), 0.0};
  CHECK(std::abs(deligne_energy_delta(zero, g)) < 1e-12);
  const FlowLine up{SectionBasis::identity(2), testutil::a_fix(3), 0.4};
  const FlowLine down{SectionBasis::identity(2), testutil::a_fix(3), -0.4};
  CHECK(deligne_energy_delta(up, g) > 0.0);    // balanced point is the minimum
  CHECK(deligne_energy_delta(down, g) > 0.0);
}

TEST_CASE("first derivative equals the trace pairing with the Gram part") {
  const int k = 3;
  Rng rng(3);
  const HermitianTraceless a = random_hermitian(k + 1, rng);
  const SectionBasis b = SectionBasis::identity(k).transformed(
      mat_exp(random_hermitian(k + 1, rng).scaled(0.2), 1.0).mat);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);

  const double t0 = 0.15;
  const double analytic = energy_first_derivative({b, a, t0}, g);
  const SectionBasis flowed = b.transformed(mat_exp(a, t0).mat);
  const double trace_route =
      2.0 * hs_inner(a, gram_matrix(flowed, g).traceless_part);
  CHECK(analytic == doctest::Approx(trace_route).epsilon(1e-9));

  const double h = 1e-4;
  const double fd = (deligne_energy_delta({b, a, t0 + h}, g, SelfCheck::Off) -
                     deligne_energy_delta({b, a, t0 - h}, g, SelfCheck::Off)) /
                    (2.0 * h);
  CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("energy is additive along the flow (cocycle law)") {
  const int k = 2;
  const HermitianTraceless a = testutil::a_fix(k + 1);
  const SectionBasis b = SectionBasis::identity(k);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  const double t1 = 0.3, t2 = 0.25;

  const double e_total = deligne_energy_delta({b, a, t1 + t2}, g);
  const double e_first = deligne_energy_delta({b, a, t1}, g);
  const SectionBasis mid = b.transformed(mat_exp(a, t1).mat);
  const double e_second = deligne_energy_delta({mid, a, t2}, g);
  CHECK(e_total ==
        doctest::Approx(e_first + e_second).epsilon(1e-10));
}

TEST_CASE("energy is invariant under simultaneous unitary rotation") {
  const int k = 2;
  Rng rng(8);
  const Matrix u = random_unitary(k + 1, rng);
  const HermitianTraceless a = testutil::a_fix(k + 1);
  const HermitianTraceless a_rot(u * a.mat() * u.adjoint());
  const SectionBasis b = SectionBasis::identity(k);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  const double e = deligne_energy_delta({b, a, 0.35}, g, SelfCheck::Off);
  const double e_rot =
      deligne_energy_delta({b.transformed(u), a_rot, 0.35}, g, SelfCheck::Off);
  CHECK(e_rot == doctest::Approx(e).epsilon(1e-10));
}

TEST_CASE("energy is flat along automorphism orbits") {
  // Flowing a balanced basis by a rotation generator keeps it balanced and
  // accumulates no energy: the integrand undergoes total cancellation.
  const int k = 3;
  const auto j = aut_subalgebra(k);
  const SectionBasis b = SectionBasis::identity(k);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  CHECK(std::abs(deligne_energy_delta({b, j[2], 0.3}, g)) < 1e-9);
  CHECK(std::abs(deligne_energy_delta({b, j[0], 0.3}, g)) < 1e-9);
  const SectionBasis moved = b.transformed(mat_exp(j[0], 0.3).mat);
  CHECK(gram_matrix(moved, g).residual_norm < 1e-8);
}

TEST_CASE("second derivative is convex and matches the normal form at 0") {
  const int k = 3;
  Rng rng(13);
  const SectionBasis b = SectionBasis::identity(k);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  for (int s = 0; s < 3; ++s) {
    const HermitianTraceless a = random_hermitian(k + 1, rng);
    for (double t : {-0.5, 0.0, 0.7}) {
      CHECK(energy_second_derivative({b, a, t}, g, {}, SelfCheck::Off) >
            -1e-8);
    }
    const double d2 =
        energy_second_derivative({b, a, 0.0}, g, {}, SelfCheck::Off);
    const double q2 = 2.0 * sigma_norm_sq(a, b, g, SelfCheck::Off);
    CHECK(d2 == doctest::Approx(q2).epsilon(1e-5));
  }
}

TEST_CASE("second derivative vanishes along automorphism directions") {
  const int k = 2;
  const auto j = aut_subalgebra(k);
  const SectionBasis b = SectionBasis::identity(k);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  for (const HermitianTraceless& a : j) {
    CHECK(std::abs(energy_second_derivative({b, a, 0.0}, g, {},
                                            SelfCheck::Off)) < 1e-8);
  }
}

TEST_CASE("finite-difference options are honored") {
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  const FlowLine f{SectionBasis::identity(2), testutil::a_fix(3), 0.0};
  const double rich =
      energy_second_derivative(f, g, {1e-3, true}, SelfCheck::Off);
  const double plain =
      energy_second_derivative(f, g, {1e-3, false}, SelfCheck::Off);
  // Both approximate the same limit; the refined stencil is at least as close
  // to the independently computed quadratic form.
  const double q2 = 2.0 * sigma_norm_sq(testutil::a_fix(3),
                                        SectionBasis::identity(2), g,
                                        SelfCheck::Off);
  CHECK(std::abs(rich - q2) <= std::abs(plain - q2) + 1e-12);
}

}  // TEST_SUITE

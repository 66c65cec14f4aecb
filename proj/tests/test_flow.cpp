#include <cmath>

#include <Eigen/LU>

#include "doctest.h"

#include "bflow/errors.hpp"
#include "bflow/flow.hpp"
#include "bflow/rng.hpp"
#include "test_helpers.hpp"

using namespace bflow;

TEST_SUITE("flow") {

TEST_CASE("a balanced basis is a fixed point") {
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  const SectionBasis b = SectionBasis::identity(2);

  // flow_step returns the input object unchanged below the noise floor.
  const SectionBasis stepped = flow_step(b, 0.5, g);
  CHECK((stepped.coeffs() - b.coeffs()).norm() == 0.0);

  // balance stops immediately: one trace record, zero iterations.
  const BalanceResult res = balance(b, 1e-8, 50, g);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.trace[0].iter == 0);
  CHECK(res.trace[0].residual < 1e-12);
  CHECK((res.basis.coeffs() - b.coeffs()).norm() == 0.0);
}

TEST_CASE("balancing a perturbed basis converges monotonically") {
  const int k = 3;
  Rng rng(4);
  const SectionBasis start = SectionBasis::identity(k).transformed(
      mat_exp(random_hermitian(k + 1, rng).scaled(0.4), 1.0).mat);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  const BalanceResult res = balance(start, 1e-8, 500, g);

  REQUIRE(res.trace.size() >= 2);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    CHECK(res.trace[i].residual < res.trace[i - 1].residual);
    CHECK(res.trace[i].iter == static_cast<int>(i));
    CHECK(res.trace[i].step_used > 0.0);
  }
  CHECK(res.trace.back().residual <= 1e-8);

  const GramReport final_gram = gram_matrix(res.basis, g);
  CHECK(final_gram.residual_norm <= 1e-8);
  CHECK(final_gram.scalar_part ==
        doctest::Approx(k / (k + 1.0)).epsilon(1e-9));
}

TEST_CASE("the flow stays inside the orbit of the starting basis") {
  // Every step multiplies by the exponential of a traceless generator, so the
  // determinant magnitude of the coefficients is preserved.
  const int k = 2;
  const SectionBasis start = SectionBasis::identity(k).transformed(
      mat_exp(testutil::a_fix(k + 1), 0.4).mat);
  const QuadratureGrid g = QuadratureGrid::for_degree(k);
  const BalanceResult res = balance(start, 1e-9, 500, g);
  const double det_in = std::abs(start.coeffs().determinant());
  const double det_out = std::abs(res.basis.coeffs().determinant());
  CHECK(det_out == doctest::Approx(det_in).epsilon(1e-10));
}

TEST_CASE("iteration cap raises with the residual history attached") {
  const SectionBasis start = SectionBasis::identity(2).transformed(
      mat_exp(testutil::a_fix(3), 0.5).mat);
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  try {
    balance(start, 1e-12, 3, g);
    FAIL("expected MaxIterExceeded");
  } catch (const MaxIterExceeded& e) {
    REQUIRE(e.residual_trace.size() == 4);  // start + 3 iterations
    for (std::size_t i = 1; i < e.residual_trace.size(); ++i) {
      CHECK(e.residual_trace[i] < e.residual_trace[i - 1]);
    }
  }
}

TEST_CASE("stalled line search at the noise floor raises") {
  // An unreachable tolerance drives the iteration to the quadrature noise
  // floor, where no halved step can produce a strict decrease.
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  CHECK_THROWS_AS(balance(SectionBasis::identity(2), 1e-300, 2000, g),
                  LineSearchFailed);
}

TEST_CASE("argument validation") {
  const QuadratureGrid g = QuadratureGrid::for_degree(2);
  const SectionBasis b = SectionBasis::identity(2);
  CHECK_THROWS_AS(balance(b, 0.0, 10, g), std::invalid_argument);
  CHECK_THROWS_AS(balance(b, 1e-8, 0, g), std::invalid_argument);
  CHECK_THROWS_AS(balance(b, 1e-8, 10, g, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(flow_step(b, 0.0, g), std::invalid_argument);
}

TEST_CASE("frozen square-root step contraction") {
  // k = 4, starting point exp(0.5·A_fix)·identity, fixed 64x64 grid: the
  // Gram-root step contracts the residual by the frozen amounts.
  const QuadratureGrid g = QuadratureGrid::make(64, 64);
  const SectionBasis start = SectionBasis::identity(4).transformed(
      mat_exp(testutil::a_fix(5), 0.5).mat);
  const double r0 = gram_matrix(start, g, SelfCheck::Off).residual_norm;
  CHECK(r0 == doctest::Approx(0.441481701109652).epsilon(1e-9));
  const SectionBasis next = sqrt_balance_step(start, g, SelfCheck::Off);
  const double r1 = gram_matrix(next, g, SelfCheck::Off).residual_norm;
  CHECK(r1 == doctest::Approx(0.11584410728497345).epsilon(1e-9));
  CHECK(r1 < r0);
}

TEST_CASE("square-root step rejects a numerically indefinite Gram") {
  // A basis at the edge of the conditioning gate produces a Gram matrix whose
  // smallest eigenvalue collapses past the positivity cutoff.
  Matrix edge = Matrix::Identity(2, 2);
  edge(1, 1) = 1e-11;
  const SectionBasis b = SectionBasis::make(1, edge);
  const QuadratureGrid g = QuadratureGrid::for_degree(1);
  CHECK_THROWS_AS(sqrt_balance_step(b, g, SelfCheck::Off), GramNotPositive);
}

}  // TEST_SUITE

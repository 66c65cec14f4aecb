#include <cmath>
#include <complex>

#include "doctest.h"

#include "bflow/config.hpp"
#include "bflow/errors.hpp"
#include "bflow/projective.hpp"
#include "bflow/rng.hpp"
#include "test_helpers.hpp"

using namespace bflow;

namespace {

Vector vec2(Complex a, Complex b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("projective") {

TEST_CASE("tangent form on a worked 2d example") {
  // v = (1,1), a = (1,−1): a ⟂ v, ⟨X,X⟩ = s·[(v*v)(a*a) − |v*a|²]/(v*v)²
  //                                      = s·(2·2 − 0)/4 = s.
  const ProjectivePoint p(vec2(1.0, 1.0));
  const TangentAtPoint x{p, vec2(1.0, -1.0)};
  CHECK(fs_tangent_norm_sq(x) ==
        doctest::Approx(config::kFsInnerScale).epsilon(1e-14));

  // A direction proportional to the base point has zero norm.
  const TangentAtPoint along{p, vec2(2.0, 2.0)};
  CHECK(std::abs(fs_tangent_norm_sq(along)) < 1e-14);
}

TEST_CASE("tangent form invariances") {
  Rng rng(3);
  Vector v(3), a(3), b(3);
  for (int i = 0; i < 3; ++i) {
    v[i] = Complex(rng.gauss(), rng.gauss());
    a[i] = Complex(rng.gauss(), rng.gauss());
    b[i] = Complex(rng.gauss(), rng.gauss());
  }
  const ProjectivePoint p{Vector(v)};
  const Complex base = fs_tangent_inner({p, a}, {p, b});

  // Rescaling the representative (v, dir) ↦ (λv, λ·dir).
  const Complex lambda(0.7, -1.3);
  const ProjectivePoint ps{Vector(lambda * v)};
  const Complex scaled = fs_tangent_inner({ps, Vector(lambda * a)},
                                          {ps, Vector(lambda * b)});
  CHECK(std::abs(scaled - base) < 1e-12 * (1.0 + std::abs(base)));

  // Shifting a direction along the base point: dir ↦ dir + μ·v.
  const Complex mu(0.4, 2.0);
  const Complex shifted = fs_tangent_inner({p, Vector(a + mu * v)}, {p, b});
  CHECK(std::abs(shifted - base) < 1e-12 * (1.0 + std::abs(base)));

  // Hermitian symmetry: ⟨X,Y⟩ = conj⟨Y,X⟩.
  const Complex swapped = fs_tangent_inner({p, b}, {p, a});
  CHECK(std::abs(std::conj(swapped) - base) < 1e-12 * (1.0 + std::abs(base)));
}

TEST_CASE("mismatched base points are rejected") {
  const ProjectivePoint p(vec2(1.0, 1.0));
  const ProjectivePoint q(vec2(1.0, 2.0));
  const TangentAtPoint x{p, vec2(1.0, -1.0)};
  const TangentAtPoint y{q, vec2(1.0, -1.0)};
  CHECK_THROWS_AS(fs_tangent_inner(x, y), BasePointMismatch);
  // A projectively equal base point (different representative) is accepted.
  const ProjectivePoint p2(vec2(Complex(0, 2), Complex(0, 2)));
  const TangentAtPoint y2{p2, vec2(1.0, -1.0)};
  CHECK(std::isfinite(fs_tangent_inner(x, y2).real()));
}

TEST_CASE("vector_field_at is the matrix action") {
  const HermitianTraceless a = testutil::a_fix(3);
  Vector v(3);
  v << 1.0, Complex(0.0, 1.0), -2.0;
  const ProjectivePoint p{Vector(v)};
  const TangentAtPoint x = vector_field_at(a, p);
  CHECK((x.dir - a.mat() * v).norm() < 1e-14);
  CHECK((x.base.homog - v).norm() < 1e-14);
}

TEST_CASE("orbit velocity on an eigenvector is twice the eigenvalue") {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = 0.9;
  d(1, 1) = -0.4;
  d(2, 2) = -0.5;
  const HermitianTraceless a(d);
  Vector e1 = Vector::Zero(3);
  e1[1] = Complex(2.0, 1.0);  // eigenvector with eigenvalue −0.4
  for (double t : {0.0, 0.5, 3.0}) {
    CHECK(phi_dot(a, t, ProjectivePoint{Vector(e1)}) ==
          doctest::Approx(2.0 * -0.4).epsilon(1e-13));
  }
}

TEST_CASE("orbit velocity saturates at twice the top eigenvalue") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  const HermitianTraceless a(d);
  const ProjectivePoint p(vec2(1.0, 1.0));
  CHECK(phi_dot(a, 0.0, p) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(phi_dot(a, 30.0, p) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("orbit velocity matches differences of the log norm") {
  Rng rng(17);
  const HermitianTraceless a = random_hermitian(4, rng);
  Vector v(4);
  for (int i = 0; i < 4; ++i) v[i] = Complex(rng.gauss(), rng.gauss());
  const ProjectivePoint p{Vector(v)};

  const double t0 = 0.3;
  const double h = 1e-6;
  auto log_norm_sq = [&](double t) {
    const Vector w = mat_exp(a, t).mat * v;
    return std::log(w.squaredNorm());
  };
  const double fd = (log_norm_sq(t0 + h) - log_norm_sq(t0 - h)) / (2.0 * h);
  CHECK(phi_dot(a, t0, p) == doctest::Approx(fd).epsilon(1e-6));

  // The precomputed-exponential variant agrees with the direct one.
  CHECK(phi_dot_with(mat_exp(a, t0), a, p) ==
        doctest::Approx(phi_dot(a, t0, p)).epsilon(1e-13));
}

}  // TEST_SUITE

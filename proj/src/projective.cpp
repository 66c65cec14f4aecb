#include "bflow/projective.hpp"

#include <stdexcept>
#include <string>

#include "bflow/errors.hpp"

namespace bflow {

ProjectivePoint::ProjectivePoint(Vector v) : homog(std::move(v)) {
  if (homog.size() == 0 || homog.cwiseAbs().maxCoeff() <= 0.0) {
    throw std::invalid_argument("ProjectivePoint: homogeneous vector is zero");
  }
}

namespace {

void require_same_base(const ProjectivePoint& p, const ProjectivePoint& q) {
  if (p.homog.size() != q.homog.size()) {
    throw BasePointMismatch("fs_tangent_inner: dimension mismatch");
  }
  // Colinearity test: the component of q orthogonal to p must vanish
  // relative to |q|.
  const Complex overlap = p.homog.dot(q.homog);
  const double pn2 = p.homog.squaredNorm();
  const Vector residual = q.homog - (overlap / pn2) * p.homog;
  if (residual.norm() > config::kStructuralTol * q.homog.norm()) {
    throw BasePointMismatch("fs_tangent_inner: base points differ");
  }
}

}  // namespace

Complex fs_tangent_inner(const TangentAtPoint& x, const TangentAtPoint& y) {
  require_same_base(x.base, y.base);
  const Vector& v = x.base.homog;
  const Vector& a = x.dir;
  const Vector& b = y.dir;
  if (a.size() != v.size() || b.size() != v.size()) {
    throw DimMismatch("fs_tangent_inner: direction dimension mismatch");
  }
  const double vv = v.squaredNorm();
  const Complex ba = b.dot(a);
  const Complex bv = b.dot(v);
  const Complex va = v.dot(a);
  return config::kFsInnerScale * (vv * ba - bv * va) / (vv * vv);
}

double fs_tangent_norm_sq(const TangentAtPoint& x) {
  return fs_tangent_inner(x, x).real();
}

TangentAtPoint vector_field_at(const HermitianTraceless& a,
                               const ProjectivePoint& p) {
  if (a.dim() != p.homog.size()) {
    throw DimMismatch("vector_field_at: generator dim " +
                      std::to_string(a.dim()) + " vs point dim " +
                      std::to_string(p.homog.size()));
  }
  return TangentAtPoint{p, a.mat() * p.homog};
}

double phi_dot(const HermitianTraceless& a, double t,
               const ProjectivePoint& p) {
  if (a.dim() != p.homog.size()) {
    throw DimMismatch("phi_dot: generator dim vs point dim");
  }
  return phi_dot_with(mat_exp(a, t), a, p);
}

double phi_dot_with(const GroupElement& exp_ta, const HermitianTraceless& a,
                    const ProjectivePoint& p) {
  const Vector w = exp_ta.mat * p.homog;
  // v* e^{2tA} A v / v* e^{2tA} v = w* A w / w* w since A and e^{tA} commute.
  const double num = std::real(w.dot(a.mat() * w));
  return 2.0 * num / w.squaredNorm();
}

}  // namespace bflow

#include "grasplab/quat.hpp"

#include <cmath>

namespace grasplab {

namespace {
constexpr double kTiny = 1e-12;
}

Quat normalized(const Quat& q) {
  Quat out = q;
  out.normalize();
  return out;
}

Quat align_hemisphere(const Quat& ref, const Quat& q) {
  const double d = ref.dot(q);
  if (d < 0.0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
  return q;
}

Quat quat_exp(const Vec3& rotvec) {
  const double angle = rotvec.norm();
  if (angle < kTiny) {
    // First-order expansion keeps exp/log consistent near identity.
    Quat q(1.0, 0.5 * rotvec.x(), 0.5 * rotvec.y(), 0.5 * rotvec.z());
    q.normalize();
    return q;
  }
  const double half = 0.5 * angle;
  const Vec3 axis = rotvec / angle;
  const double s = std::sin(half);
  return Quat(std::cos(half), s * axis.x(), s * axis.y(), s * axis.z());
}

Vec3 quat_log(const Quat& q_in) {
  Quat q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v(q.x(), q.y(), q.z());
  const double vn = v.norm();
  if (vn < kTiny) return 2.0 * v;  // w ~ 1
  const double angle = 2.0 * std::atan2(vn, q.w());
  return (angle / vn) * v;
}

Quat slerp(const Quat& a, const Quat& b, double u) {
  double d = a.dot(b);
  if (d > 1.0) d = 1.0;
  if (d < -1.0) d = -1.0;
  const double omega = std::acos(d);
  if (omega < 1e-9) {
    // Nearly identical: linear blend, renormalized.
    Quat out;
    out.coeffs() = (1.0 - u) * a.coeffs() + u * b.coeffs();
    out.normalize();
    return out;
  }
  const double so = std::sin(omega);
  const double ca = std::sin((1.0 - u) * omega) / so;
  const double cb = std::sin(u * omega) / so;
  Quat out;
  out.coeffs() = ca * a.coeffs() + cb * b.coeffs();
  out.normalize();
  return out;
}

Quat squad(const Quat& q0, const Quat& q1, const Quat& q2, const Quat& q3, double u) {
  // Align the chain so every neighboring dot product is non-negative.
  const Quat b0 = normalized(q0);
  const Quat b1 = align_hemisphere(b0, normalized(q1));
  const Quat b2 = align_hemisphere(b1, normalized(q2));
  const Quat b3 = align_hemisphere(b2, normalized(q3));

  // Inner control point at qb given neighbors qa, qc:
  //   s = qb * exp(-(log(qb^-1 qa) + log(qb^-1 qc)) / 4)
  auto control = [](const Quat& qa, const Quat& qb, const Quat& qc) {
    const Quat inv = qb.conjugate();
    const Vec3 la = quat_log(align_hemisphere(Quat::Identity(), inv * qa));
    const Vec3 lc = quat_log(align_hemisphere(Quat::Identity(), inv * qc));
    return normalized(qb * quat_exp(-0.25 * (la + lc)));
  };

  const Quat s1 = control(b0, b1, b2);
  const Quat s2 = align_hemisphere(s1, control(b1, b2, b3));

  const Quat outer = slerp(b1, b2, u);
  const Quat inner = slerp(s1, s2, u);
  return normalized(slerp(outer, inner, 2.0 * u * (1.0 - u)));
}

Vec3 rotation_vector_between(const Quat& a, const Quat& b) {
  Quat rel = b * a.conjugate();
  if (rel.w() < 0.0) rel.coeffs() = -rel.coeffs();
  return quat_log(rel);
}

double quat_angle(const Quat& a, const Quat& b) {
  const Quat rel = a.conjugate() * b;
  const double vn = Vec3(rel.x(), rel.y(), rel.z()).norm();
  return 2.0 * std::atan2(vn, std::abs(rel.w()));
}

}  // namespace grasplab

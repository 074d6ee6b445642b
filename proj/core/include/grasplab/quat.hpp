#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace grasplab {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// Returns q scaled to unit norm.
Quat normalized(const Quat& q);

// Returns q or -q, whichever lies in the same hemisphere as ref (dot >= 0).
Quat align_hemisphere(const Quat& ref, const Quat& q);

// Exponential map: rotation vector (angle * axis) -> unit quaternion.
Quat quat_exp(const Vec3& rotvec);

// Log map: unit quaternion -> rotation vector with angle in [0, pi].
// The sign of q is normalized internally (double cover).
Vec3 quat_log(const Quat& q);

// Spherical linear interpolation without hemisphere flipping; callers are
// expected to align inputs first. u outside [0,1] extrapolates.
Quat slerp(const Quat& a, const Quat& b, double u);

// Spherical quadrangle interpolation between q1 and q2 at fraction u in
// [0,1], with outer control points q0 and q3 shaping the tangents. The four
// inputs are hemisphere-aligned internally, so antipodal representations are
// accepted. Result is unit norm.
Quat squad(const Quat& q0, const Quat& q1, const Quat& q2, const Quat& q3, double u);

// Rotation vector taking orientation a to orientation b (world frame),
// shortest path. Used for finite-difference angular velocity.
Vec3 rotation_vector_between(const Quat& a, const Quat& b);

// Geodesic distance between two unit quaternions as rotations (radians,
// insensitive to sign).
double quat_angle(const Quat& a, const Quat& b);

}  // namespace grasplab

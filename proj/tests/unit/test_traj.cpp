#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "grasplab/quat.hpp"
#include "grasplab/synthetic.hpp"
#include "grasplab/trajectory.hpp"

using namespace grasplab;
using traj::Pose;
using traj::Trajectory;

namespace {

// Test-local slerp oracle: shortest-path angle formula, independent of the
// library implementation.
Quat slerp_oracle(const Quat& a, Quat b, double u) {
  double d = a.w() * b.w() + a.x() * b.x() + a.y() * b.y() + a.z() * b.z();
  if (d < 0.0) {
    b.coeffs() = -b.coeffs();
    d = -d;
  }
  if (d > 1.0) d = 1.0;
  const double omega = std::acos(d);
  if (omega < 1e-12) return a;
  const double ca = std::sin((1.0 - u) * omega) / std::sin(omega);
  const double cb = std::sin(u * omega) / std::sin(omega);
  Quat out;
  out.coeffs() = ca * a.coeffs() + cb * b.coeffs();
  out.normalize();
  return out;
}

Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Quat q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q;
}

Trajectory line_trajectory(const Vec3& from, const Vec3& to, double duration, int samples) {
  std::vector<double> times;
  std::vector<Pose> poses;
  for (int i = 0; i < samples; ++i) {
    const double u = static_cast<double>(i) / (samples - 1);
    Pose p;
    p.position = from + u * (to - from);
    times.push_back(u * duration);
    poses.push_back(p);
  }
  return Trajectory(times, poses);
}

}  // namespace

TEST_CASE("squad: constant input returns the same quaternion") {
  std::mt19937_64 rng(7);
  const Quat q = random_quat(rng);
  for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Quat r = squad(q, q, q, q, u);
    CHECK(quat_angle(q, r) < 1e-12);
  }
}

TEST_CASE("squad: endpoint conditions") {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 20; ++it) {
    const Quat q0 = random_quat(rng), q1 = random_quat(rng);
    const Quat q2 = random_quat(rng), q3 = random_quat(rng);
    CHECK(quat_angle(squad(q0, q1, q2, q3, 0.0), q1) < 1e-12);
    CHECK(quat_angle(squad(q0, q1, q2, q3, 1.0), q2) < 1e-12);
  }
}

TEST_CASE("squad: collinear controls reduce to slerp at the midpoint") {
  const Quat q1 = Quat::Identity();
  const Quat q2(Eigen::AngleAxisd(M_PI / 2.0, Vec3::UnitZ()));
  const Quat mid = squad(q1, q1, q2, q2, 0.5);
  const Quat expect = slerp_oracle(q1, q2, 0.5);  // 45 degrees about z
  CHECK(quat_angle(mid, expect) < 1e-9);
  const Quat deg45(Eigen::AngleAxisd(M_PI / 4.0, Vec3::UnitZ()));
  CHECK(quat_angle(mid, deg45) < 1e-9);
}

TEST_CASE("squad: antipodal representations give the same rotation") {
  std::mt19937_64 rng(9);
  const Quat q0 = random_quat(rng), q1 = random_quat(rng);
  const Quat q2 = random_quat(rng), q3 = random_quat(rng);
  Quat q2_neg = q2;
  q2_neg.coeffs() = -q2_neg.coeffs();
  const Quat a = squad(q0, q1, q2, q3, 0.37);
  const Quat b = squad(q0, q1, q2_neg, q3, 0.37);
  CHECK(quat_angle(a, b) < 1e-9);
}

TEST_CASE("squad: unit norm and continuity in u") {
  std::mt19937_64 rng(10);
  for (int it = 0; it < 10; ++it) {
    // Smooth-ish chain: moderate, incremental rotations.
    const Quat q0 = random_quat(rng);
    const Quat q1 = align_hemisphere(q0, random_quat(rng));
    const Quat q2 = align_hemisphere(q1, random_quat(rng));
    const Quat q3 = align_hemisphere(q2, random_quat(rng));
    for (int k = 0; k <= 50; ++k) {
      const double u = static_cast<double>(k) / 50.0;
      const Quat a = squad(q0, q1, q2, q3, u);
      CHECK(std::abs(a.norm() - 1.0) < 1e-9);
      if (u + 1e-6 <= 1.0) {
        const Quat b = squad(q0, q1, q2, q3, u + 1e-6);
        CHECK((a.coeffs() - b.coeffs()).norm() < 1e-4);
      }
    }
  }
}

TEST_CASE("quat exp/log round trip") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int it = 0; it < 50; ++it) {
    const Vec3 v(d(rng), d(rng), d(rng));
    CHECK((quat_log(quat_exp(v)) - v).norm() < 1e-9);
  }
  CHECK(quat_log(Quat::Identity()).norm() == 0.0);
}

TEST_CASE("apply_offset: zero offset is identity") {
  const Trajectory t = line_trajectory({0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, 1.0, 5);
  const Trajectory o = traj::apply_offset(t, 0.0, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(o.pose(i).position == t.pose(i).position);
    CHECK(o.time(i) == t.time(i));
  }
}

TEST_CASE("apply_offset: shifts x and y only") {
  std::vector<double> times{0.0, 1.0};
  std::vector<Pose> poses(2);
  poses[0].position = Vec3(0.1, 0.2, 0.3);
  poses[1].position = Vec3(0.1, 0.2, 0.3);
  const Trajectory t(times, poses);
  const Trajectory o = traj::apply_offset(t, 0.06, -0.06);
  CHECK(o.pose(0).position.isApprox(Vec3(0.16, 0.14, 0.3), 1e-15));
  CHECK(o.pose(0).orientation.coeffs() == t.pose(0).orientation.coeffs());
}

TEST_CASE("apply_offset at the sampling bounds") {
  const Trajectory t = line_trajectory({0.3, 0.0, 0.0}, {0.0, 0.0, 0.2}, 1.0, 8);
  for (double dx : {-0.06, 0.06}) {
    for (double dy : {-0.06, 0.06}) {
      const Trajectory o = traj::apply_offset(t, dx, dy);
      for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(o.pose(i).position.x() == doctest::Approx(t.pose(i).position.x() + dx).epsilon(1e-15));
        CHECK(o.pose(i).position.y() == doctest::Approx(t.pose(i).position.y() + dy).epsilon(1e-15));
        CHECK(o.pose(i).position.z() == t.pose(i).position.z());
      }
    }
  }
}

TEST_CASE("time_warp: duration arithmetic") {
  const Trajectory t = line_trajectory({0, 0, 0}, {1, 0, 0}, 1.0, 11);
  const Trajectory w = traj::time_warp(t, 2.5, 0.5);
  CHECK(w.duration() == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(w.start_time() == t.start_time());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(w.pose(i).position == t.pose(i).position);
  }
}

TEST_CASE("time_warp: identity warp keeps times") {
  const Trajectory t = line_trajectory({0, 0, 0}, {1, 0, 0}, 0.8, 9);
  const Trajectory w = traj::time_warp(t, 1.0, 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(w.time(i) == doctest::Approx(t.time(i)).epsilon(1e-15));
}

TEST_CASE("time_warp: rejects non-positive duration") {
  const Trajectory t = line_trajectory({0, 0, 0}, {1, 0, 0}, 0.2, 5);
  CHECK_THROWS_AS(traj::time_warp(t, 2.5, -0.6), NonPositiveDuration);
  CHECK_THROWS_AS(traj::time_warp(t, 0.0, 0.0), NonPositiveDuration);
}

TEST_CASE("time_warp composes multiplicatively") {
  const Trajectory t = line_trajectory({0, 0, 0}, {1, 0, 0}, 1.0, 11);
  const Trajectory w = traj::time_warp(traj::time_warp(t, 2.5, 0.0), 2.0, 0.0);
  CHECK(w.duration() == doctest::Approx(5.0 * t.duration()).epsilon(1e-12));
}

TEST_CASE("apply_offset commutes with time_warp") {
  const Trajectory t = line_trajectory({0.2, -0.1, 0.0}, {0.0, 0.0, 0.3}, 1.3, 14);
  const Trajectory a = traj::apply_offset(traj::time_warp(t, 2.5, 0.4), 0.03, -0.02);
  const Trajectory b = traj::time_warp(traj::apply_offset(t, 0.03, -0.02), 2.5, 0.4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.time(i) == b.time(i));
    CHECK(a.pose(i).position == b.pose(i).position);
  }
}

TEST_CASE("resample: grid arithmetic at 0.02 s") {
  std::vector<double> times{0.0, 0.1};
  std::vector<Pose> poses(2);
  poses[1].position = Vec3(1, 0, 0);
  const Trajectory t(times, poses);
  const Trajectory r = traj::resample(t, 0.02);
  REQUIRE(r.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(r.time(i) == doctest::Approx(0.02 * static_cast<double>(i)).epsilon(1e-9));
  }
  CHECK(r.uniform_dt().has_value());
  CHECK(*r.uniform_dt() == 0.02);
}

TEST_CASE("resample: uniform spacing within 1e-9, endpoints preserved") {
  const Trajectory t = line_trajectory({0.4, 0.1, 0.0}, {0.0, 0.0, 0.3}, 1.37, 23);
  const Trajectory r = traj::resample(t, 0.02);
  for (std::size_t i = 1; i < r.size(); ++i) {
    CHECK(std::abs((r.time(i) - r.time(i - 1)) - 0.02) < 1e-9);
  }
  CHECK((r.pose(0).position - t.pose(0).position).norm() < 1e-9);
  CHECK((r.pose(r.size() - 1).position - t.pose(t.size() - 1).position).norm() < 1e-9);
  CHECK(quat_angle(r.pose(0).orientation, t.pose(0).orientation) < 1e-9);
  CHECK(quat_angle(r.pose(r.size() - 1).orientation, t.pose(t.size() - 1).orientation) < 1e-9);
  // Grid covers the original span.
  CHECK(r.time(r.size() - 1) >= t.end_time() - 1e-9);
}

TEST_CASE("resample: constant pose stays constant") {
  std::vector<double> times{0.0, 0.3, 0.7, 1.1};
  std::vector<Pose> poses(4);
  for (auto& p : poses) {
    p.position = Vec3(0.5, -0.2, 0.1);
    p.orientation = Quat(Eigen::AngleAxisd(0.4, Vec3::UnitY()));
  }
  const Trajectory r = traj::resample(Trajectory(times, poses), 0.02);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK((r.pose(i).position - Vec3(0.5, -0.2, 0.1)).norm() < 1e-12);
    CHECK(quat_angle(r.pose(i).orientation, poses[0].orientation) < 1e-12);
  }
}

TEST_CASE("resample: passes through original knots on the grid") {
  // Knots at multiples of dt, non-trivial positions.
  std::vector<double> times;
  std::vector<Pose> poses;
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int i = 0; i < 8; ++i) {
    times.push_back(0.1 * i);
    Pose p;
    p.position = Vec3(n(rng), n(rng), std::abs(n(rng)));
    p.orientation = random_quat(rng);
    poses.push_back(p);
  }
  const Trajectory t(times, poses);
  const Trajectory r = traj::resample(t, 0.02);
  for (std::size_t k = 0; k < t.size(); ++k) {
    const std::size_t idx = 5 * k;  // 0.1 / 0.02
    REQUIRE(idx < r.size());
    CHECK(std::abs(r.time(idx) - t.time(k)) < 1e-9);
    CHECK((r.pose(idx).position - t.pose(k).position).norm() < 1e-9);
    CHECK(quat_angle(r.pose(idx).orientation, t.pose(k).orientation) < 1e-9);
  }
}

TEST_CASE("resample: idempotent on sample times") {
  const Trajectory t = line_trajectory({0.3, 0.2, 0.0}, {0.0, 0.0, 0.25}, 0.93, 17);
  const Trajectory r1 = traj::resample(t, 0.02);
  const Trajectory r2 = traj::resample(r1, 0.02);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r2.time(i) == doctest::Approx(r1.time(i)).epsilon(1e-12));
  }
}

TEST_CASE("resample: all output quaternions unit norm") {
  std::mt19937_64 rng(13);
  std::vector<double> times;
  std::vector<Pose> poses;
  for (int i = 0; i < 12; ++i) {
    times.push_back(0.07 * i);
    Pose p;
    p.position = Vec3(0.01 * i, 0.0, 0.0);
    p.orientation = random_quat(rng);
    poses.push_back(p);
  }
  const Trajectory r = traj::resample(Trajectory(times, poses), 0.02);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(std::abs(r.pose(i).orientation.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("resample: rejects degenerate input and bad dt") {
  const Trajectory t = line_trajectory({0, 0, 0}, {1, 0, 0}, 1.0, 5);
  CHECK_THROWS_AS(traj::resample(t, 0.0), NonPositiveDuration);
  CHECK_THROWS_AS(Trajectory({0.0}, {Pose{}}), DegenerateTrajectory);
}

TEST_CASE("trajectory: rejects non-monotone times") {
  std::vector<double> times{0.0, 0.2, 0.1};
  std::vector<Pose> poses(3);
  CHECK_THROWS_AS(Trajectory(times, poses), NonMonotoneTime);
}

TEST_CASE("csv round trip is exact") {
  const Trajectory t = line_trajectory({0.3123456789, -0.2, 0.0}, {0.0, 0.0, 0.2987654321}, 1.0, 9);
  std::stringstream ss;
  traj::export_csv(t, ss);
  const Trajectory back = traj::import_csv(ss, "roundtrip");
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(back.time(i) - t.time(i)) < 1e-9);
    CHECK((back.pose(i).position - t.pose(i).position).norm() < 1e-9);
    CHECK(quat_angle(back.pose(i).orientation, t.pose(i).orientation) < 1e-9);
  }
}

TEST_CASE("csv import errors") {
  {
    std::stringstream ss;
    CHECK_THROWS_AS(traj::import_csv(ss, "empty"), ParseError);
  }
  {
    std::stringstream ss("t,x,y,z,qw,qx,qy,qz\n0.1,0,0,0,1,0,0,0\n0.05,0,0,0,1,0,0,0\n");
    CHECK_THROWS_AS(traj::import_csv(ss, "dec"), NonMonotoneTime);
  }
  {
    std::stringstream ss("t,x,y,z,qw,qx,qy,qz\n0.0,0,zap,0,1,0,0,0\n0.1,0,0,0,1,0,0,0\n");
    try {
      traj::import_csv(ss, "bad");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  {
    std::stringstream ss("t,x,y,z,qw,qx,qy\n");
    CHECK_THROWS_AS(traj::import_csv(ss, "hdr"), ParseError);
  }
}

TEST_CASE("synthetic: boundary conditions") {
  const Vec3 start(0.4, 0.1, 0.0);
  const Vec3 object(0.0, 0.0, 0.0);
  const Trajectory t = traj::generate_synthetic(start, object, 0.3, 1.2, 0.02);
  CHECK((t.pose(0).position - start).norm() < 1e-12);
  CHECK(t.pose(t.size() - 1).position.z() == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(t.uniform_dt().has_value());
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(std::abs(t.pose(i).orientation.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("min_jerk: zero boundary slope") {
  const double h = 1e-4;
  CHECK(std::abs(traj::min_jerk(h) - traj::min_jerk(0.0)) / h < 1e-6);
  CHECK(std::abs(traj::min_jerk(1.0) - traj::min_jerk(1.0 - h)) / h < 1e-6);
  CHECK(traj::min_jerk(0.0) == 0.0);
  CHECK(traj::min_jerk(1.0) == 1.0);
  CHECK(traj::min_jerk(0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("polar grid emits 16 starts on 4 radii x 4 angles") {
  const auto starts = traj::polar_grid_starts(Vec3::Zero());
  CHECK(starts.size() == 16);
  std::set<long> radii;
  for (const auto& s : starts) {
    radii.insert(std::lround(1000.0 * std::hypot(s.x(), s.y())));
  }
  CHECK(radii.size() == 4);

  const traj::TrajectorySet set = traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02);
  CHECK(set.size() == 16);
  CHECK(set.source == traj::TrajectorySource::kSynthetic);
}

TEST_CASE("trajectory set: unknown id throws") {
  const traj::TrajectorySet set = traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02);
  CHECK_THROWS_AS(set.at(16), UnknownTrajectory);
}

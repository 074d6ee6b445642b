#include "grasplab/synthetic.hpp"

#include <cmath>
#include <cstdio>

namespace grasplab::traj {

double min_jerk(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double u3 = u * u * u;
  return 10.0 * u3 - 15.0 * u3 * u + 6.0 * u3 * u * u;
}

Trajectory generate_synthetic(const Vec3& start, const Vec3& object_pos, double lift_height,
                              double duration, double dt, const SyntheticConfig& shape) {
  if (!(duration > 0.0)) throw NonPositiveDuration("synthetic duration must be positive");
  if ((start - object_pos).norm() < 1e-9) {
    throw DegenerateTrajectory("start coincides with object position");
  }

  // Pre-grasp point: standoff back along the approach, possibly above the
  // object (an elevated arrival grips high, so the carried object trails
  // below the hand).
  Vec3 approach = object_pos - start;
  approach.z() = 0.0;
  const double axy = approach.norm();
  Vec3 pregrasp = object_pos;
  if (axy > 1e-9) pregrasp -= shape.standoff * (approach / axy);
  pregrasp.z() = object_pos.z() + shape.approach_height;

  const double yaw_face = std::atan2(object_pos.y() - start.y(), object_pos.x() - start.x());
  const double yaw_start = yaw_face + shape.start_yaw_offset;

  const double t_reach = duration * shape.reach_fraction;
  const double lift_top = object_pos.z() + lift_height;

  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<double> times(steps + 1);
  std::vector<Pose> poses(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    Pose p;
    double yaw;
    if (t <= t_reach) {
      const double s = min_jerk(t / t_reach);
      p.position = start + s * (pregrasp - start);
      yaw = yaw_start + s * (yaw_face - yaw_start);
    } else {
      const double s = min_jerk((t - t_reach) / (duration - t_reach));
      p.position = pregrasp;
      p.position.z() = pregrasp.z() + s * (lift_top - pregrasp.z());
      yaw = yaw_face;
    }
    p.orientation = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
    times[k] = t;
    poses[k] = p;
  }
  return Trajectory(std::move(times), std::move(poses), dt);
}

std::vector<Vec3> polar_grid_starts(const Vec3& center, const PolarGridConfig& grid) {
  std::vector<Vec3> starts;
  starts.reserve(grid.radii.size() * grid.angles_deg.size());
  for (double r : grid.radii) {
    for (double a : grid.angles_deg) {
      const double rad = a * M_PI / 180.0;
      starts.emplace_back(center.x() + r * std::cos(rad), center.y() + r * std::sin(rad),
                          grid.z);
    }
  }
  return starts;
}

TrajectorySet generate_polar_grid_set(const Vec3& object_pos, double lift_height,
                                      double duration, double dt, const PolarGridConfig& grid,
                                      const SyntheticConfig& shape) {
  TrajectorySet set;
  set.source = TrajectorySource::kSynthetic;
  const auto starts = polar_grid_starts(object_pos, grid);
  char name[32];
  for (std::size_t i = 0; i < starts.size(); ++i) {
    SyntheticConfig s = shape;
    if (!grid.approach_heights.empty()) {
      s.approach_height = grid.approach_heights[i % grid.approach_heights.size()];
    }
    set.trajectories.push_back(
        generate_synthetic(starts[i], object_pos, lift_height, duration, dt, s));
    std::snprintf(name, sizeof(name), "traj_%03zu", i);
    set.names.emplace_back(name);
  }
  return set;
}

}  // namespace grasplab::traj

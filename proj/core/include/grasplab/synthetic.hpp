#pragma once

#include <vector>

#include "grasplab/trajectory.hpp"

namespace grasplab::traj {

// Shape parameters for the generated reach-and-lift motions. The defaults
// are what `generate_synthetic` and the CLI `gen` command use.
struct SyntheticConfig {
  double standoff = 0.06;        // pre-grasp distance from the object, m
  double approach_height = 0.0;  // pre-grasp height above the object, m
  double reach_fraction = 2.0 / 3.0;  // share of the duration spent reaching
  double start_yaw_offset = 0.35;     // initial yaw error w.r.t. facing, rad
};

// Minimum-jerk reach from `start` to a pre-grasp point near `object_pos`,
// then a vertical minimum-jerk lift ending at object_pos.z + lift_height.
// Orientation interpolates from an offset start yaw to facing the object.
// Samples are uniform at dt; velocity is zero at both phase boundaries.
Trajectory generate_synthetic(const Vec3& start, const Vec3& object_pos, double lift_height,
                              double duration, double dt, const SyntheticConfig& shape = {});

// 4 radii x 4 angles of start markers around `center`, all at height z.
// approach_heights cycles over the grid points, so trajectories differ in
// how high above the object the hand arrives (some placements make clean
// grasps scarce, like awkward approach directions do with real hands).
struct PolarGridConfig {
  std::vector<double> radii{0.25, 0.35, 0.45, 0.55};
  std::vector<double> angles_deg{135.0, 165.0, 195.0, 225.0};
  double z = 0.0;
  std::vector<double> approach_heights{0.0, 0.02, 0.04, 0.06};
};

std::vector<Vec3> polar_grid_starts(const Vec3& center, const PolarGridConfig& grid = {});

// One trajectory per grid start, toward an object at `object_pos`.
TrajectorySet generate_polar_grid_set(const Vec3& object_pos, double lift_height,
                                      double duration, double dt,
                                      const PolarGridConfig& grid = {},
                                      const SyntheticConfig& shape = {});

// Minimum-jerk interpolation profile 10u^3 - 15u^4 + 6u^5 on [0,1].
double min_jerk(double u);

}  // namespace grasplab::traj

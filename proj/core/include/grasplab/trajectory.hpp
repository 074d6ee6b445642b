#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "grasplab/errors.hpp"
#include "grasplab/quat.hpp"

namespace grasplab::traj {

// Tolerance used for the unit-norm and uniform-spacing invariants.
inline constexpr double kTimeTol = 1e-9;

struct Pose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};
};

// A timestamped sequence of hand poses. Times are strictly increasing and
// there are at least two samples. Orientations are normalized on
// construction. If uniform_dt is set, successive gaps match it within 1e-9.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<Pose> poses,
             std::optional<double> uniform_dt = std::nullopt);

  std::size_t size() const { return times_.size(); }
  double time(std::size_t i) const { return times_[i]; }
  const Pose& pose(std::size_t i) const { return poses_[i]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Pose>& poses() const { return poses_; }

  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }
  double duration() const { return times_.back() - times_.front(); }
  std::optional<double> uniform_dt() const { return uniform_dt_; }

 private:
  std::vector<double> times_;
  std::vector<Pose> poses_;
  std::optional<double> uniform_dt_;
};

enum class TrajectorySource { kSynthetic, kImported };

// Non-empty collection of trajectories; the index in `trajectories` is the
// id referenced by environment settings.
struct TrajectorySet {
  std::vector<Trajectory> trajectories;
  TrajectorySource source = TrajectorySource::kSynthetic;
  std::vector<std::string> names;  // optional, parallel to trajectories

  std::size_t size() const { return trajectories.size(); }
  const Trajectory& at(std::size_t id) const;
};

// Shifts every position by (dx, dy, 0); times and orientations unchanged.
Trajectory apply_offset(const Trajectory& t, double dx, double dy);

// Affine time rescale: new duration = old * ts + tn, first sample time and
// relative phase preserved. Throws NonPositiveDuration if the result would
// not be positive.
Trajectory time_warp(const Trajectory& t, double ts, double tn);

// Resamples onto the uniform grid {t0, t0+dt, ...} that covers
// [t0, t_end]; when the original end time falls between grid points the grid
// extends one step past it and evaluation is clamped to the end pose, so the
// output is always uniform. Positions come from a piecewise cubic spline
// (natural ends; linear/quadratic fallback for 2/3 knots), orientations from
// squad over the hemisphere-aligned knot sequence.
Trajectory resample(const Trajectory& t, double dt);

// CSV exchange format: header "t,x,y,z,qw,qx,qy,qz", one sample per row,
// seconds/meters, scalar-first quaternion. Round-trips within 1e-9.
Trajectory import_csv(const std::string& path);
Trajectory import_csv(std::istream& in, const std::string& origin);
void export_csv(const Trajectory& t, const std::string& path);
void export_csv(const Trajectory& t, std::ostream& out);

// Loads every *.csv in a directory (sorted by filename) into a set.
TrajectorySet load_trajectory_dir(const std::string& dir);

}  // namespace grasplab::traj

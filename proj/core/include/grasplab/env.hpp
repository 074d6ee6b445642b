#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "grasplab/trajectory.hpp"

namespace grasplab::env {

// Surrogate physics constants. aperture(h) = a_max * (1 - h) is the
// effective opening width at closure h.
struct PhysicsConstants {
  double r_obj = 0.035;     // object radius, m
  double a_max = 0.10;      // max aperture, m
  double v_close = 2.0;     // max closure rate, 1/s
  double d_grasp = 0.10;    // attach distance, m
  double d_contact = 0.12;  // collision test distance, m
  double z_trig = 0.10;     // trigger height, m
  double h_hold = 0.35;     // minimum holding closure
  double dt = 0.02;         // control interval, s

  double aperture(double h) const { return a_max * (1.0 - h); }
  void validate() const;  // throws std::invalid_argument
};

// The sampled per-episode tuple: which trajectory, its planar offset, and
// its duration offset. The seed is bookkeeping for reproducing the sample.
struct EnvSettings {
  std::size_t trajectory_id = 0;
  double dx = 0.0;
  double dy = 0.0;
  double tn = 0.0;
  std::uint64_t seed = 0;
};

struct EnvState {
  int step = 0;
  traj::Pose hand;
  Vec3 hand_lin_vel{Vec3::Zero()};
  Vec3 hand_ang_vel{Vec3::Zero()};
  double closure = 0.0;       // h in [0,1]
  double closure_rate = 0.0;  // dh/dt, finite difference
  Vec3 object_pos{Vec3::Zero()};
  Vec3 object_vel{Vec3::Zero()};
  bool attached = false;
  bool toppled = false;
};

// Flat observation layout (21 reals).
inline constexpr int kStateDim = 21;
inline constexpr int kHandPos = 0;
inline constexpr int kHandQuat = 3;
inline constexpr int kHandLinVel = 7;
inline constexpr int kHandAngVel = 10;
inline constexpr int kClosure = 13;
inline constexpr int kClosureRate = 14;
inline constexpr int kObjectPos = 15;
inline constexpr int kObjectVel = 18;

using StateVector = Eigen::VectorXd;

StateVector pack_state(const EnvState& s);

struct Transition {
  StateVector s;
  double a = 0.0;
  double r = 0.0;
  StateVector s2;
  bool done = false;
};

struct StepResult {
  StateVector state;
  double reward = 0.0;
  bool done = false;
};

inline constexpr int kRewardWindow = 20;
inline constexpr double kMaxReturn = 20.0;

// Deterministic trajectory-driven grasping environment. The hand follows the
// (warped, offset, resampled) trajectory; the agent controls a single coupled
// closure channel with actions in [-1,1], a > 0 closing. Once the hand or the
// object first rises above z_trig, the following 20 steps each pay reward 1
// when the object is above z_trig. Rule order per step: topple, attach,
// carry, slip.
class GraspEnv {
 public:
  GraspEnv(std::shared_ptr<const traj::TrajectorySet> set, PhysicsConstants physics = {},
           double time_scale = 2.5);

  StateVector reset(const EnvSettings& settings);
  StepResult step(double action);

  // ||hand - object|| divided by its value at reset.
  double normalized_distance() const;

  const EnvState& state() const { return state_; }
  const PhysicsConstants& physics() const { return physics_; }
  double time_scale() const { return time_scale_; }
  bool done() const { return done_; }
  int trigger_step() const { return trigger_step_; }  // -1 until triggered
  int attach_step() const { return attach_step_; }    // -1 if never attached
  double initial_distance() const { return d0_; }

 private:
  void update_trigger();

  std::shared_ptr<const traj::TrajectorySet> set_;
  PhysicsConstants physics_;
  double time_scale_;

  std::vector<traj::Pose> path_;  // processed trajectory for this episode
  EnvState state_;
  Vec3 grip_offset_{Vec3::Zero()};
  double d0_ = 1.0;
  int trigger_step_ = -1;
  int attach_step_ = -1;
  bool started_ = false;
  bool done_ = true;
};

struct EpisodeRecord {
  EnvSettings settings;
  std::vector<Transition> transitions;
  double sum_rewards = 0.0;
  int outcome = 0;  // 1 iff sum_rewards == 20
  int trigger_step = -1;
  int attach_step = -1;
  bool toppled = false;
};

using Policy = std::function<double(const StateVector&)>;

// Runs one full episode under `policy` and returns the complete record.
EpisodeRecord rollout(GraspEnv& env, const EnvSettings& settings, const Policy& policy);

}  // namespace grasplab::env

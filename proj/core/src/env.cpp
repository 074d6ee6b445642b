#include "grasplab/env.hpp"

#include <cmath>
#include <stdexcept>

namespace grasplab::env {

void PhysicsConstants::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(r_obj, "r_obj");
  positive(a_max, "a_max");
  positive(v_close, "v_close");
  positive(d_grasp, "d_grasp");
  positive(d_contact, "d_contact");
  positive(z_trig, "z_trig");
  positive(h_hold, "h_hold");
  positive(dt, "dt");
  if (d_grasp > d_contact) throw std::invalid_argument("d_grasp must be <= d_contact");
  if (!(a_max > 2.0 * r_obj)) {
    throw std::invalid_argument("a_max must exceed the object diameter (open hand clears it)");
  }
}

StateVector pack_state(const EnvState& s) {
  StateVector v(kStateDim);
  v.segment<3>(kHandPos) = s.hand.position;
  v(kHandQuat + 0) = s.hand.orientation.w();
  v(kHandQuat + 1) = s.hand.orientation.x();
  v(kHandQuat + 2) = s.hand.orientation.y();
  v(kHandQuat + 3) = s.hand.orientation.z();
  v.segment<3>(kHandLinVel) = s.hand_lin_vel;
  v.segment<3>(kHandAngVel) = s.hand_ang_vel;
  v(kClosure) = s.closure;
  v(kClosureRate) = s.closure_rate;
  v.segment<3>(kObjectPos) = s.object_pos;
  v.segment<3>(kObjectVel) = s.object_vel;
  return v;
}

GraspEnv::GraspEnv(std::shared_ptr<const traj::TrajectorySet> set, PhysicsConstants physics,
                   double time_scale)
    : set_(std::move(set)), physics_(physics), time_scale_(time_scale) {
  if (!set_ || set_->trajectories.empty()) {
    throw std::invalid_argument("GraspEnv needs a non-empty trajectory set");
  }
  physics_.validate();
}

StateVector GraspEnv::reset(const EnvSettings& settings) {
  const traj::Trajectory& base = set_->at(settings.trajectory_id);
  const traj::Trajectory warped = traj::time_warp(base, time_scale_, settings.tn);
  const traj::Trajectory shifted = traj::apply_offset(warped, settings.dx, settings.dy);
  const traj::Trajectory sampled = traj::resample(shifted, physics_.dt);
  path_ = sampled.poses();

  state_ = EnvState{};
  state_.hand = path_.front();
  grip_offset_.setZero();
  d0_ = std::max(state_.hand.position.norm(), 1e-9);
  trigger_step_ = -1;
  attach_step_ = -1;
  started_ = true;
  done_ = false;
  update_trigger();
  return pack_state(state_);
}

void GraspEnv::update_trigger() {
  if (trigger_step_ >= 0) return;
  if (state_.hand.position.z() > physics_.z_trig || state_.object_pos.z() > physics_.z_trig) {
    trigger_step_ = state_.step;
  }
}

StepResult GraspEnv::step(double action) {
  if (!started_ || done_) throw SteppedAfterDone("step() called on a finished episode");

  const double a = std::clamp(action, -1.0, 1.0);
  const double dt = physics_.dt;

  // 1. closure integrates the commanded rate.
  const double h_prev = state_.closure;
  state_.closure = std::clamp(h_prev + a * physics_.v_close * dt, 0.0, 1.0);
  state_.closure_rate = (state_.closure - h_prev) / dt;

  // 2. hand advances along the trajectory; frozen at the end.
  const int next = state_.step + 1;
  if (next < static_cast<int>(path_.size())) {
    const traj::Pose& prev = state_.hand;
    const traj::Pose& cur = path_[next];
    state_.hand_lin_vel = (cur.position - prev.position) / dt;
    state_.hand_ang_vel = rotation_vector_between(prev.orientation, cur.orientation) / dt;
    state_.hand = cur;
  } else {
    state_.hand_lin_vel.setZero();
    state_.hand_ang_vel.setZero();
  }
  state_.step = next;

  // 3. grasp rules, in order.
  const double d = (state_.hand.position - state_.object_pos).norm();
  const double aperture = physics_.aperture(state_.closure);
  const Vec3 obj_prev = state_.object_pos;
  if (!state_.attached && !state_.toppled && d > physics_.d_grasp && d <= physics_.d_contact &&
      aperture < 2.0 * physics_.r_obj) {
    state_.toppled = true;
  }
  if (!state_.attached && !state_.toppled && d <= physics_.d_grasp &&
      aperture <= 2.0 * physics_.r_obj) {
    state_.attached = true;
    grip_offset_ = state_.hand.position - state_.object_pos;
    if (attach_step_ < 0) attach_step_ = state_.step;
  }
  if (state_.attached && state_.closure >= physics_.h_hold) {
    Vec3 carried = state_.hand.position - grip_offset_;
    if (carried.z() < 0.0) carried.z() = 0.0;
    state_.object_pos = carried;
  }
  if (state_.attached && state_.closure < physics_.h_hold) {
    state_.attached = false;
    state_.object_pos.z() = 0.0;  // drops straight down
  }
  state_.object_vel = (state_.object_pos - obj_prev) / dt;

  // 4. trigger and reward window.
  update_trigger();
  double reward = 0.0;
  const bool in_window =
      trigger_step_ >= 0 && state_.step > trigger_step_ && state_.step <= trigger_step_ + kRewardWindow;
  if (in_window && state_.object_pos.z() > physics_.z_trig) reward = 1.0;

  const bool window_over = trigger_step_ >= 0 && state_.step >= trigger_step_ + kRewardWindow;
  const bool path_over = state_.step + 1 >= static_cast<int>(path_.size());
  done_ = window_over || (trigger_step_ < 0 && path_over);

  return StepResult{pack_state(state_), reward, done_};
}

double GraspEnv::normalized_distance() const {
  if (!started_) throw std::logic_error("normalized_distance before reset");
  return (state_.hand.position - state_.object_pos).norm() / d0_;
}

EpisodeRecord rollout(GraspEnv& env, const EnvSettings& settings, const Policy& policy) {
  EpisodeRecord rec;
  rec.settings = settings;
  StateVector s = env.reset(settings);
  while (!env.done()) {
    const double a = policy(s);
    StepResult res = env.step(a);
    rec.transitions.push_back(Transition{s, std::clamp(a, -1.0, 1.0), res.reward,
                                         res.state, res.done});
    rec.sum_rewards += res.reward;
    s = std::move(res.state);
  }
  rec.outcome = rec.sum_rewards == kMaxReturn ? 1 : 0;
  rec.trigger_step = env.trigger_step();
  rec.attach_step = env.attach_step();
  rec.toppled = env.state().toppled;
  return rec;
}

}  // namespace grasplab::env

#pragma once

#include <random>

#include "grasplab/env.hpp"

namespace grasplab::expert {

// Sampling bounds for the controller family.
struct ParamBounds {
  double k_min = 1.0;
  double k_max = 1.5;
  double dc_min = 0.01;
  double dc_max = 0.90;
};

struct ExpertParams {
  double gain = 1.25;        // K
  double d_critical = 0.50;  // critical normalized distance
  double h_open = 0.0;
  double h_closed = 0.8;

  void validate(const ParamBounds& bounds = {}) const;  // throws std::invalid_argument
};

// Two-phase proportional controller: far from the object (d_hat >= d_c) it
// drives the closure toward h_open, inside the critical distance toward
// h_closed. Output clamped to the action space [-1,1].
double expert_action(double closure, double d_hat, const ExpertParams& p);

// K ~ U[k_min,k_max], d_c ~ U[dc_min,dc_max], independent.
ExpertParams sample_params(std::mt19937_64& rng, const ParamBounds& bounds = {});

// Adapter turning the controller into a state-vector policy. The initial
// hand-object distance is captured from the first (reset) state it sees and
// used to normalize distances afterwards.
class ExpertPolicy {
 public:
  explicit ExpertPolicy(ExpertParams p) : params_(p) {}

  double operator()(const env::StateVector& s);
  void reset() { d0_ = -1.0; }

 private:
  ExpertParams params_;
  double d0_ = -1.0;
};

}  // namespace grasplab::expert

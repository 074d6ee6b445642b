#pragma once

#include <random>

#include "grasplab/mlp.hpp"

namespace grasplab::learn {

// Stochastic policy over a single action channel: an Mlp trunk emits
// (mean, log-std) of a Gaussian; samples are squashed to (-1,1) by tanh with
// the matching log-density correction.
struct GaussianPolicy {
  Mlp net;  // dims {state_dim, hidden..., 2}
  double log_std_min = -20.0;
  double log_std_max = 2.0;

  double act_deterministic(const VectorXd& s) const;  // tanh(mean)
  double act_sample(const VectorXd& s, std::mt19937_64& rng) const;
};

GaussianPolicy make_gaussian_policy(int state_dim, int hidden, std::mt19937_64& rng);

// One reparameterized draw per batch row, `eps` holding the fixed N(0,1)
// noise. Keeps everything backward() needs.
struct PolicySampleBatch {
  MlpCache cache;
  MatrixXd head;       // raw net output, B x 2
  VectorXd mean;
  VectorXd log_std;    // clamped
  VectorXd sigma;
  VectorXd eps;
  VectorXd pre_tanh;   // u = mean + sigma * eps
  VectorXd action;     // tanh(u), strictly inside (-1,1)
  VectorXd log_prob;
};

inline constexpr double kTanhCorrectionEps = 1e-6;

PolicySampleBatch sample_policy_batch(const GaussianPolicy& policy, const MatrixXd& states,
                                      const VectorXd& eps);

// Reverse pass for a loss with per-sample derivatives d_logprob and d_action.
// Accumulates trunk parameter gradients into `grads`.
void policy_backward(const GaussianPolicy& policy, const PolicySampleBatch& sample,
                     const VectorXd& d_logprob, const VectorXd& d_action, MlpGrads* grads);

}  // namespace grasplab::learn

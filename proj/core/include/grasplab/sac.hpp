#pragma once

#include <cstdint>
#include <memory>

#include "grasplab/mc_search.hpp"
#include "grasplab/policy.hpp"
#include "grasplab/replay_buffer.hpp"

namespace grasplab::learn {

struct SacConfig {
  int state_dim = env::kStateDim;
  int hidden = 256;
  double lr = 3e-4;
  std::size_t batch = 32;
  double polyak = 0.01;  // tau: target <- tau * net + (1 - tau) * target
  double gamma = 0.99;
  long warm_start = 10000;   // frames acted randomly before updates begin
  long epoch_frames = 1000;  // learning-curve bucket
  double alpha = 0.2;        // entropy coefficient
  bool auto_alpha = false;
  double target_entropy = -1.0;
  double dur = 0.1;  // demo-use ratio: share of each minibatch from the demo buffer
  std::size_t agent_buffer_capacity = 1000000;
  std::size_t demo_buffer_capacity = 1000000;
  long total_frames = 100000;
  std::size_t demo_episodes = 0;  // 0 = roll out every G_s record once
  std::uint64_t seed = 0;
};

struct SacNets {
  GaussianPolicy policy;
  Mlp q1, q2, v, v_target;
};

SacNets make_sac_nets(int state_dim, int hidden, std::mt19937_64& rng);

// Optimizer and entropy-coefficient state carried across updates.
struct SacTrainerState {
  AdamOptimizer opt_policy, opt_q1, opt_q2, opt_v;
  double log_alpha = 0.0;
  AdamState alpha_state;
};

SacTrainerState make_sac_trainer_state(const SacNets& nets, const SacConfig& cfg);

struct SacLossReport {
  double v = 0.0, q1 = 0.0, q2 = 0.0, policy = 0.0;
  double alpha = 0.0;  // coefficient used this update
};

// --- losses (pure; gradients optional) -------------------------------------
// Each returns the scalar loss; when the grads pointer is non-null the
// parameter gradients of the differentiated network are accumulated into it.
// `eps` is the fixed N(0,1) noise of the reparameterized action draw, which
// makes every loss a deterministic function of the parameters (finite
// differences check against exactly these functions).

// MSE(Q(s,a), r + gamma * (1 - done) * V_target(s')); differentiates q.
double q_loss(const Mlp& q, const Mlp& v_target, const Batch& batch, double gamma,
              MlpGrads* grads);

// MSE(V(s), min(Q1,Q2)(s, a~) - alpha * log pi(a~|s)); differentiates v.
double value_loss(const SacNets& nets, const Batch& batch, const VectorXd& eps, double alpha,
                  MlpGrads* grads);

// mean(alpha * log pi(a~|s) - min(Q1,Q2)(s, a~)); differentiates the policy.
double policy_loss(const SacNets& nets, const Batch& batch, const VectorXd& eps, double alpha,
                   MlpGrads* grads);

// target <- tau * src + (1 - tau) * target, element-wise.
void polyak_update(Mlp& target, const Mlp& src, double tau);

// One full update on a minibatch: V, Q1, Q2, policy steps in that order
// (optional alpha step), then the polyak move of V_target.
SacLossReport sac_update(SacNets& nets, SacTrainerState& state, const Batch& batch,
                         const SacConfig& cfg, std::mt19937_64& rng);

// --- training --------------------------------------------------------------

struct EpochStat {
  long epoch = 0;
  double mean_return = 0.0;
  double std_return = 0.0;
  long n_episodes = 0;
};

struct TrainResult {
  SacNets nets;
  std::vector<EpochStat> curve;
};

// SAC with a shared demonstration buffer. The demo buffer is filled once by
// rolling out the stored expert controllers from G_s; minibatches mix demo
// and agent transitions at ratio `dur`. dur = 0 is the pure-RL baseline.
// Single-threaded and fully deterministic for a fixed seed.
TrainResult train_rlil(std::shared_ptr<const traj::TrajectorySet> set,
                       const mc::McConfig& sampler, const std::vector<mc::GsRecord>& gs,
                       const SacConfig& cfg);

void write_curve_csv(const std::string& path, const std::vector<EpochStat>& curve);

// Mean return of `policy` over n fresh episodes sampled like the search does.
std::vector<double> evaluate_policy(std::shared_ptr<const traj::TrajectorySet> set,
                                    const mc::McConfig& sampler, const env::Policy& policy,
                                    std::size_t n_episodes, std::uint64_t seed);

env::Policy deterministic_policy(const GaussianPolicy& p);

}  // namespace grasplab::learn

#pragma once

#include "grasplab/mc_search.hpp"
#include "grasplab/policy.hpp"

namespace grasplab::learn {

// Supervised (state, action) pairs from expert rollouts.
struct SaDataset {
  MatrixXd states;
  VectorXd actions;

  Eigen::Index size() const { return actions.size(); }
};

struct BcConfig {
  int state_dim = env::kStateDim;
  int hidden = 256;
  double lr = 1e-3;
  double lr_decay = 0.5;
  int decay_every = 100;  // epochs
  std::size_t batch = 512;
  int epochs = 500;
  std::uint64_t seed = 0;
};

// lr * decay^(epoch / decay_every), integer division; epoch is 0-based.
double bc_lr_at_epoch(const BcConfig& cfg, int epoch);

// Rolls out `n_episodes` stored expert controllers (uniformly drawn from
// G_s; 0 = each record once) and collects every (s, a) pair.
SaDataset build_bc_dataset(std::shared_ptr<const traj::TrajectorySet> set,
                           const env::PhysicsConstants& physics, double time_scale,
                           const std::vector<mc::GsRecord>& gs, std::size_t n_episodes,
                           std::uint64_t seed);

struct BcEpochStat {
  int epoch = 0;
  double mse = 0.0;
  double lr = 0.0;
};

struct BcResult {
  GaussianPolicy policy;
  std::vector<BcEpochStat> curve;
};

// Minimizes MSE between tanh(mean(s)) -- the deterministic policy output --
// and the expert action. Same trunk architecture as the RL policy.
BcResult train_bc(const SaDataset& data, const BcConfig& cfg);

// Full-dataset MSE of the deterministic policy.
double bc_mse(const GaussianPolicy& policy, const SaDataset& data);

void write_bc_curve_csv(const std::string& path, const std::vector<BcEpochStat>& curve);

}  // namespace grasplab::learn

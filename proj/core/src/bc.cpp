#include "grasplab/bc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "grasplab/rng.hpp"

namespace grasplab::learn {

double bc_lr_at_epoch(const BcConfig& cfg, int epoch) {
  return cfg.lr * std::pow(cfg.lr_decay, epoch / cfg.decay_every);
}

SaDataset build_bc_dataset(std::shared_ptr<const traj::TrajectorySet> set,
                           const env::PhysicsConstants& physics, double time_scale,
                           const std::vector<mc::GsRecord>& gs, std::size_t n_episodes,
                           std::uint64_t seed) {
  if (gs.empty()) throw EmptyDataset("no G_s records to roll out");
  env::GraspEnv envi(set, physics, time_scale);
  std::vector<std::pair<env::StateVector, double>> pairs;
  const std::size_t n = n_episodes == 0 ? gs.size() : n_episodes;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pick = i % gs.size();
    if (n_episodes != 0) {
      std::mt19937_64 rng = make_rng(seed, i);
      std::uniform_int_distribution<std::size_t> dist(0, gs.size() - 1);
      pick = dist(rng);
    }
    const mc::GsRecord& rec = gs[pick];
    expert::ExpertPolicy expert_pi(mc::record_params(rec));
    const env::EpisodeRecord ep = rollout(envi, mc::record_settings(rec), std::ref(expert_pi));
    for (const auto& tr : ep.transitions) pairs.emplace_back(tr.s, tr.a);
  }
  SaDataset data;
  data.states.resize(static_cast<Eigen::Index>(pairs.size()), pairs.front().first.size());
  data.actions.resize(static_cast<Eigen::Index>(pairs.size()));
  for (Eigen::Index i = 0; i < data.actions.size(); ++i) {
    data.states.row(i) = pairs[static_cast<std::size_t>(i)].first.transpose();
    data.actions(i) = pairs[static_cast<std::size_t>(i)].second;
  }
  return data;
}

BcResult train_bc(const SaDataset& data, const BcConfig& cfg) {
  if (data.size() == 0) throw EmptyDataset("behavior cloning needs a non-empty dataset");

  std::mt19937_64 init_rng = make_rng(cfg.seed, 0xB001);
  std::mt19937_64 shuffle_rng = make_rng(cfg.seed, 0xB002);

  BcResult result;
  result.policy = make_gaussian_policy(cfg.state_dim, cfg.hidden, init_rng);
  Mlp& net = result.policy.net;
  AdamConfig acfg;
  acfg.lr = cfg.lr;
  AdamOptimizer opt(net, acfg);

  const Eigen::Index n = data.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.set_lr(bc_lr_at_epoch(cfg, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    Eigen::Index seen = 0;
    for (Eigen::Index ofs = 0; ofs < n; ofs += static_cast<Eigen::Index>(cfg.batch)) {
      const Eigen::Index b = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.batch), n - ofs);
      MatrixXd xs(b, data.states.cols());
      VectorXd ys(b);
      for (Eigen::Index i = 0; i < b; ++i) {
        xs.row(i) = data.states.row(order[static_cast<std::size_t>(ofs + i)]);
        ys(i) = data.actions(order[static_cast<std::size_t>(ofs + i)]);
      }
      MlpCache cache;
      const MatrixXd head = net.forward(xs, &cache);
      const VectorXd pred = head.col(0).array().tanh();
      const VectorXd residual = pred - ys;
      const double loss = residual.squaredNorm() / static_cast<double>(b);

      MatrixXd d_head = MatrixXd::Zero(b, head.cols());
      d_head.col(0) = (2.0 / static_cast<double>(b)) * residual.array() *
                      (1.0 - pred.array().square());
      MlpGrads grads = net.zero_grads();
      net.backward(cache, d_head, &grads);
      opt.step(net, grads);

      epoch_loss += loss * static_cast<double>(b);
      seen += b;
    }
    result.curve.push_back(BcEpochStat{epoch, epoch_loss / static_cast<double>(seen),
                                       bc_lr_at_epoch(cfg, epoch)});
  }
  return result;
}

double bc_mse(const GaussianPolicy& policy, const SaDataset& data) {
  const VectorXd pred = policy.net.forward(data.states).col(0).array().tanh();
  return (pred - data.actions).squaredNorm() / static_cast<double>(data.size());
}

void write_bc_curve_csv(const std::string& path, const std::vector<BcEpochStat>& curve) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,mse,lr\n";
  for (const auto& st : curve) out << st.epoch << ',' << st.mse << ',' << st.lr << '\n';
}

}  // namespace grasplab::learn

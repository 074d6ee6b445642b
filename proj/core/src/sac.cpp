#include "grasplab/sac.hpp"

#include <cmath>
#include <fstream>

#include "grasplab/rng.hpp"

namespace grasplab::learn {

namespace {

MatrixXd concat_state_action(const MatrixXd& s, const VectorXd& a) {
  MatrixXd x(s.rows(), s.cols() + 1);
  x.leftCols(s.cols()) = s;
  x.col(s.cols()) = a;
  return x;
}

}  // namespace

SacNets make_sac_nets(int state_dim, int hidden, std::mt19937_64& rng) {
  SacNets nets;
  nets.policy = make_gaussian_policy(state_dim, hidden, rng);
  nets.q1 = Mlp({state_dim + 1, hidden, hidden, 1}, rng);
  nets.q2 = Mlp({state_dim + 1, hidden, hidden, 1}, rng);
  nets.v = Mlp({state_dim, hidden, hidden, 1}, rng);
  nets.v_target = nets.v;
  return nets;
}

SacTrainerState make_sac_trainer_state(const SacNets& nets, const SacConfig& cfg) {
  SacTrainerState st;
  AdamConfig a;
  a.lr = cfg.lr;
  st.opt_policy = AdamOptimizer(nets.policy.net, a);
  st.opt_q1 = AdamOptimizer(nets.q1, a);
  st.opt_q2 = AdamOptimizer(nets.q2, a);
  st.opt_v = AdamOptimizer(nets.v, a);
  st.log_alpha = std::log(cfg.alpha);
  return st;
}

double q_loss(const Mlp& q, const Mlp& v_target, const Batch& batch, double gamma,
              MlpGrads* grads) {
  const Eigen::Index n = batch.size();
  const VectorXd v_next = v_target.forward(batch.s2).col(0);
  const VectorXd target =
      batch.r.array() + gamma * (1.0 - batch.done.array()) * v_next.array();

  MlpCache cache;
  const VectorXd pred = q.forward(concat_state_action(batch.s, batch.a), &cache).col(0);
  const VectorXd residual = pred - target;
  const double loss = residual.squaredNorm() / static_cast<double>(n);
  if (grads) {
    const MatrixXd d_out = (2.0 / static_cast<double>(n)) * residual;
    q.backward(cache, d_out, grads);
  }
  return loss;
}

double value_loss(const SacNets& nets, const Batch& batch, const VectorXd& eps, double alpha,
                  MlpGrads* grads) {
  const Eigen::Index n = batch.size();
  const PolicySampleBatch pi = sample_policy_batch(nets.policy, batch.s, eps);
  const MatrixXd sa = concat_state_action(batch.s, pi.action);
  const VectorXd q1 = nets.q1.forward(sa).col(0);
  const VectorXd q2 = nets.q2.forward(sa).col(0);
  const VectorXd target = q1.cwiseMin(q2) - alpha * pi.log_prob;

  MlpCache cache;
  const VectorXd pred = nets.v.forward(batch.s, &cache).col(0);
  const VectorXd residual = pred - target;
  const double loss = residual.squaredNorm() / static_cast<double>(n);
  if (grads) {
    const MatrixXd d_out = (2.0 / static_cast<double>(n)) * residual;
    nets.v.backward(cache, d_out, grads);
  }
  return loss;
}

double policy_loss(const SacNets& nets, const Batch& batch, const VectorXd& eps, double alpha,
                   MlpGrads* grads) {
  const Eigen::Index n = batch.size();
  const PolicySampleBatch pi = sample_policy_batch(nets.policy, batch.s, eps);
  const MatrixXd sa = concat_state_action(batch.s, pi.action);
  MlpCache c1, c2;
  const VectorXd q1 = nets.q1.forward(sa, &c1).col(0);
  const VectorXd q2 = nets.q2.forward(sa, &c2).col(0);
  const VectorXd qmin = q1.cwiseMin(q2);

  const double loss = (alpha * pi.log_prob - qmin).mean();
  if (grads) {
    const double inv_n = 1.0 / static_cast<double>(n);
    // d loss / d qmin_i = -1/n, routed to whichever Q achieved the min.
    MatrixXd d_q1 = MatrixXd::Zero(n, 1);
    MatrixXd d_q2 = MatrixXd::Zero(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (q1(i) <= q2(i)) {
        d_q1(i, 0) = -inv_n;
      } else {
        d_q2(i, 0) = -inv_n;
      }
    }
    // Only the input gradient of the Q nets is needed here; their parameters
    // are not being updated by this loss.
    const MatrixXd g_in1 = nets.q1.backward(c1, d_q1, nullptr);
    const MatrixXd g_in2 = nets.q2.backward(c2, d_q2, nullptr);
    const VectorXd d_action = g_in1.col(g_in1.cols() - 1) + g_in2.col(g_in2.cols() - 1);
    const VectorXd d_logprob = VectorXd::Constant(n, alpha * inv_n);
    policy_backward(nets.policy, pi, d_logprob, d_action, grads);
  }
  return loss;
}

void polyak_update(Mlp& target, const Mlp& src, double tau) {
  auto& tl = target.layers();
  const auto& sl = src.layers();
  for (std::size_t l = 0; l < tl.size(); ++l) {
    tl[l].w = tau * sl[l].w + (1.0 - tau) * tl[l].w;
    tl[l].b = tau * sl[l].b + (1.0 - tau) * tl[l].b;
  }
}

SacLossReport sac_update(SacNets& nets, SacTrainerState& state, const Batch& batch,
                         const SacConfig& cfg, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  VectorXd eps(batch.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = noise(rng);

  const double alpha = cfg.auto_alpha ? std::exp(state.log_alpha) : cfg.alpha;
  SacLossReport report;
  report.alpha = alpha;

  MlpGrads gv = nets.v.zero_grads();
  report.v = value_loss(nets, batch, eps, alpha, &gv);
  state.opt_v.step(nets.v, gv);

  MlpGrads g1 = nets.q1.zero_grads();
  report.q1 = q_loss(nets.q1, nets.v_target, batch, cfg.gamma, &g1);
  state.opt_q1.step(nets.q1, g1);

  MlpGrads g2 = nets.q2.zero_grads();
  report.q2 = q_loss(nets.q2, nets.v_target, batch, cfg.gamma, &g2);
  state.opt_q2.step(nets.q2, g2);

  MlpGrads gp = nets.policy.net.zero_grads();
  report.policy = policy_loss(nets, batch, eps, alpha, &gp);
  state.opt_policy.step(nets.policy.net, gp);

  if (cfg.auto_alpha) {
    // Gradient of -log_alpha * mean(log pi + target entropy) in log_alpha.
    const PolicySampleBatch pi = sample_policy_batch(nets.policy, batch.s, eps);
    const double g = -(pi.log_prob.array() + cfg.target_entropy).mean();
    VectorXd p(1), grad(1);
    p(0) = state.log_alpha;
    grad(0) = g;
    AdamConfig acfg;
    acfg.lr = cfg.lr;
    adam_step(p, grad, state.alpha_state, acfg);
    state.log_alpha = p(0);
  }

  polyak_update(nets.v_target, nets.v, cfg.polyak);
  return report;
}

env::Policy deterministic_policy(const GaussianPolicy& p) {
  return [&p](const env::StateVector& s) { return p.act_deterministic(s); };
}

TrainResult train_rlil(std::shared_ptr<const traj::TrajectorySet> set,
                       const mc::McConfig& sampler, const std::vector<mc::GsRecord>& gs,
                       const SacConfig& cfg) {
  if (cfg.dur > 0.0 && gs.empty()) {
    throw EmptyBuffer("dur > 0 requires a non-empty G_s demonstration set");
  }

  std::mt19937_64 init_rng = make_rng(cfg.seed, 0xA110);
  std::mt19937_64 settings_rng = make_rng(cfg.seed, 0x5E77);
  std::mt19937_64 action_rng = make_rng(cfg.seed, 0xAC71);
  std::mt19937_64 batch_rng = make_rng(cfg.seed, 0xBA7C);

  TrainResult result;
  result.nets = make_sac_nets(cfg.state_dim, cfg.hidden, init_rng);
  SacTrainerState trainer = make_sac_trainer_state(result.nets, cfg);

  ReplayBuffer agent_buf(cfg.agent_buffer_capacity);
  ReplayBuffer demo_buf(cfg.demo_buffer_capacity);

  env::GraspEnv envi(set, sampler.physics, sampler.time_scale);

  // Demonstrations: one rollout per stored record (cycled if more requested).
  if (cfg.dur > 0.0) {
    const std::size_t n_demo = cfg.demo_episodes == 0 ? gs.size() : cfg.demo_episodes;
    for (std::size_t i = 0; i < n_demo; ++i) {
      const mc::GsRecord& rec = gs[i % gs.size()];
      expert::ExpertPolicy expert_pi(mc::record_params(rec));
      env::EpisodeRecord ep = rollout(envi, mc::record_settings(rec), std::ref(expert_pi));
      for (auto& tr : ep.transitions) demo_buf.add(std::move(tr));
    }
  }

  std::uniform_real_distribution<double> random_action(-1.0, 1.0);
  std::normal_distribution<double> unit_noise(0.0, 1.0);

  long frames = 0;
  std::vector<double> epoch_returns;
  double episode_return = 0.0;

  env::StateVector s = envi.reset(mc::sample_settings(settings_rng, sampler, *set));
  while (frames < cfg.total_frames) {
    const double a = frames < cfg.warm_start
                         ? random_action(action_rng)
                         : result.nets.policy.act_sample(s, action_rng);
    env::StepResult res = envi.step(a);
    agent_buf.add(env::Transition{s, std::clamp(a, -1.0, 1.0), res.reward, res.state, res.done});
    episode_return += res.reward;
    s = std::move(res.state);
    ++frames;

    if (frames >= cfg.warm_start) {
      const Batch batch =
          sample_mixed_batch(agent_buf, demo_buf, cfg.batch, cfg.dur, batch_rng);
      sac_update(result.nets, trainer, batch, cfg, batch_rng);
    }

    if (envi.done()) {
      epoch_returns.push_back(episode_return);
      episode_return = 0.0;
      s = envi.reset(mc::sample_settings(settings_rng, sampler, *set));
    }

    if (frames % cfg.epoch_frames == 0) {
      EpochStat st;
      st.epoch = frames / cfg.epoch_frames;
      st.n_episodes = static_cast<long>(epoch_returns.size());
      if (!epoch_returns.empty()) {
        double sum = 0.0;
        for (double r : epoch_returns) sum += r;
        st.mean_return = sum / static_cast<double>(epoch_returns.size());
        double var = 0.0;
        for (double r : epoch_returns) var += (r - st.mean_return) * (r - st.mean_return);
        st.std_return = std::sqrt(var / static_cast<double>(epoch_returns.size()));
      }
      result.curve.push_back(st);
      epoch_returns.clear();
    }
  }
  return result;
}

void write_curve_csv(const std::string& path, const std::vector<EpochStat>& curve) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "epoch,mean_return,std_return,n_episodes\n";
  for (const auto& st : curve) {
    out << st.epoch << ',' << st.mean_return << ',' << st.std_return << ',' << st.n_episodes
        << '\n';
  }
}

std::vector<double> evaluate_policy(std::shared_ptr<const traj::TrajectorySet> set,
                                    const mc::McConfig& sampler, const env::Policy& policy,
                                    std::size_t n_episodes, std::uint64_t seed) {
  env::GraspEnv envi(set, sampler.physics, sampler.time_scale);
  std::vector<double> returns;
  returns.reserve(n_episodes);
  for (std::size_t i = 0; i < n_episodes; ++i) {
    std::mt19937_64 rng = make_rng(seed, i);
    const env::EnvSettings settings = mc::sample_settings(rng, sampler, *set);
    returns.push_back(rollout(envi, settings, policy).sum_rewards);
  }
  return returns;
}

}  // namespace grasplab::learn

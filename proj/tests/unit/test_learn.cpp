#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>

#include "grasplab/bc.hpp"
#include "grasplab/checkpoint.hpp"
#include "grasplab/mc_search.hpp"
#include "grasplab/replay_buffer.hpp"
#include "grasplab/sac.hpp"
#include "grasplab/synthetic.hpp"

using namespace grasplab;
using namespace grasplab::learn;

namespace {

// Central finite differences on the flattened parameters of `net`.
// `loss` must be a pure function of the parameters.
void check_gradients(Mlp& net, const std::function<double()>& loss, const VectorXd& analytic,
                     double eps = 1e-5, double tol = 1e-4) {
  const VectorXd base = net.flatten();
  REQUIRE(analytic.size() == base.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    VectorXd p = base;
    p(i) = base(i) + eps;
    net.unflatten(p);
    const double up = loss();
    p(i) = base(i) - eps;
    net.unflatten(p);
    const double down = loss();
    const double fd = (up - down) / (2.0 * eps);
    const double denom = std::max({std::abs(fd), std::abs(analytic(i)), 1e-8});
    worst = std::max(worst, std::abs(fd - analytic(i)) / denom);
  }
  net.unflatten(base);
  CHECK(worst < tol);
}

Batch random_batch(int n, int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> ua(-0.9, 0.9);
  Batch b;
  b.s.resize(n, dim);
  b.s2.resize(n, dim);
  b.a.resize(n);
  b.r.resize(n);
  b.done.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) {
      b.s(i, j) = g(rng);
      b.s2(i, j) = g(rng);
    }
    b.a(i) = ua(rng);
    b.r(i) = (i % 3 == 0) ? 1.0 : 0.0;
    b.done(i) = (i % 4 == 0) ? 1.0 : 0.0;
  }
  return b;
}

VectorXd fixed_eps(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd e(n);
  for (int i = 0; i < n; ++i) e(i) = g(rng);
  return e;
}

env::Transition marked_transition(int dim, double reward) {
  env::Transition t;
  t.s = VectorXd::Zero(dim);
  t.s2 = VectorXd::Zero(dim);
  t.a = 0.0;
  t.r = reward;
  t.done = false;
  return t;
}

}  // namespace

TEST_CASE("mlp forward matches a naive re-implementation") {
  std::mt19937_64 rng(1);
  const std::vector<int> dims{5, 7, 4, 2};
  Mlp net(dims, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd x(3, 5);
  for (int i = 0; i < x.size(); ++i) x(i / 5, i % 5) = g(rng);

  const MatrixXd out = net.forward(x);

  // Naive loop version, written independently of the library path.
  for (int row = 0; row < 3; ++row) {
    std::vector<double> cur(5);
    for (int j = 0; j < 5; ++j) cur[j] = x(row, j);
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      const auto& lay = net.layers()[l];
      std::vector<double> nxt(static_cast<std::size_t>(lay.w.rows()), 0.0);
      for (int r = 0; r < lay.w.rows(); ++r) {
        double acc = lay.b(r);
        for (int c = 0; c < lay.w.cols(); ++c) acc += lay.w(r, c) * cur[c];
        if (l + 1 < net.layers().size() && acc < 0.0) acc = 0.0;
        nxt[static_cast<std::size_t>(r)] = acc;
      }
      cur.assign(nxt.begin(), nxt.end());
    }
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(out(row, j) - cur[static_cast<std::size_t>(j)]) < 1e-10);
    }
  }
}

TEST_CASE("mlp: zero parameters give zero output; identity passes input through") {
  std::mt19937_64 rng(2);
  Mlp net({3, 3, 3}, rng);
  net.unflatten(VectorXd::Zero(net.param_count()));
  CHECK(net.forward1(VectorXd::Constant(3, 1.5)).norm() == 0.0);

  // Identity weights in both layers: positive input passes the hidden ReLU
  // unchanged.
  for (auto& l : net.layers()) {
    l.w = MatrixXd::Identity(3, 3);
    l.b.setZero();
  }
  VectorXd x(3);
  x << 0.3, 1.2, 0.01;
  CHECK((net.forward1(x) - x).norm() < 1e-15);
}

TEST_CASE("mlp: dimension mismatch throws") {
  std::mt19937_64 rng(3);
  Mlp net({4, 3, 1}, rng);
  CHECK_THROWS_AS(net.forward1(VectorXd::Zero(5)), DimensionMismatch);
}

TEST_CASE("mlp backward: finite-difference check on a generic loss") {
  std::mt19937_64 rng(4);
  Mlp net({3, 8, 2}, rng);
  MatrixXd x(4, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < x.size(); ++i) x(i / 3, i % 3) = g(rng);
  MatrixXd target(4, 2);
  for (int i = 0; i < target.size(); ++i) target(i / 2, i % 2) = g(rng);

  auto loss_fn = [&]() {
    const MatrixXd out = net.forward(x);
    return (out - target).squaredNorm() / out.rows();
  };
  MlpCache cache;
  const MatrixXd out = net.forward(x, &cache);
  MlpGrads grads = net.zero_grads();
  const MatrixXd d_out = 2.0 * (out - target) / out.rows();
  net.backward(cache, d_out, &grads);
  check_gradients(net, loss_fn, flatten_grads(net, grads));
}

TEST_CASE("mlp backward: constant loss has zero gradient; dead ReLU units too") {
  std::mt19937_64 rng(5);
  Mlp net({2, 4, 1}, rng);
  MatrixXd x(1, 2);
  x << 1.0, -0.5;
  MlpCache cache;
  net.forward(x, &cache);
  MlpGrads grads = net.zero_grads();
  net.backward(cache, MatrixXd::Zero(1, 1), &grads);
  CHECK(flatten_grads(net, grads).norm() == 0.0);

  // Force one hidden unit dead and check its incoming weight gradient is 0.
  net.layers()[0].b(0) = -100.0;  // unit 0 pre-activation strongly negative
  MlpCache c2;
  net.forward(x, &c2);
  MlpGrads g2 = net.zero_grads();
  net.backward(c2, MatrixXd::Ones(1, 1), &g2);
  CHECK(g2.layers[0].w.row(0).norm() == 0.0);
  CHECK(g2.layers[0].b(0) == 0.0);
}

TEST_CASE("adam: first-step and invariance examples") {
  VectorXd p = VectorXd::Zero(2);
  VectorXd g = VectorXd::Ones(2);
  AdamState st;
  AdamConfig cfg;
  cfg.lr = 1e-3;
  adam_step(p, g, st, cfg);
  const double expected = -1e-3 * (1.0 / (1.0 + 1e-8));
  CHECK(std::abs(p(0) - expected) < 1e-15);
  CHECK(p(0) == p(1));  // equal gradients update identically

  // Zero gradient with zero state: no change.
  VectorXd q = VectorXd::Constant(3, 0.7);
  AdamState st2;
  adam_step(q, VectorXd::Zero(3), st2, cfg);
  CHECK((q.array() == 0.7).all());
}

TEST_CASE("polyak: exact element-wise identity") {
  std::mt19937_64 rng(6);
  Mlp v({3, 4, 1}, rng);
  Mlp vt({3, 4, 1}, rng);
  const Mlp vt_old = vt;
  polyak_update(vt, v, 0.01);
  for (std::size_t l = 0; l < v.layers().size(); ++l) {
    const MatrixXd expect = 0.01 * v.layers()[l].w + 0.99 * vt_old.layers()[l].w;
    CHECK(vt.layers()[l].w == expect);
  }

  // Table example: parameter 1, target 0, tau 0.01 -> 0.01.
  Mlp one({1, 1}, rng), zero({1, 1}, rng);
  one.unflatten(VectorXd::Ones(one.param_count()));
  zero.unflatten(VectorXd::Zero(zero.param_count()));
  polyak_update(zero, one, 0.01);
  CHECK(zero.flatten()(0) == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("replay buffer: oldest-first eviction and uniform sampling") {
  ReplayBuffer buf(4);
  for (int i = 0; i < 6; ++i) {
    buf.add(marked_transition(2, static_cast<double>(i)));
  }
  CHECK(buf.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(buf.at(i).r == static_cast<double>(i + 2));

  // Chi-squared uniformity over 1e5 draws from 10 items, df = 9.
  ReplayBuffer b10(10);
  for (int i = 0; i < 10; ++i) b10.add(marked_transition(2, static_cast<double>(i)));
  std::mt19937_64 rng(7);
  std::vector<long> counts(10, 0);
  const long draws = 100000;
  for (long i = 0; i < draws; i += 50) {
    const Batch batch = b10.sample(50, rng);
    for (Eigen::Index j = 0; j < batch.size(); ++j) {
      counts[static_cast<std::size_t>(batch.r(j))] += 1;
    }
  }
  const double expect = draws / 10.0;
  double chi2 = 0.0;
  for (long c : counts) chi2 += (c - expect) * (c - expect) / expect;
  CHECK(chi2 < 21.666);  // critical value at p = 0.01, df = 9
}

TEST_CASE("mixed batch composition is exactly round(batch * dur)") {
  ReplayBuffer agent(1000), demo(1000);
  for (int i = 0; i < 100; ++i) {
    agent.add(marked_transition(2, 0.0));
    demo.add(marked_transition(2, 1000.0));
  }
  std::mt19937_64 rng(8);
  auto count_demo = [](const Batch& b) {
    int n = 0;
    for (Eigen::Index i = 0; i < b.size(); ++i) n += b.r(i) == 1000.0 ? 1 : 0;
    return n;
  };
  CHECK(demo_count(32, 0.1) == 3);   // round(3.2)
  CHECK(demo_count(32, 0.3) == 10);  // round(9.6)
  CHECK(count_demo(sample_mixed_batch(agent, demo, 32, 0.1, rng)) == 3);
  CHECK(count_demo(sample_mixed_batch(agent, demo, 32, 0.3, rng)) == 10);
  CHECK(count_demo(sample_mixed_batch(agent, demo, 32, 0.0, rng)) == 0);
  CHECK(count_demo(sample_mixed_batch(agent, demo, 32, 1.0, rng)) == 32);

  ReplayBuffer empty(10);
  CHECK_THROWS_AS(sample_mixed_batch(agent, empty, 32, 0.5, rng), EmptyBuffer);
  CHECK_NOTHROW(sample_mixed_batch(agent, empty, 32, 0.0, rng));
}

TEST_CASE("gaussian policy: squashed actions strictly inside (-1,1), finite log-prob") {
  std::mt19937_64 rng(9);
  GaussianPolicy pi = make_gaussian_policy(3, 8, rng);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    VectorXd s(3);
    s << g(rng) * 10.0, g(rng) * 10.0, g(rng) * 10.0;
    const double a = pi.act_sample(s, rng);
    CHECK(a > -1.0);
    CHECK(a < 1.0);
  }
  // Log-prob stays finite even at extreme squashing.
  MatrixXd states = MatrixXd::Constant(1, 3, 100.0);
  VectorXd eps = VectorXd::Constant(1, 10.0);
  const PolicySampleBatch sample = sample_policy_batch(pi, states, eps);
  CHECK(std::isfinite(sample.log_prob(0)));
  CHECK(std::abs(sample.action(0)) <= 1.0);
}

TEST_CASE("sac losses: finite-difference gradient checks on hidden-size-8 nets") {
  std::mt19937_64 rng(10);
  const int dim = 3, n = 5;
  SacNets nets = make_sac_nets(dim, 8, rng);
  const Batch batch = random_batch(n, dim, rng);
  const VectorXd eps = fixed_eps(n, rng);
  const double alpha = 0.2;

  SUBCASE("value loss wrt V") {
    MlpGrads g = nets.v.zero_grads();
    value_loss(nets, batch, eps, alpha, &g);
    check_gradients(nets.v, [&]() { return value_loss(nets, batch, eps, alpha, nullptr); },
                    flatten_grads(nets.v, g));
  }
  SUBCASE("q loss wrt Q1") {
    MlpGrads g = nets.q1.zero_grads();
    q_loss(nets.q1, nets.v_target, batch, 0.99, &g);
    check_gradients(nets.q1,
                    [&]() { return q_loss(nets.q1, nets.v_target, batch, 0.99, nullptr); },
                    flatten_grads(nets.q1, g));
  }
  SUBCASE("q loss wrt Q2") {
    MlpGrads g = nets.q2.zero_grads();
    q_loss(nets.q2, nets.v_target, batch, 0.99, &g);
    check_gradients(nets.q2,
                    [&]() { return q_loss(nets.q2, nets.v_target, batch, 0.99, nullptr); },
                    flatten_grads(nets.q2, g));
  }
  SUBCASE("policy loss wrt policy") {
    MlpGrads g = nets.policy.net.zero_grads();
    policy_loss(nets, batch, eps, alpha, &g);
    check_gradients(nets.policy.net,
                    [&]() { return policy_loss(nets, batch, eps, alpha, nullptr); },
                    flatten_grads(nets.policy.net, g));
  }
}

TEST_CASE("q target: terminal transitions bootstrap to r; zero nets give loss 1") {
  std::mt19937_64 rng(11);
  SacNets nets = make_sac_nets(2, 4, rng);
  nets.q1.unflatten(VectorXd::Zero(nets.q1.param_count()));
  nets.v_target.unflatten(VectorXd::Zero(nets.v_target.param_count()));
  Batch b = random_batch(6, 2, rng);
  b.r.setOnes();
  b.done.setOnes();
  // Q(s,a) = 0 everywhere, target = r = 1 -> MSE = 1.
  CHECK(q_loss(nets.q1, nets.v_target, b, 0.99, nullptr) == doctest::Approx(1.0).epsilon(1e-12));
  // Also exact with done = 0 since V_target is the zero function.
  b.done.setZero();
  CHECK(q_loss(nets.q1, nets.v_target, b, 0.99, nullptr) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sac_update: deterministic and finite") {
  std::mt19937_64 rng(12);
  SacNets nets = make_sac_nets(3, 8, rng);
  SacConfig cfg;
  cfg.state_dim = 3;
  cfg.hidden = 8;
  SacTrainerState st1 = make_sac_trainer_state(nets, cfg);
  const Batch batch = random_batch(8, 3, rng);

  SacNets n1 = nets, n2 = nets;
  SacTrainerState st2 = st1;
  std::mt19937_64 r1(55), r2(55);
  const SacLossReport a = sac_update(n1, st1, batch, cfg, r1);
  const SacLossReport b = sac_update(n2, st2, batch, cfg, r2);
  CHECK(a.v == b.v);
  CHECK(a.policy == b.policy);
  CHECK(n1.policy.net.flatten() == n2.policy.net.flatten());
  CHECK(n1.v_target.flatten() == n2.v_target.flatten());
  CHECK(std::isfinite(a.v));
  CHECK(std::isfinite(a.q1));
  CHECK(std::isfinite(a.q2));
  CHECK(std::isfinite(a.policy));
}

TEST_CASE("train_rlil: curve length, determinism, demo handling") {
  auto set = std::make_shared<traj::TrajectorySet>(
      traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02));
  mc::McConfig sampler;

  SacConfig cfg;
  cfg.state_dim = env::kStateDim;
  cfg.hidden = 8;
  cfg.warm_start = 60;
  cfg.total_frames = 300;
  cfg.epoch_frames = 100;
  cfg.batch = 8;
  cfg.dur = 0.0;  // pure RL: demo buffer untouched (and may be empty)
  cfg.seed = 31;

  const TrainResult r1 = train_rlil(set, sampler, {}, cfg);
  CHECK(r1.curve.size() == 3);  // total_frames / epoch_frames

  const TrainResult r2 = train_rlil(set, sampler, {}, cfg);
  CHECK(r1.nets.policy.net.flatten() == r2.nets.policy.net.flatten());
  REQUIRE(r1.curve.size() == r2.curve.size());
  for (std::size_t i = 0; i < r1.curve.size(); ++i) {
    CHECK(r1.curve[i].mean_return == r2.curve[i].mean_return);
    CHECK(r1.curve[i].n_episodes == r2.curve[i].n_episodes);
  }

  // dur > 0 without demonstrations is a contract violation.
  SacConfig bad = cfg;
  bad.dur = 0.1;
  CHECK_THROWS_AS(train_rlil(set, sampler, {}, bad), EmptyBuffer);
}

TEST_CASE("train_rlil with demonstrations from a working controller") {
  auto set = std::make_shared<traj::TrajectorySet>(
      traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02));
  mc::McConfig sampler;

  // Find a working controller for the nominal settings by scanning d_c.
  env::GraspEnv envi(set, sampler.physics, sampler.time_scale);
  mc::GsRecord rec;
  bool found = false;
  for (double dc = 0.05; dc <= 0.9 && !found; dc += 0.025) {
    expert::ExpertParams p;
    p.gain = 1.25;
    p.d_critical = dc;
    expert::ExpertPolicy pi(p);
    const env::EpisodeRecord ep =
        rollout(envi, env::EnvSettings{0, 0.0, 0.0, 0.5, 0}, std::ref(pi));
    if (ep.sum_rewards == 20.0) {
      rec = mc::GsRecord{0, 0.0, 0.0, 0.5, p.gain, p.d_critical, 0, ep.sum_rewards};
      found = true;
    }
  }
  REQUIRE(found);  // a mid-range controller succeeds on a straight approach

  SacConfig cfg;
  cfg.hidden = 8;
  cfg.warm_start = 50;
  cfg.total_frames = 200;
  cfg.epoch_frames = 100;
  cfg.batch = 8;
  cfg.dur = 0.5;
  cfg.seed = 7;
  const TrainResult r = train_rlil(set, sampler, {rec}, cfg);
  CHECK(r.curve.size() == 2);
}

TEST_CASE("bc: lr schedule and memorizing a single pair") {
  BcConfig cfg;
  CHECK(bc_lr_at_epoch(cfg, 0) == 1e-3);
  CHECK(bc_lr_at_epoch(cfg, 99) == 1e-3);
  CHECK(bc_lr_at_epoch(cfg, 100) == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK(bc_lr_at_epoch(cfg, 250) == doctest::Approx(2.5e-4).epsilon(1e-12));

  SaDataset data;
  data.states = MatrixXd::Constant(64, 4, 0.3);
  data.actions = VectorXd::Constant(64, 0.5);
  BcConfig small;
  small.state_dim = 4;
  small.hidden = 8;
  small.epochs = 600;
  small.batch = 16;
  small.seed = 3;
  const BcResult r = train_bc(data, small);
  CHECK(bc_mse(r.policy, data) < 1e-5);
  // Loss decays towards zero over training.
  CHECK(r.curve.back().mse < r.curve.front().mse * 1e-2);

  CHECK_THROWS_AS(train_bc(SaDataset{}, small), EmptyDataset);
}

TEST_CASE("checkpoints: exact round trips and missing-file errors") {
  std::mt19937_64 rng(13);
  SacNets nets = make_sac_nets(4, 8, rng);
  SacConfig cfg;
  cfg.state_dim = 4;
  cfg.hidden = 8;
  SacTrainerState st = make_sac_trainer_state(nets, cfg);
  // Touch the optimizer so its state is non-trivial.
  const Batch batch = random_batch(4, 4, rng);
  std::mt19937_64 r2(3);
  sac_update(nets, st, batch, cfg, r2);

  save_sac_checkpoint("test_ckpt_sac.json", nets, st);
  SacTrainerState st_back = make_sac_trainer_state(nets, cfg);
  const SacNets back = load_sac_checkpoint("test_ckpt_sac.json", &st_back);
  CHECK(back.policy.net.flatten() == nets.policy.net.flatten());
  CHECK(back.q1.flatten() == nets.q1.flatten());
  CHECK(back.v_target.flatten() == nets.v_target.flatten());
  CHECK(st_back.opt_v.state().m == st.opt_v.state().m);
  CHECK(st_back.opt_v.state().t == st.opt_v.state().t);

  save_policy_checkpoint("test_ckpt_pi.json", nets.policy);
  const GaussianPolicy pi = load_policy_checkpoint("test_ckpt_pi.json");
  CHECK(pi.net.flatten() == nets.policy.net.flatten());
  const GaussianPolicy pi2 = load_any_policy("test_ckpt_sac.json");
  CHECK(pi2.net.flatten() == nets.policy.net.flatten());

  CHECK_THROWS_AS(load_policy_checkpoint("no_such_file.json"), MissingCheckpoint);
  std::remove("test_ckpt_sac.json");
  std::remove("test_ckpt_pi.json");
}

TEST_CASE("evaluate_policy is deterministic for a fixed seed") {
  auto set = std::make_shared<traj::TrajectorySet>(
      traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02));
  mc::McConfig sampler;
  const env::Policy zero = [](const env::StateVector&) { return 0.0; };
  const auto a = evaluate_policy(set, sampler, zero, 20, 77);
  const auto b = evaluate_policy(set, sampler, zero, 20, 77);
  CHECK(a == b);
  for (double r : a) {
    CHECK(r >= 0.0);
    CHECK(r <= 20.0);
  }
}

#include <benchmark/benchmark.h>

#include <memory>
#include <random>

#include "grasplab/mc_search.hpp"
#include "grasplab/sac.hpp"
#include "grasplab/synthetic.hpp"

using namespace grasplab;

namespace {

std::shared_ptr<const traj::TrajectorySet> bench_set() {
  static auto set = std::make_shared<traj::TrajectorySet>(
      traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02));
  return set;
}

void BM_EnvRollout(benchmark::State& state) {
  env::GraspEnv envi(bench_set(), env::PhysicsConstants{}, 2.5);
  const env::EnvSettings settings{0, 0.01, -0.02, 0.5, 0};
  const env::Policy zero = [](const env::StateVector&) { return 0.2; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(rollout(envi, settings, zero).sum_rewards);
  }
}
BENCHMARK(BM_EnvRollout);

void BM_Resample(benchmark::State& state) {
  const traj::Trajectory base = bench_set()->at(0);
  const traj::Trajectory warped = traj::time_warp(base, 2.5, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(traj::resample(warped, 0.02).size());
  }
}
BENCHMARK(BM_Resample);

void BM_Squad(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rq = [&]() { return normalized(Quat(g(rng), g(rng), g(rng), g(rng))); };
  const Quat q0 = rq(), q1 = rq(), q2 = rq(), q3 = rq();
  double u = 0.0;
  for (auto _ : state) {
    u += 0.001;
    if (u > 1.0) u = 0.0;
    benchmark::DoNotOptimize(squad(q0, q1, q2, q3, u));
  }
}
BENCHMARK(BM_Squad);

void BM_McSearch1k(benchmark::State& state) {
  mc::McConfig cfg;
  cfg.n_samples = 1000;
  cfg.workers = static_cast<int>(state.range(0));
  cfg.master_seed = 3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc::run_search(cfg, bench_set()).stats.n_accepted);
  }
}
BENCHMARK(BM_McSearch1k)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_MlpForwardBatch(benchmark::State& state) {
  std::mt19937_64 rng(2);
  learn::Mlp net({env::kStateDim, 256, 256, 2}, rng);
  const learn::MatrixXd x = learn::MatrixXd::Random(32, env::kStateDim);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(x).sum());
  }
}
BENCHMARK(BM_MlpForwardBatch);

void BM_SacUpdate(benchmark::State& state) {
  std::mt19937_64 rng(3);
  learn::SacNets nets = learn::make_sac_nets(env::kStateDim, 256, rng);
  learn::SacConfig cfg;
  learn::SacTrainerState st = learn::make_sac_trainer_state(nets, cfg);
  std::normal_distribution<double> g(0.0, 1.0);
  learn::Batch b;
  const int n = 32;
  b.s = learn::MatrixXd::Random(n, env::kStateDim);
  b.s2 = learn::MatrixXd::Random(n, env::kStateDim);
  b.a = learn::VectorXd::Random(n);
  b.r = learn::VectorXd::Ones(n);
  b.done = learn::VectorXd::Zero(n);
  std::mt19937_64 urng(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learn::sac_update(nets, st, b, cfg, urng).v);
  }
}
BENCHMARK(BM_SacUpdate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

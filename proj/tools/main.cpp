// grasplab command line: synthetic trajectory generation, Monte Carlo
// controller search, RL/IL training, policy evaluation, and the
// success-model pipeline. Every subcommand writes the resolved key=value
// configuration it ran with next to its outputs.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grasplab/bc.hpp"
#include "grasplab/checkpoint.hpp"
#include "grasplab/config.hpp"
#include "grasplab/episode_io.hpp"
#include "grasplab/mc_search.hpp"
#include "grasplab/rng.hpp"
#include "grasplab/sac.hpp"
#include "grasplab/success_model.hpp"
#include "grasplab/synthetic.hpp"

namespace fs = std::filesystem;
using namespace grasplab;
using nlohmann::json;

namespace {

struct CommonArgs {
  std::vector<std::string> config_files;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_out) {
  cmd->add_option("--config", args.config_files, "key=value config file (repeatable)");
  cmd->add_option("--set", args.overrides, "override a config key, e.g. --set seed=7");
  cmd->add_option("-o,--out", args.out_dir, "output directory")->default_val(default_out);
}

KvConfig load_config(const CommonArgs& args) {
  KvConfig cfg;
  for (const auto& f : args.config_files) cfg.merge_file(f);
  for (const auto& kv : args.overrides) cfg.set_pair(kv);
  return cfg;
}

std::string ensure_out_dir(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

void finalize(KvConfig& cfg, const std::string& out_dir) {
  cfg.finish();
  cfg.write_resolved(out_dir + "/config.resolved.txt");
}

env::PhysicsConstants physics_from(KvConfig& cfg) {
  env::PhysicsConstants d;
  env::PhysicsConstants p;
  p.r_obj = cfg.get_double("physics.r_obj", d.r_obj);
  p.a_max = cfg.get_double("physics.a_max", d.a_max);
  p.v_close = cfg.get_double("physics.v_close", d.v_close);
  p.d_grasp = cfg.get_double("physics.d_grasp", d.d_grasp);
  p.d_contact = cfg.get_double("physics.d_contact", d.d_contact);
  p.z_trig = cfg.get_double("physics.z_trig", d.z_trig);
  p.h_hold = cfg.get_double("physics.h_hold", d.h_hold);
  p.dt = cfg.get_double("physics.dt", d.dt);
  p.validate();
  return p;
}

mc::McConfig sampler_from(KvConfig& cfg) {
  mc::McConfig d;
  mc::McConfig m;
  m.dx_min = cfg.get_double("env.dx_min", d.dx_min);
  m.dx_max = cfg.get_double("env.dx_max", d.dx_max);
  m.dy_min = cfg.get_double("env.dy_min", d.dy_min);
  m.dy_max = cfg.get_double("env.dy_max", d.dy_max);
  m.time_scale = cfg.get_double("env.time_scale", d.time_scale);
  m.tn_mean = cfg.get_double("env.tn_mean", d.tn_mean);
  m.tn_std = cfg.get_double("env.tn_std", d.tn_std);
  m.expert_bounds.k_min = cfg.get_double("expert.k_min", d.expert_bounds.k_min);
  m.expert_bounds.k_max = cfg.get_double("expert.k_max", d.expert_bounds.k_max);
  m.expert_bounds.dc_min = cfg.get_double("expert.dc_min", d.expert_bounds.dc_min);
  m.expert_bounds.dc_max = cfg.get_double("expert.dc_max", d.expert_bounds.dc_max);
  m.physics = physics_from(cfg);
  return m;
}

std::shared_ptr<const traj::TrajectorySet> load_set(const std::string& dir) {
  return std::make_shared<const traj::TrajectorySet>(traj::load_trajectory_dir(dir));
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double m = mean_of(xs);
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return std::sqrt(v / static_cast<double>(xs.size()));
}

// --- gen --------------------------------------------------------------------

int cmd_gen(const CommonArgs& common) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);

  traj::SyntheticConfig shape;
  shape.standoff = cfg.get_double("gen.standoff", shape.standoff);
  shape.reach_fraction = cfg.get_double("gen.reach_fraction", shape.reach_fraction);
  shape.start_yaw_offset = cfg.get_double("gen.start_yaw_offset", shape.start_yaw_offset);

  traj::PolarGridConfig grid;
  grid.radii = cfg.get_list("gen.radii", grid.radii);
  grid.angles_deg = cfg.get_list("gen.angles_deg", grid.angles_deg);
  grid.z = cfg.get_double("gen.start_z", grid.z);
  grid.approach_heights = cfg.get_list("gen.approach_heights", grid.approach_heights);

  const Vec3 object(cfg.get_double("gen.object_x", 0.0), cfg.get_double("gen.object_y", 0.0),
                    cfg.get_double("gen.object_z", 0.0));
  const double lift = cfg.get_double("gen.lift_height", 0.3);
  const double duration = cfg.get_double("gen.duration", 1.2);
  const double dt = cfg.get_double("gen.dt", 0.02);
  finalize(cfg, out);

  const traj::TrajectorySet set =
      traj::generate_polar_grid_set(object, lift, duration, dt, grid, shape);
  for (std::size_t i = 0; i < set.size(); ++i) {
    traj::export_csv(set.trajectories[i], out + "/" + set.names[i] + ".csv");
  }
  std::printf("gen: wrote %zu trajectories to %s\n", set.size(), out.c_str());
  return 0;
}

// --- mc ---------------------------------------------------------------------

int cmd_mc(const CommonArgs& common, const std::string& traj_dir) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);

  mc::McConfig mcc = sampler_from(cfg);
  mcc.n_samples = static_cast<std::size_t>(cfg.get_long("mc.n_samples", 20000));
  mcc.workers = static_cast<int>(cfg.get_long("workers", 0));
  mcc.accept_threshold = cfg.get_double("mc.accept_threshold", 1.0);
  mcc.master_seed = cfg.get_u64("seed", 0);
  finalize(cfg, out);

  auto set = load_set(traj_dir);
  const mc::SearchResult result = mc::run_search(mcc, set);
  mc::save_gs_jsonl(out + "/gs.jsonl", result.records);
  mc::save_stats_json(out + "/stats.json", result.stats);
  std::printf("mc: %zu / %zu accepted (rate %.4f), %zu full-return; wrote %s/gs.jsonl\n",
              result.stats.n_accepted, result.stats.n_samples, result.stats.rate,
              mc::full_return_records(result.records).size(), out.c_str());
  return 0;
}

// --- train ------------------------------------------------------------------

learn::SacConfig sac_from(KvConfig& cfg) {
  learn::SacConfig d;
  learn::SacConfig s;
  s.state_dim = static_cast<int>(cfg.get_long("sac.state_dim", d.state_dim));
  s.hidden = static_cast<int>(cfg.get_long("sac.hidden", d.hidden));
  s.lr = cfg.get_double("sac.lr", d.lr);
  s.batch = static_cast<std::size_t>(cfg.get_long("sac.batch", static_cast<long>(d.batch)));
  s.polyak = cfg.get_double("sac.polyak", d.polyak);
  s.gamma = cfg.get_double("sac.gamma", d.gamma);
  s.warm_start = cfg.get_long("sac.warm_start", d.warm_start);
  s.epoch_frames = cfg.get_long("sac.epoch_frames", d.epoch_frames);
  s.alpha = cfg.get_double("sac.alpha", d.alpha);
  s.auto_alpha = cfg.get_bool("sac.auto_alpha", d.auto_alpha);
  s.target_entropy = cfg.get_double("sac.target_entropy", d.target_entropy);
  s.dur = cfg.get_double("sac.dur", d.dur);
  s.agent_buffer_capacity = static_cast<std::size_t>(
      cfg.get_long("sac.agent_buffer", static_cast<long>(d.agent_buffer_capacity)));
  s.demo_buffer_capacity = static_cast<std::size_t>(
      cfg.get_long("sac.demo_buffer", static_cast<long>(d.demo_buffer_capacity)));
  s.total_frames = cfg.get_long("sac.total_frames", 30000);
  s.demo_episodes = static_cast<std::size_t>(
      cfg.get_long("sac.demo_episodes", static_cast<long>(d.demo_episodes)));
  s.seed = cfg.get_u64("seed", 0);
  return s;
}

int cmd_train(const CommonArgs& common, const std::string& mode, const std::string& traj_dir,
              const std::string& gs_path) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);
  auto set = load_set(traj_dir);

  if (mode == "bc") {
    learn::BcConfig bc;
    bc.state_dim = static_cast<int>(cfg.get_long("bc.state_dim", bc.state_dim));
    bc.hidden = static_cast<int>(cfg.get_long("bc.hidden", bc.hidden));
    bc.lr = cfg.get_double("bc.lr", bc.lr);
    bc.lr_decay = cfg.get_double("bc.lr_decay", bc.lr_decay);
    bc.decay_every = static_cast<int>(cfg.get_long("bc.decay_every", bc.decay_every));
    bc.batch = static_cast<std::size_t>(cfg.get_long("bc.batch", static_cast<long>(bc.batch)));
    bc.epochs = static_cast<int>(cfg.get_long("bc.epochs", 300));
    bc.seed = cfg.get_u64("seed", 0);
    const auto n_episodes =
        static_cast<std::size_t>(cfg.get_long("bc.episodes", 0));  // 0 = every record once
    const mc::McConfig sampler = sampler_from(cfg);
    finalize(cfg, out);

    if (gs_path.empty()) throw ConfigError("train bc needs --gs");
    const auto gs = mc::load_gs_jsonl(gs_path);
    const learn::SaDataset data = learn::build_bc_dataset(
        set, sampler.physics, sampler.time_scale, gs, n_episodes, bc.seed);
    const learn::BcResult result = learn::train_bc(data, bc);
    learn::save_policy_checkpoint(out + "/checkpoint.json", result.policy);
    learn::write_bc_curve_csv(out + "/curve.csv", result.curve);
    std::printf("train bc: %lld pairs, final mse %.6f; wrote %s/checkpoint.json\n",
                static_cast<long long>(data.size()), learn::bc_mse(result.policy, data),
                out.c_str());
    return 0;
  }

  learn::SacConfig sac = sac_from(cfg);
  if (mode == "rl") sac.dur = 0.0;  // pure-RL baseline
  const mc::McConfig sampler = sampler_from(cfg);
  finalize(cfg, out);

  std::vector<mc::GsRecord> gs;
  if (sac.dur > 0.0) {
    if (gs_path.empty()) throw ConfigError("train " + mode + " with dur > 0 needs --gs");
    gs = mc::load_gs_jsonl(gs_path);
  }
  const learn::TrainResult result = learn::train_rlil(set, sampler, gs, sac);

  learn::SacTrainerState state = learn::make_sac_trainer_state(result.nets, sac);
  learn::save_sac_checkpoint(out + "/checkpoint.json", result.nets, state);
  learn::write_curve_csv(out + "/curve.csv", result.curve);
  double last = 0.0;
  if (!result.curve.empty()) last = result.curve.back().mean_return;
  std::printf("train %s: %ld frames, final epoch mean return %.2f; wrote %s/checkpoint.json\n",
              mode.c_str(), sac.total_frames, last, out.c_str());
  return 0;
}

// --- eval -------------------------------------------------------------------

int cmd_eval(const CommonArgs& common, const std::string& traj_dir,
             const std::string& checkpoint, const std::string& policy_kind,
             const std::string& gs_path) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);
  const auto episodes = static_cast<std::size_t>(cfg.get_long("eval.episodes", 200));
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  const mc::McConfig sampler = sampler_from(cfg);
  finalize(cfg, out);
  if (episodes == 0) throw ConfigError("eval.episodes must be positive");

  auto set = load_set(traj_dir);
  json result;
  result["episodes"] = episodes;
  result["seed"] = seed;
  result["policy"] = policy_kind;

  std::vector<double> returns;
  if (policy_kind == "expert-gs") {
    // Replays stored expert controllers on their own settings.
    if (gs_path.empty()) throw ConfigError("eval --policy expert-gs needs --gs");
    const auto gs = mc::load_gs_jsonl(gs_path);
    if (gs.empty()) throw EmptyDataset("G_s file has no records");
    env::GraspEnv envi(set, sampler.physics, sampler.time_scale);
    double stored_sum = 0.0;
    const std::size_t n = std::min(episodes, gs.size());
    for (std::size_t i = 0; i < n; ++i) {
      expert::ExpertPolicy pi(mc::record_params(gs[i]));
      returns.push_back(rollout(envi, mc::record_settings(gs[i]), std::ref(pi)).sum_rewards);
      stored_sum += gs[i].sum_rewards;
    }
    result["stored_mean"] = stored_sum / static_cast<double>(n);
  } else if (policy_kind == "random") {
    auto rng = std::make_shared<std::mt19937_64>(derive_seed(seed, 0xDA));
    const env::Policy pi = [rng](const env::StateVector&) {
      std::uniform_real_distribution<double> a(-1.0, 1.0);
      return a(*rng);
    };
    returns = learn::evaluate_policy(set, sampler, pi, episodes, seed);
  } else {  // checkpoint policy
    if (checkpoint.empty()) throw ConfigError("eval needs --checkpoint (or --policy random)");
    const learn::GaussianPolicy pi = learn::load_any_policy(checkpoint);
    returns =
        learn::evaluate_policy(set, sampler, learn::deterministic_policy(pi), episodes, seed);
    result["checkpoint"] = checkpoint;
  }

  result["mean_return"] = mean_of(returns);
  result["std_return"] = std_of(returns);
  result["returns"] = returns;
  std::size_t n20 = 0;
  for (double r : returns) n20 += r == env::kMaxReturn ? 1 : 0;
  result["success_rate"] = static_cast<double>(n20) / static_cast<double>(returns.size());

  std::ofstream f(out + "/eval.json");
  f << result.dump(2) << '\n';
  std::printf("eval %s: mean %.3f +- %.3f over %zu episodes; wrote %s/eval.json\n",
              policy_kind.c_str(), mean_of(returns), std_of(returns), returns.size(),
              out.c_str());
  return 0;
}

// --- sm-data / sm-train / explain --------------------------------------------

int cmd_sm_data(const CommonArgs& common, const std::string& traj_dir,
                const std::string& gs_path, const std::string& rl_checkpoint) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);
  const auto ex_episodes = static_cast<std::size_t>(cfg.get_long("sm.ex_episodes", 2000));
  auto rl_episodes = static_cast<std::size_t>(cfg.get_long("sm.rl_episodes", 500));
  const bool rl_stochastic = cfg.get_bool("sm.rl_stochastic", false);
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  const mc::McConfig sampler = sampler_from(cfg);
  finalize(cfg, out);

  auto set = load_set(traj_dir);
  const auto gs = mc::load_gs_jsonl(gs_path);
  sm::SmDataset data = sm::build_dataset_ex(set, sampler, gs, ex_episodes, seed);

  if (rl_checkpoint.empty()) rl_episodes = 0;
  if (rl_episodes > 0) {
    const learn::GaussianPolicy pi = learn::load_any_policy(rl_checkpoint);
    env::Policy act;
    if (rl_stochastic) {
      auto rng = std::make_shared<std::mt19937_64>(derive_seed(seed, 0xA1));
      act = [pi, rng](const env::StateVector& s) { return pi.act_sample(s, *rng); };
    } else {
      act = [pi](const env::StateVector& s) { return pi.act_deterministic(s); };
    }
    const sm::SmDataset rl =
        sm::build_dataset_rl(set, sampler, gs, act, rl_episodes, derive_seed(seed, 0xB2));
    data = sm::merge(data, rl);
  }
  sm::save_dataset_jsonl(out + "/sm_dataset.jsonl", data);
  std::printf(
      "sm-data: %zu samples (%d episodes), success fraction %.3f, EX %zu / RL %zu; wrote "
      "%s/sm_dataset.jsonl\n",
      data.size(), data.n_episodes, data.success_fraction(),
      data.count_source(sm::Source::kExpert), data.count_source(sm::Source::kRl), out.c_str());
  return 0;
}

int cmd_sm_train(const CommonArgs& common, const std::string& data_path) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);
  sm::SmConfig smc;
  smc.hidden = static_cast<int>(cfg.get_long("sm.hidden", smc.hidden));
  smc.lr = cfg.get_double("sm.lr", smc.lr);
  smc.lr_decay = cfg.get_double("sm.lr_decay", smc.lr_decay);
  smc.decay_every = static_cast<int>(cfg.get_long("sm.decay_every", smc.decay_every));
  smc.batch = static_cast<std::size_t>(cfg.get_long("sm.batch", static_cast<long>(smc.batch)));
  smc.test_fraction = cfg.get_double("sm.test_fraction", smc.test_fraction);
  smc.epochs = static_cast<int>(cfg.get_long("sm.epochs", smc.epochs));
  smc.seed = cfg.get_u64("seed", 0);
  finalize(cfg, out);

  const sm::SmDataset data = sm::load_dataset_jsonl(data_path);
  smc.state_dim = data.state_dim;
  const sm::SmTrainResult result = sm::train(data, smc);
  learn::save_sm_checkpoint(out + "/sm_checkpoint.json", result.model);

  json metrics{{"accuracy", result.metrics.accuracy},
               {"majority_baseline", result.metrics.majority_baseline},
               {"precision_fail", result.metrics.precision[0]},
               {"precision_success", result.metrics.precision[1]},
               {"recall_fail", result.metrics.recall[0]},
               {"recall_success", result.metrics.recall[1]},
               {"n_train", result.metrics.n_train},
               {"n_test", result.metrics.n_test},
               {"epoch_loss", result.epoch_loss}};
  std::ofstream f(out + "/metrics.json");
  f << metrics.dump(2) << '\n';
  std::printf("sm-train: held-out accuracy %.3f (majority %.3f); wrote %s/sm_checkpoint.json\n",
              result.metrics.accuracy, result.metrics.majority_baseline, out.c_str());
  return 0;
}

int cmd_explain(const CommonArgs& common, const std::string& traj_dir,
                const std::string& sm_checkpoint, const std::string& gs_path,
                const std::string& policy_kind, const std::string& rl_checkpoint) {
  KvConfig cfg = load_config(common);
  const std::string out = ensure_out_dir(common.out_dir);
  const auto episodes = static_cast<std::size_t>(cfg.get_long("explain.episodes", 5));
  const std::uint64_t seed = cfg.get_u64("seed", 0);
  const mc::McConfig sampler = sampler_from(cfg);
  finalize(cfg, out);

  auto set = load_set(traj_dir);
  const sm::SmModel model = learn::load_sm_checkpoint(sm_checkpoint);
  const auto gs = mc::load_gs_jsonl(gs_path);
  if (gs.empty()) throw EmptyDataset("explain needs a non-empty G_s file");

  learn::GaussianPolicy rl_policy;
  if (policy_kind == "rl") {
    if (rl_checkpoint.empty()) throw ConfigError("explain --policy rl needs --rl-checkpoint");
    rl_policy = learn::load_any_policy(rl_checkpoint);
  }

  env::GraspEnv envi(set, sampler.physics, sampler.time_scale);
  std::vector<env::EpisodeRecord> records;
  json summary = json::array();
  for (std::size_t i = 0; i < episodes; ++i) {
    std::mt19937_64 rng = make_rng(seed, i);
    std::uniform_int_distribution<std::size_t> pick(0, gs.size() - 1);
    const mc::GsRecord& rec = gs[pick(rng)];

    env::EpisodeRecord ep;
    if (policy_kind == "expert") {
      expert::ExpertPolicy pi(mc::record_params(rec));
      ep = rollout(envi, mc::record_settings(rec), std::ref(pi));
    } else if (policy_kind == "random") {
      std::uniform_real_distribution<double> a(-1.0, 1.0);
      ep = rollout(envi, mc::record_settings(rec),
                   [&](const env::StateVector&) { return a(rng); });
    } else {
      ep = rollout(envi, mc::record_settings(rec),
                   [&](const env::StateVector& s) { return rl_policy.act_deterministic(s); });
    }

    const sm::Explanation ex = sm::explain_episode(model, ep);
    char name[256];
    std::snprintf(name, sizeof(name), "%s/explain_%03zu.csv", out.c_str(), i);
    sm::write_explanation_csv(name, ex);
    records.push_back(std::move(ep));

    std::size_t correct = 0;
    for (const auto& st : ex.steps) correct += st.correct ? 1 : 0;
    summary.push_back(
        json{{"episode", i},
             {"outcome", ex.outcome},
             {"steps", ex.steps.size()},
             {"time_of_reach", ex.time_of_reach},
             {"flag_accuracy",
              static_cast<double>(correct) / static_cast<double>(ex.steps.size())},
             {"csv", name}});
  }
  env::save_episodes_jsonl(out + "/episodes.jsonl", records);
  std::ofstream f(out + "/summary.json");
  f << summary.dump(2) << '\n';
  std::printf("explain: wrote %zu per-episode curve files to %s\n", episodes, out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajectory-conditioned grasping pipeline"};
  app.require_subcommand(1);

  CommonArgs gen_args, mc_args, train_args, eval_args, smd_args, smt_args, exp_args;
  std::string traj_dir, gs_path, mode = "rlil", checkpoint, policy_kind = "checkpoint";
  std::string data_path, sm_checkpoint, rl_checkpoint, explain_policy = "expert";

  CLI::App* gen = app.add_subcommand("gen", "generate synthetic hand-transport trajectories");
  add_common(gen, gen_args, "out_gen");

  CLI::App* mcc = app.add_subcommand("mc", "Monte Carlo search for working expert controllers");
  add_common(mcc, mc_args, "out_mc");
  mcc->add_option("-t,--traj-dir", traj_dir, "trajectory CSV directory")->required();

  CLI::App* train = app.add_subcommand("train", "train a policy (rlil, rl, or bc)");
  add_common(train, train_args, "out_train");
  train->add_option("-m,--mode", mode, "rlil | rl | bc")->default_val("rlil");
  train->add_option("-t,--traj-dir", traj_dir, "trajectory CSV directory")->required();
  train->add_option("-g,--gs", gs_path, "G_s jsonl file (demonstrations)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a policy over fresh episodes");
  add_common(eval, eval_args, "out_eval");
  eval->add_option("-t,--traj-dir", traj_dir, "trajectory CSV directory")->required();
  eval->add_option("-c,--checkpoint", checkpoint, "policy checkpoint to evaluate");
  eval->add_option("--policy", policy_kind, "checkpoint | random | expert-gs")
      ->default_val("checkpoint");
  eval->add_option("-g,--gs", gs_path, "G_s jsonl (for --policy expert-gs)");

  CLI::App* smd = app.add_subcommand("sm-data", "build the outcome dataset");
  add_common(smd, smd_args, "out_sm_data");
  smd->add_option("-t,--traj-dir", traj_dir, "trajectory CSV directory")->required();
  smd->add_option("-g,--gs", gs_path, "G_s jsonl file")->required();
  smd->add_option("--rl-checkpoint", rl_checkpoint, "trained policy for the RL-side split");

  CLI::App* smt = app.add_subcommand("sm-train", "train the success classifier");
  add_common(smt, smt_args, "out_sm_train");
  smt->add_option("-d,--data", data_path, "sm dataset jsonl")->required();

  CLI::App* exp = app.add_subcommand("explain", "action-sweep curves for sample episodes");
  add_common(exp, exp_args, "out_explain");
  exp->add_option("-t,--traj-dir", traj_dir, "trajectory CSV directory")->required();
  exp->add_option("-s,--sm", sm_checkpoint, "success-model checkpoint")->required();
  exp->add_option("-g,--gs", gs_path, "G_s jsonl file")->required();
  exp->add_option("--policy", explain_policy, "expert | random | rl")->default_val("expert");
  exp->add_option("--rl-checkpoint", rl_checkpoint, "policy checkpoint for --policy rl");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (mcc->parsed()) return cmd_mc(mc_args, traj_dir);
    if (train->parsed()) {
      if (mode != "rlil" && mode != "rl" && mode != "bc") {
        throw ConfigError("unknown train mode '" + mode + "'");
      }
      return cmd_train(train_args, mode, traj_dir, gs_path);
    }
    if (eval->parsed()) return cmd_eval(eval_args, traj_dir, checkpoint, policy_kind, gs_path);
    if (smd->parsed()) return cmd_sm_data(smd_args, traj_dir, gs_path, rl_checkpoint);
    if (smt->parsed()) return cmd_sm_train(smt_args, data_path);
    if (exp->parsed()) {
      return cmd_explain(exp_args, traj_dir, sm_checkpoint, gs_path, explain_policy,
                         rl_checkpoint);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Unhandled: %s\n", e.what());
    return 1;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "grasplab/env.hpp"
#include "grasplab/expert.hpp"

namespace grasplab::mc {

// Sampling distributions and scale of the search.
struct McConfig {
  std::size_t n_samples = 100000;
  int workers = 0;  // 0 = hardware_concurrency
  double dx_min = -0.06, dx_max = 0.06;
  double dy_min = -0.06, dy_max = 0.06;
  double time_scale = 2.5;
  double tn_mean = 0.5;
  double tn_std = 0.8;
  double accept_threshold = 1.0;  // store iff sum of rewards strictly exceeds this
  std::uint64_t master_seed = 0;
  expert::ParamBounds expert_bounds;
  env::PhysicsConstants physics;
};

// One accepted (environment settings, controller parameters) pair. Replaying
// it reproduces sum_rewards exactly (the surrogate is deterministic).
struct GsRecord {
  std::size_t traj_id = 0;
  double dx = 0.0, dy = 0.0, tn = 0.0;
  double gain = 0.0, d_critical = 0.0;
  std::uint64_t seed = 0;
  double sum_rewards = 0.0;
};

struct SearchStats {
  std::size_t n_samples = 0;
  std::size_t n_accepted = 0;
  double rate = 0.0;
  std::vector<std::size_t> per_traj_counts;  // accepted per trajectory id
};

struct SearchResult {
  std::vector<GsRecord> records;  // in sample-index order
  SearchStats stats;
};

// Draws (trajectory, dx, dy, tn) per the configured distributions. Tuples
// whose warped duration would be non-positive are redrawn.
env::EnvSettings sample_settings(std::mt19937_64& rng, const McConfig& cfg,
                                 const traj::TrajectorySet& set);

// Rejection search over settings x expert parameters. Per-sample RNG streams
// are derived from (master_seed, sample index), so the result is identical
// at any worker count.
SearchResult run_search(const McConfig& cfg, std::shared_ptr<const traj::TrajectorySet> set);

env::EnvSettings record_settings(const GsRecord& r);
expert::ExpertParams record_params(const GsRecord& r);

// Re-runs the stored controller on the stored settings.
env::EpisodeRecord replay(const GsRecord& r, std::shared_ptr<const traj::TrajectorySet> set,
                          const env::PhysicsConstants& physics, double time_scale = 2.5);

struct ReplayMismatch {
  std::size_t index;
  double stored;
  double replayed;
};

// Replays every record; returns the mismatching ones (empty means all exact).
std::vector<ReplayMismatch> verify_records(const std::vector<GsRecord>& records,
                                           std::shared_ptr<const traj::TrajectorySet> set,
                                           const env::PhysicsConstants& physics,
                                           double time_scale = 2.5);

// JSON-lines persistence: {traj_id, dx, dy, tn, K, dc, seed, return}.
void save_gs_jsonl(const std::string& path, const std::vector<GsRecord>& records);
std::vector<GsRecord> load_gs_jsonl(const std::string& path);
void save_stats_json(const std::string& path, const SearchStats& stats);

// Records with the maximum return (successful grasps held for the full
// reward window).
std::vector<GsRecord> full_return_records(const std::vector<GsRecord>& records);

}  // namespace grasplab::mc

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <memory>

#include "grasplab/mc_search.hpp"
#include "grasplab/rng.hpp"
#include "grasplab/synthetic.hpp"

using namespace grasplab;
using mc::GsRecord;
using mc::McConfig;

namespace {

std::shared_ptr<const traj::TrajectorySet> grid_set() {
  static auto set = std::make_shared<traj::TrajectorySet>(
      traj::generate_polar_grid_set(Vec3::Zero(), 0.3, 1.2, 0.02));
  return set;
}

McConfig small_config(std::size_t n, std::uint64_t seed) {
  McConfig cfg;
  cfg.n_samples = n;
  cfg.workers = 2;
  cfg.master_seed = seed;
  return cfg;
}

bool records_equal(const std::vector<GsRecord>& a, const std::vector<GsRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].traj_id != b[i].traj_id || a[i].dx != b[i].dx || a[i].dy != b[i].dy ||
        a[i].tn != b[i].tn || a[i].gain != b[i].gain || a[i].d_critical != b[i].d_critical ||
        a[i].seed != b[i].seed || a[i].sum_rewards != b[i].sum_rewards) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("sample_settings: distribution statistics") {
  auto set = grid_set();
  McConfig cfg;
  std::mt19937_64 rng(42);
  const int n = 100000;
  double tn_sum = 0.0, tn_sq = 0.0;
  std::vector<int> traj_counts(set->size(), 0);
  for (int i = 0; i < n; ++i) {
    const env::EnvSettings s = mc::sample_settings(rng, cfg, *set);
    CHECK(s.dx >= -0.06);
    CHECK(s.dx <= 0.06);
    CHECK(s.dy >= -0.06);
    CHECK(s.dy <= 0.06);
    // Redraw rule: warped duration is always positive.
    CHECK(set->at(s.trajectory_id).duration() * cfg.time_scale + s.tn > 0.0);
    tn_sum += s.tn;
    tn_sq += s.tn * s.tn;
    traj_counts[s.trajectory_id] += 1;
  }
  const double mean = tn_sum / n;
  const double stddev = std::sqrt(tn_sq / n - mean * mean);
  CHECK(std::abs(mean - 0.5) < 0.02);
  CHECK(std::abs(stddev - 0.8) < 0.02);

  // Multinomial check: each id within 3 standard errors of uniform.
  const double p = 1.0 / static_cast<double>(set->size());
  const double se = std::sqrt(p * (1.0 - p) * n);
  for (int c : traj_counts) {
    CHECK(std::abs(c - p * n) < 3.0 * se + 1.0);
  }
}

TEST_CASE("sample_settings: non-positive durations are resampled away") {
  auto set = grid_set();
  McConfig cfg;
  cfg.tn_mean = -3.5;  // most draws would kill the 3 s warped duration
  cfg.tn_std = 0.8;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const env::EnvSettings s = mc::sample_settings(rng, cfg, *set);
    CHECK(set->at(s.trajectory_id).duration() * cfg.time_scale + s.tn > 0.0);
  }
}

TEST_CASE("run_search matches a sequential re-derivation (acceptance boundary)") {
  auto set = grid_set();
  const McConfig cfg = small_config(500, 2024);
  const mc::SearchResult result = mc::run_search(cfg, set);

  // Independent re-derivation of the whole search, sample by sample.
  std::vector<GsRecord> expected;
  env::GraspEnv envi(set, cfg.physics, cfg.time_scale);
  std::size_t n_above_zero = 0;
  for (std::size_t i = 0; i < cfg.n_samples; ++i) {
    std::mt19937_64 rng = make_rng(cfg.master_seed, i);
    env::EnvSettings settings = mc::sample_settings(rng, cfg, *set);
    settings.seed = derive_seed(cfg.master_seed, i);
    const expert::ExpertParams params = expert::sample_params(rng, cfg.expert_bounds);
    expert::ExpertPolicy policy(params);
    const env::EpisodeRecord ep = rollout(envi, settings, std::ref(policy));
    if (ep.sum_rewards > 0.0) ++n_above_zero;
    if (ep.sum_rewards > 1.0) {
      expected.push_back(GsRecord{settings.trajectory_id, settings.dx, settings.dy, settings.tn,
                                  params.gain, params.d_critical, settings.seed,
                                  ep.sum_rewards});
    }
  }
  CHECK(records_equal(result.records, expected));
  CHECK(result.stats.n_accepted == expected.size());
  // Strictly-greater-than-1 boundary: returns of exactly 1 are rejected, so
  // every stored return is an integer >= 2.
  for (const auto& r : result.records) {
    CHECK(r.sum_rewards > 1.0);
    CHECK(r.sum_rewards == std::floor(r.sum_rewards));
    CHECK(r.sum_rewards >= 2.0);
  }
  CHECK(n_above_zero >= expected.size());
}

TEST_CASE("run_search: worker count does not change the result") {
  auto set = grid_set();
  McConfig cfg = small_config(400, 99);
  cfg.workers = 1;
  const auto r1 = mc::run_search(cfg, set);
  cfg.workers = 2;
  const auto r2 = mc::run_search(cfg, set);
  cfg.workers = 4;
  const auto r4 = mc::run_search(cfg, set);
  CHECK(records_equal(r1.records, r2.records));
  CHECK(records_equal(r1.records, r4.records));
  CHECK(r1.stats.n_accepted == r4.stats.n_accepted);
}

TEST_CASE("run_search: stats are consistent") {
  auto set = grid_set();
  const auto result = mc::run_search(small_config(600, 5), set);
  std::size_t total = 0;
  for (std::size_t c : result.stats.per_traj_counts) total += c;
  CHECK(total == result.stats.n_accepted);
  CHECK(result.stats.rate ==
        doctest::Approx(static_cast<double>(result.stats.n_accepted) / 600.0));
  CHECK(result.stats.n_samples == 600);
}

TEST_CASE("replay reproduces stored returns exactly") {
  auto set = grid_set();
  const McConfig cfg = small_config(600, 11);
  const auto result = mc::run_search(cfg, set);
  REQUIRE(result.records.size() > 0);
  const auto mismatches = mc::verify_records(result.records, set, cfg.physics, cfg.time_scale);
  CHECK(mismatches.empty());

  const env::EpisodeRecord ep =
      mc::replay(result.records.front(), set, cfg.physics, cfg.time_scale);
  CHECK(ep.sum_rewards == result.records.front().sum_rewards);
}

TEST_CASE("replay detects a tampered return") {
  auto set = grid_set();
  const McConfig cfg = small_config(600, 12);
  auto result = mc::run_search(cfg, set);
  REQUIRE(result.records.size() > 1);
  result.records[1].sum_rewards += 1.0;
  const auto mismatches = mc::verify_records(result.records, set, cfg.physics, cfg.time_scale);
  REQUIRE(mismatches.size() == 1);
  CHECK(mismatches[0].index == 1);
  CHECK(mismatches[0].stored == mismatches[0].replayed + 1.0);
}

TEST_CASE("G_s jsonl round trip") {
  auto set = grid_set();
  const auto result = mc::run_search(small_config(400, 21), set);
  REQUIRE(result.records.size() > 0);
  const std::string path = "test_gs.jsonl";
  mc::save_gs_jsonl(path, result.records);
  const auto back = mc::load_gs_jsonl(path);
  CHECK(records_equal(result.records, back));
  std::remove(path.c_str());

  mc::save_stats_json("test_stats.json", result.stats);
  std::remove("test_stats.json");
}

TEST_CASE("full_return_records filters the 20s") {
  std::vector<GsRecord> records(3);
  records[0].sum_rewards = 20.0;
  records[1].sum_rewards = 7.0;
  records[2].sum_rewards = 20.0;
  const auto full = mc::full_return_records(records);
  CHECK(full.size() == 2);
  for (const auto& r : full) CHECK(r.sum_rewards == 20.0);
}

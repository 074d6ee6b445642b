#include "grasplab/mc_search.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <optional>
#include <thread>

#include <json.hpp>

#include "grasplab/rng.hpp"

namespace grasplab::mc {

using nlohmann::json;

env::EnvSettings sample_settings(std::mt19937_64& rng, const McConfig& cfg,
                                 const traj::TrajectorySet& set) {
  std::uniform_int_distribution<std::size_t> traj_dist(0, set.size() - 1);
  std::uniform_real_distribution<double> dx_dist(cfg.dx_min, cfg.dx_max);
  std::uniform_real_distribution<double> dy_dist(cfg.dy_min, cfg.dy_max);
  std::normal_distribution<double> tn_dist(cfg.tn_mean, cfg.tn_std);
  env::EnvSettings s;
  while (true) {
    s.trajectory_id = traj_dist(rng);
    s.dx = dx_dist(rng);
    s.dy = dy_dist(rng);
    s.tn = tn_dist(rng);
    const double base = set.at(s.trajectory_id).duration();
    if (base * cfg.time_scale + s.tn > 0.0) break;
  }
  return s;
}

SearchResult run_search(const McConfig& cfg, std::shared_ptr<const traj::TrajectorySet> set) {
  if (cfg.n_samples == 0) throw std::invalid_argument("n_samples must be positive");
  if (!set || set->trajectories.empty()) {
    throw std::invalid_argument("run_search needs a non-empty trajectory set");
  }

  int workers = cfg.workers;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (static_cast<std::size_t>(workers) > cfg.n_samples) {
    workers = static_cast<int>(cfg.n_samples);
  }

  std::vector<std::optional<GsRecord>> slots(cfg.n_samples);
  std::atomic<std::size_t> cursor{0};
  std::mutex fail_mutex;
  std::vector<std::pair<std::size_t, std::string>> failures;

  auto work = [&]() {
    env::GraspEnv envi(set, cfg.physics, cfg.time_scale);
    while (true) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= cfg.n_samples) break;
      try {
        std::mt19937_64 rng = make_rng(cfg.master_seed, i);
        env::EnvSettings settings = sample_settings(rng, cfg, *set);
        settings.seed = derive_seed(cfg.master_seed, i);
        const expert::ExpertParams params = expert::sample_params(rng, cfg.expert_bounds);
        expert::ExpertPolicy policy(params);
        const env::EpisodeRecord ep = rollout(envi, settings, std::ref(policy));
        if (ep.sum_rewards > cfg.accept_threshold) {
          slots[i] = GsRecord{settings.trajectory_id, settings.dx,   settings.dy,
                              settings.tn,            params.gain,   params.d_critical,
                              settings.seed,          ep.sum_rewards};
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        failures.emplace_back(i, e.what());
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  if (!failures.empty()) {
    std::string msg = std::to_string(failures.size()) + " sample(s) failed; first: sample " +
                      std::to_string(failures.front().first) + ": " + failures.front().second;
    throw SearchError(msg);
  }

  SearchResult out;
  out.stats.n_samples = cfg.n_samples;
  out.stats.per_traj_counts.assign(set->size(), 0);
  for (auto& slot : slots) {
    if (!slot) continue;
    out.stats.per_traj_counts[slot->traj_id] += 1;
    out.records.push_back(*slot);
  }
  out.stats.n_accepted = out.records.size();
  out.stats.rate = static_cast<double>(out.stats.n_accepted) / static_cast<double>(cfg.n_samples);
  return out;
}

env::EnvSettings record_settings(const GsRecord& r) {
  env::EnvSettings s;
  s.trajectory_id = r.traj_id;
  s.dx = r.dx;
  s.dy = r.dy;
  s.tn = r.tn;
  s.seed = r.seed;
  return s;
}

expert::ExpertParams record_params(const GsRecord& r) {
  expert::ExpertParams p;
  p.gain = r.gain;
  p.d_critical = r.d_critical;
  return p;
}

env::EpisodeRecord replay(const GsRecord& r, std::shared_ptr<const traj::TrajectorySet> set,
                          const env::PhysicsConstants& physics, double time_scale) {
  env::GraspEnv envi(std::move(set), physics, time_scale);
  expert::ExpertPolicy policy(record_params(r));
  return rollout(envi, record_settings(r), std::ref(policy));
}

std::vector<ReplayMismatch> verify_records(const std::vector<GsRecord>& records,
                                           std::shared_ptr<const traj::TrajectorySet> set,
                                           const env::PhysicsConstants& physics,
                                           double time_scale) {
  std::vector<ReplayMismatch> bad;
  env::GraspEnv envi(set, physics, time_scale);
  for (std::size_t i = 0; i < records.size(); ++i) {
    expert::ExpertPolicy policy(record_params(records[i]));
    const env::EpisodeRecord ep = rollout(envi, record_settings(records[i]), std::ref(policy));
    if (ep.sum_rewards != records[i].sum_rewards) {
      bad.push_back(ReplayMismatch{i, records[i].sum_rewards, ep.sum_rewards});
    }
  }
  return bad;
}

void save_gs_jsonl(const std::string& path, const std::vector<GsRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& r : records) {
    json j{{"traj_id", r.traj_id}, {"dx", r.dx},     {"dy", r.dy},   {"tn", r.tn},
           {"K", r.gain},          {"dc", r.d_critical}, {"seed", r.seed}, {"return", r.sum_rewards}};
    out << j.dump() << '\n';
  }
}

std::vector<GsRecord> load_gs_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<GsRecord> records;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("bad record json: ") + e.what(), line_no);
    }
    GsRecord r;
    r.traj_id = j.at("traj_id").get<std::size_t>();
    r.dx = j.at("dx").get<double>();
    r.dy = j.at("dy").get<double>();
    r.tn = j.at("tn").get<double>();
    r.gain = j.at("K").get<double>();
    r.d_critical = j.at("dc").get<double>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.sum_rewards = j.at("return").get<double>();
    records.push_back(r);
  }
  return records;
}

void save_stats_json(const std::string& path, const SearchStats& stats) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  json j{{"n_samples", stats.n_samples},
         {"n_accepted", stats.n_accepted},
         {"rate", stats.rate},
         {"per_traj_counts", stats.per_traj_counts}};
  out << j.dump(2) << '\n';
}

std::vector<GsRecord> full_return_records(const std::vector<GsRecord>& records) {
  std::vector<GsRecord> out;
  for (const auto& r : records) {
    if (r.sum_rewards == env::kMaxReturn) out.push_back(r);
  }
  return out;
}

}  // namespace grasplab::mc

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "grasplab/env.hpp"

namespace grasplab::env {

// One JSON object per line: settings, per-step (s, a, r), sum of rewards and
// outcome. States are flat arrays.
void write_episode_jsonl(std::ostream& out, const EpisodeRecord& rec);
void save_episodes_jsonl(const std::string& path, const std::vector<EpisodeRecord>& recs);
std::vector<EpisodeRecord> load_episodes_jsonl(const std::string& path);

}  // namespace grasplab::env

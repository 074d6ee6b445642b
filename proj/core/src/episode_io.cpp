#include "grasplab/episode_io.hpp"

#include <fstream>

#include <json.hpp>

#include "grasplab/errors.hpp"

namespace grasplab::env {

using nlohmann::json;

namespace {

json settings_to_json(const EnvSettings& s) {
  return json{{"traj_id", s.trajectory_id}, {"dx", s.dx}, {"dy", s.dy}, {"tn", s.tn},
              {"seed", s.seed}};
}

EnvSettings settings_from_json(const json& j) {
  EnvSettings s;
  s.trajectory_id = j.at("traj_id").get<std::size_t>();
  s.dx = j.at("dx").get<double>();
  s.dy = j.at("dy").get<double>();
  s.tn = j.at("tn").get<double>();
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

json state_to_json(const StateVector& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

StateVector state_from_json(const json& a) {
  StateVector v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<int>(i)) = a[i].get<double>();
  return v;
}

}  // namespace

void write_episode_jsonl(std::ostream& out, const EpisodeRecord& rec) {
  json steps = json::array();
  for (const auto& tr : rec.transitions) {
    steps.push_back(json{{"s", state_to_json(tr.s)}, {"a", tr.a}, {"r", tr.r}});
  }
  json j{{"settings", settings_to_json(rec.settings)},
         {"steps", std::move(steps)},
         {"sum_rewards", rec.sum_rewards},
         {"outcome", rec.outcome},
         {"trigger_step", rec.trigger_step},
         {"attach_step", rec.attach_step},
         {"toppled", rec.toppled}};
  out << j.dump() << '\n';
}

void save_episodes_jsonl(const std::string& path, const std::vector<EpisodeRecord>& recs) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& r : recs) write_episode_jsonl(out, r);
}

std::vector<EpisodeRecord> load_episodes_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<EpisodeRecord> recs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("bad episode json: ") + e.what(), line_no);
    }
    EpisodeRecord rec;
    rec.settings = settings_from_json(j.at("settings"));
    for (const auto& st : j.at("steps")) {
      Transition tr;
      tr.s = state_from_json(st.at("s"));
      tr.a = st.at("a").get<double>();
      tr.r = st.at("r").get<double>();
      rec.transitions.push_back(std::move(tr));
    }
    // Reconstruct s' chaining; the final next-state is not serialized.
    for (std::size_t i = 0; i + 1 < rec.transitions.size(); ++i) {
      rec.transitions[i].s2 = rec.transitions[i + 1].s;
    }
    if (!rec.transitions.empty()) {
      rec.transitions.back().s2 = rec.transitions.back().s;
      rec.transitions.back().done = true;
    }
    rec.sum_rewards = j.at("sum_rewards").get<double>();
    rec.outcome = j.at("outcome").get<int>();
    rec.trigger_step = j.value("trigger_step", -1);
    rec.attach_step = j.value("attach_step", -1);
    rec.toppled = j.value("toppled", false);
    recs.push_back(std::move(rec));
  }
  return recs;
}

}  // namespace grasplab::env

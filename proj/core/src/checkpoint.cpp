#include "grasplab/checkpoint.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace grasplab::learn {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

json vec_to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VectorXd vec_from_json(const json& a) {
  VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

json mlp_to_json(const Mlp& net) {
  return json{{"dims", net.dims()}, {"params", vec_to_json(net.flatten())}};
}

Mlp mlp_from_json(const json& j) {
  const auto dims = j.at("dims").get<std::vector<int>>();
  std::mt19937_64 rng(0);
  Mlp net(dims, rng);
  net.unflatten(vec_from_json(j.at("params")));
  return net;
}

json adam_to_json(const AdamOptimizer& opt) {
  return json{{"lr", opt.lr()},
              {"t", opt.state().t},
              {"m", vec_to_json(opt.state().m)},
              {"v", vec_to_json(opt.state().v)}};
}

void adam_from_json(const json& j, AdamOptimizer& opt) {
  opt.set_lr(j.at("lr").get<double>());
  opt.state().t = j.at("t").get<long>();
  opt.state().m = vec_from_json(j.at("m"));
  opt.state().v = vec_from_json(j.at("v"));
}

json policy_to_json(const GaussianPolicy& p) {
  return json{{"net", mlp_to_json(p.net)},
              {"log_std_min", p.log_std_min},
              {"log_std_max", p.log_std_max}};
}

GaussianPolicy policy_from_json(const json& j) {
  GaussianPolicy p;
  p.net = mlp_from_json(j.at("net"));
  p.log_std_min = j.value("log_std_min", -20.0);
  p.log_std_max = j.value("log_std_max", 2.0);
  return p;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << j.dump() << '\n';
  if (!out) throw IoError("write failed: " + path);
}

json read_checkpoint(const std::string& path, const char* expected_kind) {
  if (!std::filesystem::exists(path)) throw MissingCheckpoint("no such file: " + path);
  std::ifstream in(path);
  if (!in) throw MissingCheckpoint("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw IoError("bad checkpoint json in " + path + ": " + e.what());
  }
  if (expected_kind && j.value("kind", "") != expected_kind) {
    throw IoError("checkpoint " + path + " has kind '" + j.value("kind", "") + "', expected '" +
                  expected_kind + "'");
  }
  return j;
}

}  // namespace

void save_policy_checkpoint(const std::string& path, const GaussianPolicy& policy) {
  write_json(path, json{{"version", kVersion}, {"kind", "policy"},
                        {"policy", policy_to_json(policy)}});
}

GaussianPolicy load_policy_checkpoint(const std::string& path) {
  return policy_from_json(read_checkpoint(path, "policy").at("policy"));
}

void save_sac_checkpoint(const std::string& path, const SacNets& nets,
                         const SacTrainerState& state) {
  json j{{"version", kVersion},
         {"kind", "sac"},
         {"policy", policy_to_json(nets.policy)},
         {"q1", mlp_to_json(nets.q1)},
         {"q2", mlp_to_json(nets.q2)},
         {"v", mlp_to_json(nets.v)},
         {"v_target", mlp_to_json(nets.v_target)},
         {"optim",
          json{{"policy", adam_to_json(state.opt_policy)},
               {"q1", adam_to_json(state.opt_q1)},
               {"q2", adam_to_json(state.opt_q2)},
               {"v", adam_to_json(state.opt_v)},
               {"log_alpha", state.log_alpha}}}};
  write_json(path, j);
}

SacNets load_sac_checkpoint(const std::string& path, SacTrainerState* state) {
  const json j = read_checkpoint(path, "sac");
  SacNets nets;
  nets.policy = policy_from_json(j.at("policy"));
  nets.q1 = mlp_from_json(j.at("q1"));
  nets.q2 = mlp_from_json(j.at("q2"));
  nets.v = mlp_from_json(j.at("v"));
  nets.v_target = mlp_from_json(j.at("v_target"));
  if (state) {
    const json& o = j.at("optim");
    adam_from_json(o.at("policy"), state->opt_policy);
    adam_from_json(o.at("q1"), state->opt_q1);
    adam_from_json(o.at("q2"), state->opt_q2);
    adam_from_json(o.at("v"), state->opt_v);
    state->log_alpha = o.value("log_alpha", 0.0);
  }
  return nets;
}

GaussianPolicy load_any_policy(const std::string& path) {
  const json j = read_checkpoint(path, nullptr);
  const std::string kind = j.value("kind", "");
  if (kind == "policy" || kind == "sac") return policy_from_json(j.at("policy"));
  throw IoError("checkpoint " + path + " holds no policy (kind '" + kind + "')");
}

void save_sm_checkpoint(const std::string& path, const sm::SmModel& model) {
  write_json(path, json{{"version", kVersion}, {"kind", "success_model"},
                        {"net", mlp_to_json(model.net)}});
}

sm::SmModel load_sm_checkpoint(const std::string& path) {
  sm::SmModel model;
  model.net = mlp_from_json(read_checkpoint(path, "success_model").at("net"));
  return model;
}

}  // namespace grasplab::learn

#include "grasplab/success_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include <json.hpp>

#include "grasplab/rng.hpp"

namespace grasplab::sm {

using learn::MlpCache;
using learn::MlpGrads;
using nlohmann::json;

std::size_t SmDataset::count_success() const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.o == 1 ? 1 : 0;
  return n;
}

std::size_t SmDataset::count_source(Source src) const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.source == src ? 1 : 0;
  return n;
}

double SmDataset::success_fraction() const {
  if (samples.empty()) return 0.0;
  return static_cast<double>(count_success()) / static_cast<double>(samples.size());
}

namespace {

void append_episode(SmDataset& data, const env::EpisodeRecord& ep, Source src, int episode_id) {
  for (const auto& tr : ep.transitions) {
    data.samples.push_back(OutcomeSample{tr.s, tr.a, ep.outcome, src, episode_id});
  }
}

}  // namespace

SmDataset build_dataset_ex(std::shared_ptr<const traj::TrajectorySet> set,
                           const mc::McConfig& sampler, const std::vector<mc::GsRecord>& gs,
                           std::size_t n_episodes, std::uint64_t seed) {
  if (gs.empty()) throw EmptyDataset("build_dataset_ex needs G_s records");
  const std::vector<mc::GsRecord> full = mc::full_return_records(gs);
  if (full.empty()) {
    throw EmptyDataset("G_s holds no full-return records to oversample from");
  }

  env::GraspEnv envi(set, sampler.physics, sampler.time_scale);
  SmDataset data;
  data.n_episodes = static_cast<int>(n_episodes);
  for (std::size_t i = 0; i < n_episodes; ++i) {
    std::mt19937_64 rng = make_rng(seed, i);
    std::bernoulli_distribution from_gs(0.5);
    env::EnvSettings settings;
    expert::ExpertParams params;
    if (from_gs(rng)) {
      std::uniform_int_distribution<std::size_t> dist(0, full.size() - 1);
      const mc::GsRecord& rec = full[dist(rng)];
      settings = mc::record_settings(rec);
      params = mc::record_params(rec);
    } else {
      settings = mc::sample_settings(rng, sampler, *set);
      params = expert::sample_params(rng, sampler.expert_bounds);
    }
    expert::ExpertPolicy policy(params);
    append_episode(data, rollout(envi, settings, std::ref(policy)), Source::kExpert,
                   static_cast<int>(i));
  }
  return data;
}

SmDataset build_dataset_rl(std::shared_ptr<const traj::TrajectorySet> set,
                           const mc::McConfig& sampler, const std::vector<mc::GsRecord>& gs,
                           const env::Policy& policy, std::size_t n_episodes,
                           std::uint64_t seed) {
  if (gs.empty()) throw EmptyDataset("build_dataset_rl needs G_s records");
  env::GraspEnv envi(set, sampler.physics, sampler.time_scale);
  SmDataset data;
  data.n_episodes = static_cast<int>(n_episodes);
  for (std::size_t i = 0; i < n_episodes; ++i) {
    std::mt19937_64 rng = make_rng(seed, i);
    std::uniform_int_distribution<std::size_t> dist(0, gs.size() - 1);
    const env::EnvSettings settings = mc::record_settings(gs[dist(rng)]);
    append_episode(data, rollout(envi, settings, policy), Source::kRl, static_cast<int>(i));
  }
  return data;
}

SmDataset merge(const SmDataset& a, const SmDataset& b) {
  SmDataset out = a;
  out.samples.reserve(a.samples.size() + b.samples.size());
  for (OutcomeSample s : b.samples) {
    s.episode += a.n_episodes;
    out.samples.push_back(std::move(s));
  }
  out.n_episodes = a.n_episodes + b.n_episodes;
  return out;
}

double predict_success(const SmModel& model, const env::StateVector& s, double a) {
  VectorXd x(s.size() + 1);
  x.head(s.size()) = s;
  x(s.size()) = a;
  const VectorXd logits = model.net.forward1(x);
  const double m = std::max(logits(0), logits(1));
  const double e0 = std::exp(logits(0) - m);
  const double e1 = std::exp(logits(1) - m);
  return e1 / (e0 + e1);
}

double classifier_loss(const learn::Mlp& net, const MatrixXd& x, const std::vector<int>& y,
                       learn::MlpGrads* grads) {
  const Eigen::Index n = x.rows();
  learn::MlpCache cache;
  const MatrixXd logits = net.forward(x, grads ? &cache : nullptr);
  MatrixXd d_logits(n, 2);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // Stable log-sum-exp; gradient is softmax minus one-hot.
    const double m = std::max(logits(i, 0), logits(i, 1));
    const double e0 = std::exp(logits(i, 0) - m);
    const double e1 = std::exp(logits(i, 1) - m);
    const double z = e0 + e1;
    loss += m + std::log(z) - logits(i, y[static_cast<std::size_t>(i)]);
    d_logits(i, 0) = e0 / z;
    d_logits(i, 1) = e1 / z;
    d_logits(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  }
  loss /= static_cast<double>(n);
  if (grads) {
    d_logits /= static_cast<double>(n);
    net.backward(cache, d_logits, grads);
  }
  return loss;
}

// Episode-grouped stratified split: whole episodes are dealt to the test
// side per class until the per-class test share is reached.
void split_dataset(const SmDataset& data, double test_fraction, std::mt19937_64& rng,
                   std::vector<std::size_t>& train, std::vector<std::size_t>& test) {
  std::map<int, std::vector<std::size_t>> episodes;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    episodes[data.samples[i].episode].push_back(i);
  }
  std::array<std::vector<int>, 2> by_class;
  std::array<std::size_t, 2> class_counts{0, 0};
  for (const auto& [ep, idx] : episodes) {
    const int label = data.samples[idx.front()].o;
    by_class[label].push_back(ep);
    class_counts[label] += idx.size();
  }
  for (int label = 0; label < 2; ++label) {
    auto& eps = by_class[label];
    std::shuffle(eps.begin(), eps.end(), rng);
    const auto target = static_cast<std::size_t>(
        std::lround(test_fraction * static_cast<double>(class_counts[label])));
    std::size_t taken = 0;
    for (int ep : eps) {
      auto& idx = episodes[ep];
      if (taken < target) {
        test.insert(test.end(), idx.begin(), idx.end());
        taken += idx.size();
      } else {
        train.insert(train.end(), idx.begin(), idx.end());
      }
    }
  }
}

namespace {

MatrixXd features_of(const SmDataset& data, const std::vector<std::size_t>& idx) {
  MatrixXd x(static_cast<Eigen::Index>(idx.size()), data.state_dim + 1);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const auto& s = data.samples[idx[i]];
    x.row(static_cast<Eigen::Index>(i)).head(data.state_dim) = s.s.transpose();
    x(static_cast<Eigen::Index>(i), data.state_dim) = s.a;
  }
  return x;
}

}  // namespace

SmTrainResult train(const SmDataset& data, const SmConfig& cfg) {
  if (data.samples.empty()) throw EmptyDataset("success model needs samples");
  const std::size_t n_success = data.count_success();
  if (n_success == 0 || n_success == data.samples.size()) {
    throw SingleClassDataset("success model needs both outcome classes");
  }

  std::mt19937_64 split_rng = make_rng(cfg.seed, 0x517);
  std::vector<std::size_t> train_idx, test_idx;
  split_dataset(data, cfg.test_fraction, split_rng, train_idx, test_idx);

  std::mt19937_64 init_rng = make_rng(cfg.seed, 0x111);
  std::mt19937_64 shuffle_rng = make_rng(cfg.seed, 0x222);

  SmTrainResult result;
  result.model.net = learn::Mlp({cfg.state_dim + 1, cfg.hidden, cfg.hidden, 2}, init_rng);
  learn::Mlp& net = result.model.net;
  learn::AdamConfig acfg;
  acfg.lr = cfg.lr;
  learn::AdamOptimizer opt(net, acfg);

  const MatrixXd x_train = features_of(data, train_idx);
  VectorXd y_train(static_cast<Eigen::Index>(train_idx.size()));
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    y_train(static_cast<Eigen::Index>(i)) = data.samples[train_idx[i]].o;
  }

  const Eigen::Index n = x_train.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.set_lr(cfg.lr * std::pow(cfg.lr_decay, epoch / cfg.decay_every));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (Eigen::Index ofs = 0; ofs < n; ofs += static_cast<Eigen::Index>(cfg.batch)) {
      const Eigen::Index b = std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.batch), n - ofs);
      MatrixXd xs(b, x_train.cols());
      std::vector<int> ys(static_cast<std::size_t>(b));
      for (Eigen::Index i = 0; i < b; ++i) {
        xs.row(i) = x_train.row(order[static_cast<std::size_t>(ofs + i)]);
        ys[static_cast<std::size_t>(i)] =
            static_cast<int>(y_train(order[static_cast<std::size_t>(ofs + i)]));
      }
      MlpGrads grads = net.zero_grads();
      const double loss = classifier_loss(net, xs, ys, &grads);
      opt.step(net, grads);
      epoch_loss += loss * static_cast<double>(b);
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(n));
  }

  // Held-out metrics.
  SmMetrics& m = result.metrics;
  m.n_train = train_idx.size();
  m.n_test = test_idx.size();
  const MatrixXd x_test = features_of(data, test_idx);
  const MatrixXd logits = net.forward(x_test);
  std::array<std::array<std::size_t, 2>, 2> confusion{{{0, 0}, {0, 0}}};  // [true][pred]
  std::size_t positives = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const int truth = data.samples[test_idx[static_cast<std::size_t>(i)]].o;
    const int pred = logits(i, 1) > logits(i, 0) ? 1 : 0;
    confusion[truth][pred] += 1;
    positives += truth;
  }
  const auto total = static_cast<double>(m.n_test);
  m.accuracy = (confusion[0][0] + confusion[1][1]) / total;
  m.majority_baseline =
      std::max(static_cast<double>(positives), total - static_cast<double>(positives)) / total;
  for (int c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(confusion[c][c]);
    const double pred_c = static_cast<double>(confusion[0][c] + confusion[1][c]);
    const double true_c = static_cast<double>(confusion[c][0] + confusion[c][1]);
    m.precision[c] = pred_c > 0 ? tp / pred_c : 0.0;
    m.recall[c] = true_c > 0 ? tp / true_c : 0.0;
  }
  return result;
}

std::array<std::pair<double, double>, kCurvePoints> success_curve(const SmModel& model,
                                                                  const env::StateVector& s) {
  std::array<std::pair<double, double>, kCurvePoints> curve;
  for (int k = 0; k < kCurvePoints; ++k) {
    const double a = -1.0 + (2.0 * k) / (kCurvePoints - 1);
    curve[static_cast<std::size_t>(k)] = {a, predict_success(model, s, a)};
  }
  return curve;
}

Explanation explain_episode(const SmModel& model, const env::EpisodeRecord& episode) {
  Explanation ex;
  ex.outcome = episode.outcome;

  int reach = episode.attach_step;
  if (reach < 0) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < episode.transitions.size(); ++i) {
      const auto& s = episode.transitions[i].s;
      const double d = (s.segment<3>(env::kHandPos) - s.segment<3>(env::kObjectPos)).norm();
      if (d < best) {
        best = d;
        reach = static_cast<int>(i);
      }
    }
  }
  ex.time_of_reach = std::max(reach, 1);

  for (std::size_t i = 0; i < episode.transitions.size(); ++i) {
    const auto& tr = episode.transitions[i];
    ExplainStep step;
    step.t_norm = static_cast<double>(i) / static_cast<double>(ex.time_of_reach);
    const auto curve = success_curve(model, tr.s);
    for (int k = 0; k < kCurvePoints; ++k) {
      step.probabilities[static_cast<std::size_t>(k)] = curve[static_cast<std::size_t>(k)].second;
    }
    step.executed = tr.a;
    step.executed_prob = predict_success(model, tr.s, tr.a);
    step.correct = (step.executed_prob > 0.5) == (episode.outcome == 1);
    ex.steps.push_back(std::move(step));
  }
  return ex;
}

void write_explanation_csv(const std::string& path, const Explanation& ex) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "t_norm,action,probability,executed,flag\n";
  for (const auto& step : ex.steps) {
    for (int k = 0; k < kCurvePoints; ++k) {
      const double a = -1.0 + (2.0 * k) / (kCurvePoints - 1);
      out << step.t_norm << ',' << a << ','
          << step.probabilities[static_cast<std::size_t>(k)] << ',' << step.executed << ','
          << (step.correct ? 1 : 0) << '\n';
    }
  }
}

void save_dataset_jsonl(const std::string& path, const SmDataset& data) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  json meta{{"state_dim", data.state_dim},
            {"n_samples", data.samples.size()},
            {"n_episodes", data.n_episodes},
            {"n_success", data.count_success()},
            {"n_failure", data.samples.size() - data.count_success()},
            {"n_ex", data.count_source(Source::kExpert)},
            {"n_rl", data.count_source(Source::kRl)}};
  out << meta.dump() << '\n';
  for (const auto& s : data.samples) {
    json arr = json::array();
    for (int i = 0; i < s.s.size(); ++i) arr.push_back(s.s(i));
    json j{{"s", std::move(arr)},
           {"a", s.a},
           {"o", s.o},
           {"source", s.source == Source::kExpert ? "EX" : "RL"},
           {"episode", s.episode}};
    out << j.dump() << '\n';
  }
}

SmDataset load_dataset_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing metadata line in " + path, 1);
  SmDataset data;
  long line_no = 1;
  try {
    const json meta = json::parse(line);
    data.state_dim = meta.at("state_dim").get<int>();
    data.n_episodes = meta.value("n_episodes", 0);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad metadata: ") + e.what(), line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      OutcomeSample s;
      const auto& arr = j.at("s");
      s.s.resize(static_cast<Eigen::Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        s.s(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
      }
      s.a = j.at("a").get<double>();
      s.o = j.at("o").get<int>();
      s.source = j.at("source").get<std::string>() == "RL" ? Source::kRl : Source::kExpert;
      s.episode = j.value("episode", 0);
      data.samples.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad sample: ") + e.what(), line_no);
    }
  }
  return data;
}

}  // namespace grasplab::sm

#pragma once

#include <array>
#include <string>

#include "grasplab/mc_search.hpp"
#include "grasplab/mlp.hpp"

namespace grasplab::sm {

using learn::MatrixXd;
using learn::VectorXd;

enum class Source { kExpert, kRl };

// One (state, action, outcome) tuple; o = 1 iff the parent episode collected
// the full reward window. `episode` groups transitions for the split.
struct OutcomeSample {
  env::StateVector s;
  double a = 0.0;
  int o = 0;
  Source source = Source::kExpert;
  int episode = 0;
};

struct SmDataset {
  std::vector<OutcomeSample> samples;
  int state_dim = env::kStateDim;
  int n_episodes = 0;

  std::size_t size() const { return samples.size(); }
  std::size_t count_success() const;
  std::size_t count_source(Source src) const;
  double success_fraction() const;
};

struct SmConfig {
  int state_dim = env::kStateDim;
  int hidden = 256;  // two hidden layers; three weight layers, 2-logit output
  double lr = 1e-3;
  double lr_decay = 0.5;
  int decay_every = 100;  // epochs
  std::size_t batch = 1024;
  double test_fraction = 0.2;
  int epochs = 20;
  std::uint64_t seed = 0;
};

// Expert-side dataset with oversampling: each episode draws its controller
// and settings from the full-return stratum of G_s with probability 1/2,
// otherwise fresh from the controller family and the general environment
// distributions. All transitions inherit the episode outcome.
SmDataset build_dataset_ex(std::shared_ptr<const traj::TrajectorySet> set,
                           const mc::McConfig& sampler, const std::vector<mc::GsRecord>& gs,
                           std::size_t n_episodes, std::uint64_t seed);

// Trained-policy rollouts on settings drawn from G_s.
SmDataset build_dataset_rl(std::shared_ptr<const traj::TrajectorySet> set,
                           const mc::McConfig& sampler, const std::vector<mc::GsRecord>& gs,
                           const env::Policy& policy, std::size_t n_episodes,
                           std::uint64_t seed);

// Concatenates, renumbering episodes to stay distinct.
SmDataset merge(const SmDataset& a, const SmDataset& b);

struct SmModel {
  learn::Mlp net;  // dims {state_dim + 1, hidden, hidden, 2}
};

// P(success | s, a): softmax of the two logits, class 1.
double predict_success(const SmModel& model, const env::StateVector& s, double a);

// Mean cross entropy of the 2-logit output against labels y in {0,1};
// accumulates parameter gradients when `grads` is non-null. Rows of x are
// [state, action] feature vectors.
double classifier_loss(const learn::Mlp& net, const MatrixXd& x, const std::vector<int>& y,
                       learn::MlpGrads* grads);

// Episode-grouped, class-stratified index split used by train().
void split_dataset(const SmDataset& data, double test_fraction, std::mt19937_64& rng,
                   std::vector<std::size_t>& train_idx, std::vector<std::size_t>& test_idx);

struct SmMetrics {
  double accuracy = 0.0;
  double majority_baseline = 0.0;
  double precision[2] = {0.0, 0.0};
  double recall[2] = {0.0, 0.0};
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct SmTrainResult {
  SmModel model;
  SmMetrics metrics;
  std::vector<double> epoch_loss;
};

// Cross-entropy training with an 80/20 split that is stratified by class and
// grouped by episode (all transitions of an episode land on one side).
SmTrainResult train(const SmDataset& data, const SmConfig& cfg);

// The discrete action sweep: 51 points from -1 to 1 inclusive, step 0.04.
inline constexpr int kCurvePoints = 51;
std::array<std::pair<double, double>, kCurvePoints> success_curve(const SmModel& model,
                                                                  const env::StateVector& s);

struct ExplainStep {
  double t_norm = 0.0;  // step index / time-of-reach index
  std::array<double, kCurvePoints> probabilities{};
  double executed = 0.0;
  double executed_prob = 0.0;
  bool correct = false;  // thresholded prediction at the executed action vs outcome
};

struct Explanation {
  std::vector<ExplainStep> steps;
  int outcome = 0;
  int time_of_reach = 0;  // attach step, else step of minimum hand-object distance
};

Explanation explain_episode(const SmModel& model, const env::EpisodeRecord& episode);

// CSV rows: t_norm,action,probability,executed,flag  (51 rows per timestep).
void write_explanation_csv(const std::string& path, const Explanation& ex);

// JSON-lines persistence with a leading metadata line.
void save_dataset_jsonl(const std::string& path, const SmDataset& data);
SmDataset load_dataset_jsonl(const std::string& path);

}  // namespace grasplab::sm

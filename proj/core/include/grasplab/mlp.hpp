#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "grasplab/errors.hpp"

namespace grasplab::learn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Layer {
  MatrixXd w;  // out x in
  VectorXd b;
};

// Forward-pass record needed by backward(): layer inputs and pre-activations.
// Rows are batch samples throughout.
struct MlpCache {
  std::vector<MatrixXd> acts;  // acts[0] = input, acts[l] = output of layer l
  std::vector<MatrixXd> pre;   // pre[l-1] = pre-activation of layer l
};

struct MlpGrads {
  std::vector<Layer> layers;

  void add(const MlpGrads& other);
  void scale(double s);
};

// Fully connected network, ReLU on hidden layers, linear output.
class Mlp {
 public:
  Mlp() = default;
  // dims = {in, hidden..., out}; weights initialized U(-1/sqrt(in), 1/sqrt(in)).
  Mlp(const std::vector<int>& dims, std::mt19937_64& rng);

  int input_dim() const { return dims_.empty() ? 0 : dims_.front(); }
  int output_dim() const { return dims_.empty() ? 0 : dims_.back(); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  std::size_t param_count() const;

  // Batched forward; x is B x in. Fills `cache` when given.
  MatrixXd forward(const MatrixXd& x, MlpCache* cache = nullptr) const;
  // Single-sample convenience.
  VectorXd forward1(const VectorXd& x) const;

  // Reverse pass. grad_out is dLoss/dOutput (B x out). Parameter gradients
  // are accumulated into `grads` when given; returns dLoss/dInput (B x in).
  MatrixXd backward(const MlpCache& cache, const MatrixXd& grad_out, MlpGrads* grads) const;

  MlpGrads zero_grads() const;

  // Flat parameter view, row-major per layer, weights then bias. Used by the
  // finite-difference checks and the checkpoint format.
  VectorXd flatten() const;
  void unflatten(const VectorXd& flat);

 private:
  std::vector<int> dims_;
  std::vector<Layer> layers_;
};

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  VectorXd m;
  VectorXd v;
  long t = 0;
};

// One bias-corrected Adam update on a flat parameter vector.
void adam_step(VectorXd& params, const VectorXd& grads, AdamState& state, const AdamConfig& cfg);

// Adam bound to an Mlp (flattens/unflattens around adam_step).
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(const Mlp& net, AdamConfig cfg);

  void step(Mlp& net, const MlpGrads& grads);
  void set_lr(double lr) { cfg_.lr = lr; }
  double lr() const { return cfg_.lr; }
  const AdamState& state() const { return state_; }
  AdamState& state() { return state_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  AdamConfig cfg_;
  AdamState state_;
};

VectorXd flatten_grads(const Mlp& net, const MlpGrads& grads);

}  // namespace grasplab::learn

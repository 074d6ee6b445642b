#include "grasplab/mlp.hpp"

#include <cmath>

namespace grasplab::learn {

void MlpGrads::add(const MlpGrads& other) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].w += other.layers[l].w;
    layers[l].b += other.layers[l].b;
  }
}

void MlpGrads::scale(double s) {
  for (auto& l : layers) {
    l.w *= s;
    l.b *= s;
  }
}

Mlp::Mlp(const std::vector<int>& dims, std::mt19937_64& rng) : dims_(dims) {
  if (dims.size() < 2) throw std::invalid_argument("Mlp needs at least input and output dims");
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("Mlp dims must be positive");
  }
  layers_.resize(dims.size() - 1);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const int in = dims[l], out = dims[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    layers_[l].w.resize(out, in);
    layers_[l].b.resize(out);
    for (int r = 0; r < out; ++r) {
      for (int c = 0; c < in; ++c) layers_[l].w(r, c) = dist(rng);
    }
    for (int r = 0; r < out; ++r) layers_[l].b(r) = dist(rng);
  }
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.w.size()) + l.b.size();
  return n;
}

MatrixXd Mlp::forward(const MatrixXd& x, MlpCache* cache) const {
  if (x.cols() != input_dim()) {
    throw DimensionMismatch("Mlp input has " + std::to_string(x.cols()) + " columns, expected " +
                            std::to_string(input_dim()));
  }
  if (cache) {
    cache->acts.clear();
    cache->pre.clear();
    cache->acts.push_back(x);
  }
  MatrixXd cur = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    MatrixXd z = cur * layers_[l].w.transpose();
    z.rowwise() += layers_[l].b.transpose();
    if (cache) cache->pre.push_back(z);
    if (l + 1 < layers_.size()) {
      cur = z.cwiseMax(0.0);  // ReLU on hidden layers
    } else {
      cur = std::move(z);
    }
    if (cache) cache->acts.push_back(cur);
  }
  return cur;
}

VectorXd Mlp::forward1(const VectorXd& x) const {
  MatrixXd out = forward(x.transpose());
  return out.row(0).transpose();
}

MatrixXd Mlp::backward(const MlpCache& cache, const MatrixXd& grad_out, MlpGrads* grads) const {
  MatrixXd delta = grad_out;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (l + 1 < layers_.size()) {
      // Through the ReLU of layer l+1's input (= layer l's output).
      delta = delta.cwiseProduct((cache.pre[l].array() > 0.0).cast<double>().matrix());
    }
    if (grads) {
      grads->layers[l].w.noalias() += delta.transpose() * cache.acts[l];
      grads->layers[l].b.noalias() += delta.colwise().sum().transpose();
    }
    if (l == 0) {
      return delta * layers_[0].w;
    }
    delta = delta * layers_[l].w;
  }
  return delta;  // unreachable for non-empty nets
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  g.layers.resize(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    g.layers[l].w = MatrixXd::Zero(layers_[l].w.rows(), layers_[l].w.cols());
    g.layers[l].b = VectorXd::Zero(layers_[l].b.size());
  }
  return g;
}

VectorXd Mlp::flatten() const {
  VectorXd flat(param_count());
  Eigen::Index pos = 0;
  for (const auto& l : layers_) {
    for (int r = 0; r < l.w.rows(); ++r) {
      flat.segment(pos, l.w.cols()) = l.w.row(r).transpose();
      pos += l.w.cols();
    }
    flat.segment(pos, l.b.size()) = l.b;
    pos += l.b.size();
  }
  return flat;
}

void Mlp::unflatten(const VectorXd& flat) {
  if (flat.size() != static_cast<Eigen::Index>(param_count())) {
    throw DimensionMismatch("flat parameter vector has wrong length");
  }
  Eigen::Index pos = 0;
  for (auto& l : layers_) {
    for (int r = 0; r < l.w.rows(); ++r) {
      l.w.row(r) = flat.segment(pos, l.w.cols()).transpose();
      pos += l.w.cols();
    }
    l.b = flat.segment(pos, l.b.size());
    pos += l.b.size();
  }
}

VectorXd flatten_grads(const Mlp& net, const MlpGrads& grads) {
  VectorXd flat(net.param_count());
  Eigen::Index pos = 0;
  for (const auto& l : grads.layers) {
    for (int r = 0; r < l.w.rows(); ++r) {
      flat.segment(pos, l.w.cols()) = l.w.row(r).transpose();
      pos += l.w.cols();
    }
    flat.segment(pos, l.b.size()) = l.b;
    pos += l.b.size();
  }
  return flat;
}

void adam_step(VectorXd& params, const VectorXd& grads, AdamState& state, const AdamConfig& cfg) {
  if (state.m.size() == 0) {
    state.m = VectorXd::Zero(params.size());
    state.v = VectorXd::Zero(params.size());
    state.t = 0;
  }
  if (grads.size() != params.size() || state.m.size() != params.size()) {
    throw DimensionMismatch("adam_step size mismatch");
  }
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
  state.v = cfg.beta2 * state.v.array().matrix() + (1.0 - cfg.beta2) * grads.array().square().matrix();
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  params.array() -=
      cfg.lr * (state.m.array() / bc1) / ((state.v.array() / bc2).sqrt() + cfg.eps);
}

AdamOptimizer::AdamOptimizer(const Mlp& net, AdamConfig cfg) : cfg_(cfg) {
  state_.m = VectorXd::Zero(net.param_count());
  state_.v = VectorXd::Zero(net.param_count());
  state_.t = 0;
}

void AdamOptimizer::step(Mlp& net, const MlpGrads& grads) {
  VectorXd p = net.flatten();
  const VectorXd g = flatten_grads(net, grads);
  adam_step(p, g, state_, cfg_);
  net.unflatten(p);
}

}  // namespace grasplab::learn

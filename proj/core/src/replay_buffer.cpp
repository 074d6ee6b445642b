#include "grasplab/replay_buffer.hpp"

#include <cmath>

namespace grasplab::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::add(env::Transition t) {
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

const env::Transition& ReplayBuffer::at(std::size_t i) const {
  if (data_.size() < capacity_) return data_[i];
  return data_[(next_ + i) % capacity_];
}

namespace {

Batch assemble(const std::vector<const env::Transition*>& picks) {
  const Eigen::Index n = static_cast<Eigen::Index>(picks.size());
  const Eigen::Index dim = picks.empty() ? 0 : picks[0]->s.size();
  Batch b;
  b.s.resize(n, dim);
  b.s2.resize(n, dim);
  b.a.resize(n);
  b.r.resize(n);
  b.done.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    b.s.row(i) = picks[i]->s.transpose();
    b.s2.row(i) = picks[i]->s2.transpose();
    b.a(i) = picks[i]->a;
    b.r(i) = picks[i]->r;
    b.done(i) = picks[i]->done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace

Batch ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (data_.empty()) throw EmptyBuffer("sampling from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> dist(0, data_.size() - 1);
  std::vector<const env::Transition*> picks;
  picks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) picks.push_back(&at(dist(rng)));
  return assemble(picks);
}

std::size_t demo_count(std::size_t batch, double dur) {
  return static_cast<std::size_t>(std::lround(static_cast<double>(batch) * dur));
}

Batch sample_mixed_batch(const ReplayBuffer& agent, const ReplayBuffer& demo, std::size_t batch,
                         double dur, std::mt19937_64& rng) {
  const std::size_t n_demo = demo_count(batch, dur);
  const std::size_t n_agent = batch - n_demo;
  if (n_demo > 0 && demo.empty()) throw EmptyBuffer("demo buffer empty but dur > 0");
  if (n_agent > 0 && agent.empty()) throw EmptyBuffer("agent buffer empty");

  std::vector<const env::Transition*> picks;
  picks.reserve(batch);
  if (n_demo > 0) {
    std::uniform_int_distribution<std::size_t> dist(0, demo.size() - 1);
    for (std::size_t i = 0; i < n_demo; ++i) picks.push_back(&demo.at(dist(rng)));
  }
  if (n_agent > 0) {
    std::uniform_int_distribution<std::size_t> dist(0, agent.size() - 1);
    for (std::size_t i = 0; i < n_agent; ++i) picks.push_back(&agent.at(dist(rng)));
  }
  return assemble(picks);
}

}  // namespace grasplab::learn

#pragma once

#include <random>
#include <vector>

#include "grasplab/env.hpp"
#include "grasplab/mlp.hpp"

namespace grasplab::learn {

// Training minibatch, rows are samples.
struct Batch {
  MatrixXd s;
  VectorXd a;
  VectorXd r;
  MatrixXd s2;
  VectorXd done;

  Eigen::Index size() const { return a.size(); }
};

// Fixed-capacity ring of transitions; oldest entries are evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(env::Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return data_.empty(); }

  // i = 0 is the oldest stored transition.
  const env::Transition& at(std::size_t i) const;

  // n uniform draws (with replacement) over the current contents.
  Batch sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // write position once full
  std::vector<env::Transition> data_;
};

// round(batch * dur) transitions from the demo buffer, the rest from the
// agent buffer. Throws EmptyBuffer when a needed buffer is empty.
Batch sample_mixed_batch(const ReplayBuffer& agent, const ReplayBuffer& demo, std::size_t batch,
                         double dur, std::mt19937_64& rng);

// Exact demo share used by sample_mixed_batch.
std::size_t demo_count(std::size_t batch, double dur);

}  // namespace grasplab::learn

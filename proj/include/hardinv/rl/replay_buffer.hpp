#pragma once

#include <span>
#include <vector>

#include "hardinv/common/rng.hpp"
#include "hardinv/nncore/matrix.hpp"

namespace hardinv {

/// One single-step episode: the state is the normalized target hardness.
struct Transition {
  double state = 0.0;
  std::vector<double> action;  // each component in [-1, 1]
  double reward = 0.0;
  bool terminal = true;
};

struct TransitionBatch {
  Matrix states;   // B x 1
  Matrix actions;  // B x A
  std::vector<double> rewards;
  std::vector<bool> terminal;
};

/// Fixed-capacity ring buffer; the oldest transition is overwritten first.
/// Episodes are one step long, so no next state is stored and non-terminal
/// transitions are rejected.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t action_width);

  void push(const Transition& t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t action_width() const { return action_width_; }

  /// Uniform sampling with replacement. Requires size() >= batch.
  TransitionBatch sample(std::size_t batch, Rng& rng) const;
  Transition at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t action_width_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  std::vector<double> states_;
  std::vector<double> actions_;
  std::vector<double> rewards_;
  std::vector<bool> terminal_;
};

}  // namespace hardinv

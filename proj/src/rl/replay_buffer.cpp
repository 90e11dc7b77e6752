#include "hardinv/rl/replay_buffer.hpp"

#include <cmath>
#include <string>

#include "hardinv/common/errors.hpp"

namespace hardinv {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t action_width)
    : capacity_(capacity),
      action_width_(action_width),
      states_(capacity),
      actions_(capacity * action_width),
      rewards_(capacity),
      terminal_(capacity) {
  if (capacity == 0 || action_width == 0) throw ContractError("ReplayBuffer: capacity and action width must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.action.size() != action_width_) {
    throw DimensionError("ReplayBuffer: action has " + std::to_string(t.action.size()) + " components, expected " +
                         std::to_string(action_width_));
  }
  if (!t.terminal) throw ContractError("ReplayBuffer: only single-step (terminal) transitions are supported");
  for (double a : t.action) {
    if (!(a >= -1.0 && a <= 1.0)) throw ContractError("ReplayBuffer: action component outside [-1, 1]");
  }
  if (!std::isfinite(t.state) || !std::isfinite(t.reward)) throw NonFiniteError("ReplayBuffer: non-finite transition");
  states_[next_] = t.state;
  std::copy(t.action.begin(), t.action.end(), actions_.begin() + static_cast<std::ptrdiff_t>(next_ * action_width_));
  rewards_[next_] = t.reward;
  terminal_[next_] = t.terminal;
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw ContractError("ReplayBuffer: index out of range");
  const auto begin = actions_.begin() + static_cast<std::ptrdiff_t>(i * action_width_);
  return {states_[i], std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(action_width_)), rewards_[i],
          terminal_[i]};
}

TransitionBatch ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (batch == 0 || size_ < batch) {
    throw ContractError("ReplayBuffer: cannot sample " + std::to_string(batch) + " from " + std::to_string(size_));
  }
  TransitionBatch out{Matrix(batch, 1), Matrix(batch, action_width_), std::vector<double>(batch),
                      std::vector<bool>(batch)};
  for (std::size_t b = 0; b < batch; ++b) {
    const auto i = static_cast<std::size_t>(rng.below(size_));
    out.states(b, 0) = states_[i];
    const auto src = actions_.begin() + static_cast<std::ptrdiff_t>(i * action_width_);
    std::copy(src, src + static_cast<std::ptrdiff_t>(action_width_), out.actions.row(b).begin());
    out.rewards[b] = rewards_[i];
    out.terminal[b] = terminal_[i];
  }
  return out;
}

}  // namespace hardinv

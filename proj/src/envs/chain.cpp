#include "avdqn/envs.hpp"
#include "avdqn/errors.hpp"

namespace avdqn {

ChainMdp::ChainMdp(int n) : n_(n) { require(n >= 3, "chain: N must be >= 3"); }

std::string ChainMdp::id() const { return "chain:" + std::to_string(n_); }

Observation ChainMdp::encode(int position) const {
  require(position >= 1 && position <= n_, "chain: position out of range");
  Observation obs(static_cast<std::size_t>(n_), 0.0);
  obs[static_cast<std::size_t>(position - 1)] = 1.0;
  return obs;
}

ChainMdp::Move ChainMdp::transition(int position, int action) const {
  require(action == kLeft || action == kRight, "chain: action must be 0 (left) or 1 (right)");
  if (action == kLeft) return {position > 1 ? position - 1 : 1, position == 1 ? kSmallReward : 0.0};
  return {position < n_ ? position + 1 : n_, position == n_ ? kLargeReward : 0.0};
}

void ChainMdp::reset_state(std::uint64_t) { position_ = 2; }

std::pair<double, bool> ChainMdp::advance(int action) {
  const Move move = transition(position_, action);
  position_ = move.next_position;
  return {move.reward, false};
}

}  // namespace avdqn

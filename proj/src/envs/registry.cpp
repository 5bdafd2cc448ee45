#include <charconv>

#include "avdqn/envs.hpp"
#include "avdqn/errors.hpp"

namespace avdqn {

Observation Environment::reset(std::uint64_t seed) {
  reset_state(seed);
  t_ = 0;
  done_ = false;
  return observe();
}

StepResult Environment::step(int action) {
  require(!done_, id() + ": step() on a finished episode; call reset()");
  require(action >= 0 && static_cast<std::size_t>(action) < action_count(), id() + ": action out of range");
  const auto [reward, terminated] = advance(action);
  ++t_;
  done_ = terminated || t_ >= horizon();
  return {observe(), reward, done_};
}

std::unique_ptr<Environment> make_environment(const std::string& id) {
  if (id.rfind("chain:", 0) == 0) {
    const std::string digits = id.substr(6);
    int n = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec != std::errc{} || end != digits.data() + digits.size())
      throw ContractViolation("unknown environment id '" + id + "' (expected chain:N)");
    return std::make_unique<ChainMdp>(n);
  }
  if (id == "cartpole-v0") return std::make_unique<CartPole>(200);
  if (id == "cartpole-v1") return std::make_unique<CartPole>(500);
  if (id == "acrobot-v1") return std::make_unique<Acrobot>();
  if (id == "mountaincar-v0") return std::make_unique<MountainCar>();
  throw ContractViolation("unknown environment id '" + id + "'");
}

std::vector<std::string> known_environment_ids() {
  return {"cartpole-v0", "cartpole-v1", "acrobot-v1", "mountaincar-v0",
          "chain:5",     "chain:10",    "chain:50",   "chain:100"};
}

}  // namespace avdqn

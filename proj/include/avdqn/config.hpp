#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace avdqn {

enum class AgentKind { Avdqn, Dqn, Random };
enum class PrioritySource { SampledQ, Mean };

std::string to_string(AgentKind kind);
AgentKind parse_agent_kind(const std::string& text);

// Every knob of a training run. Unset optionals are filled by resolved()
// from the environment and agent kind.
struct TrainConfig {
  std::string env = "chain:5";
  AgentKind agent = AgentKind::Avdqn;
  int episodes = 1000;
  std::uint64_t seed = 1;

  std::optional<int> omega;         // pre-train episodes; default episodes - 200
  std::optional<double> gamma;      // default 1 on chains, 0.99 otherwise
  std::optional<double> lr;         // default 1e-3 (AVDQN), 1e-2 (DQN)
  bool lr_decay = true;             // lr / (1 + 0.9 (e - omega)) while fine-tuning
  int tau = 100;                    // target sync period, env steps
  int batch = 128;
  std::vector<std::size_t> hidden{100, 100};

  std::size_t replay_capacity = 1'000'000;
  std::optional<bool> per;          // default on for AVDQN, off for DQN
  double per_alpha = 0.7;
  double per_beta = 0.0;
  std::size_t sort_period = 1000;
  PrioritySource priority_source = PrioritySource::SampledQ;

  double entropy_coef = 1.0;
  std::optional<double> grad_clip;  // max L2 norm of the batch gradient, 0 disables; default 1000 on chains, 100 otherwise

  double epsilon_start = 1.0;
  double epsilon_end = 0.01;
  std::optional<long> epsilon_decay_steps;  // default 10% of episodes * horizon

  bool wall_clock = true;  // false writes 0 in the seconds column

  // Fills every optional and checks ranges; throws ContractViolation.
  TrainConfig resolved() const;
  void validate() const;

  int omega_or_default() const;
};

// Flat "key = value" text, '#' starts a comment. Unknown keys throw.
void apply_setting(TrainConfig& config, const std::string& key, const std::string& value);
TrainConfig parse_config(std::istream& in, TrainConfig base = {});
TrainConfig load_config_file(const std::string& path, TrainConfig base = {});
// Resolved values in the same format; parse_config(write) round-trips.
std::string config_snapshot(const TrainConfig& config);

}  // namespace avdqn

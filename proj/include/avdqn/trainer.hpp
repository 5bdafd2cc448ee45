#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "avdqn/config.hpp"
#include "avdqn/dist.hpp"
#include "avdqn/envs.hpp"

namespace avdqn {

struct EpisodeStats {
  int episode = 0;  // 1-based
  double reward = 0.0;
  double seconds = 0.0;  // wall clock since training start, at episode end
  std::string stage;     // "pretrain", "finetune", "egreedy" or "random"
  std::size_t skipped = 0;

  bool operator==(const EpisodeStats&) const = default;
};

struct RunRecord {
  TrainConfig config;  // resolved
  std::vector<EpisodeStats> episodes;
};

// Hooks into the training loop, e.g. for visit counting.
struct TrainObserver {
  std::function<void(int episode, const Environment& env)> on_reset;
  std::function<void(int episode, const Environment& env)> on_step;
};

// Stage of 1-based episode e: Cauchy pre-training while e <= omega.
Stage stage_for_episode(int episode, int omega);
// Constant while pre-training, alpha / (1 + 0.9 (e - omega)) afterwards.
double learning_rate_for_episode(double alpha, int episode, int omega, bool decay);

// Seed for the environment reset of a given episode.
std::uint64_t episode_seed(std::uint64_t run_seed, int episode);

RunRecord train(const TrainConfig& config, const TrainObserver& observer = {});

}  // namespace avdqn

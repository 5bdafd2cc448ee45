#include "avdqn/trainer.hpp"

#include <chrono>
#include <variant>

#include "avdqn/agent.hpp"
#include "avdqn/errors.hpp"

namespace avdqn {

Stage stage_for_episode(int episode, int omega) { return episode <= omega ? Stage::PreTrain : Stage::FineTune; }

double learning_rate_for_episode(double alpha, int episode, int omega, bool decay) {
  if (episode <= omega || !decay) return alpha;
  return alpha / (1.0 + 0.9 * static_cast<double>(episode - omega));
}

std::uint64_t episode_seed(std::uint64_t run_seed, int episode) {
  // splitmix64 of (seed, episode)
  std::uint64_t z = run_seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(episode);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct RandomAgent {};

Transition make_transition(const Observation& s, std::size_t a, const StepResult& step) {
  return {s, static_cast<int>(a), step.reward, step.next_observation, step.done};
}

}  // namespace

RunRecord train(const TrainConfig& config_in, const TrainObserver& observer) {
  RunRecord record;
  record.config = config_in.resolved();
  const TrainConfig& config = record.config;
  auto env = make_environment(config.env);
  Rng rng(config.seed);

  std::variant<RandomAgent, AvdqnAgent, DqnAgent> agent{RandomAgent{}};
  if (config.agent == AgentKind::Avdqn) {
    agent.emplace<AvdqnAgent>(env->observation_dim(), env->action_count(), config, rng);
  } else if (config.agent == AgentKind::Dqn) {
    agent.emplace<DqnAgent>(env->observation_dim(), env->action_count(), config, rng);
  }

  const int omega = *config.omega;
  const auto start = std::chrono::steady_clock::now();
  long global_step = 0;
  record.episodes.reserve(static_cast<std::size_t>(config.episodes));

  for (int e = 1; e <= config.episodes; ++e) {
    const Stage stage = stage_for_episode(e, omega);
    const double lr = learning_rate_for_episode(*config.lr, e, omega, config.lr_decay);
    Observation obs = env->reset(episode_seed(config.seed, e));
    if (observer.on_reset) observer.on_reset(e, *env);

    EpisodeStats stats;
    stats.episode = e;
    while (!env->done()) {
      std::size_t action = 0;
      if (auto* av = std::get_if<AvdqnAgent>(&agent)) {
        action = av->select_action(obs, stage, rng);
      } else if (auto* dq = std::get_if<DqnAgent>(&agent)) {
        action = dq->select_action(obs, global_step, rng);
      } else {
        action = std::uniform_int_distribution<std::size_t>(0, env->action_count() - 1)(rng);
      }
      StepResult step = env->step(static_cast<int>(action));
      stats.reward += step.reward;
      ++global_step;

      if (auto* av = std::get_if<AvdqnAgent>(&agent)) {
        av->remember(make_transition(obs, action, step));
        if (av->ready()) stats.skipped += av->train_step(stage, lr, rng).skipped;
        av->end_env_step();
      } else if (auto* dq = std::get_if<DqnAgent>(&agent)) {
        dq->remember(make_transition(obs, action, step));
        if (dq->ready()) stats.skipped += dq->train_step(lr, rng).skipped;
        dq->end_env_step();
      }
      if (observer.on_step) observer.on_step(e, *env);
      obs = std::move(step.next_observation);
    }

    switch (config.agent) {
      case AgentKind::Avdqn: stats.stage = std::string(stage_name(stage)); break;
      case AgentKind::Dqn: stats.stage = "egreedy"; break;
      case AgentKind::Random: stats.stage = "random"; break;
    }
    if (config.wall_clock)
      stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    record.episodes.push_back(std::move(stats));
  }
  return record;
}

}  // namespace avdqn

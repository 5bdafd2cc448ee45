#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "avdqn/config.hpp"
#include "avdqn/dist.hpp"
#include "avdqn/net.hpp"
#include "avdqn/replay.hpp"

namespace avdqn {

// Splits an output vector laid out as (mu_1, raw_1, mu_2, raw_2, ...) into
// one posterior head per action.
std::vector<PosteriorParams> heads_from_output(std::span<const double> output);
std::vector<PosteriorParams> heads(const FeedforwardNet& net, std::span<const double> observation);

// Index of the largest value; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

// Copies eval into target every `tau` ticks. tick() is called once per
// environment step, after any training for that step.
class TargetSync {
 public:
  explicit TargetSync(int tau);
  bool tick(const FeedforwardNet& eval, FeedforwardNet& target);
  long counter() const { return counter_; }
  int tau() const { return tau_; }

 private:
  int tau_;
  long counter_ = 0;
};

// Rescales `grads` so its L2 norm is at most `max_norm` (0 = no limit).
// Returns the norm before clipping.
double clip_gradient_norm(NetGradients& grads, double max_norm);

struct StepDiagnostics {
  bool trained = false;     // a minibatch was processed
  bool updated = false;     // parameters changed
  double mean_loss = 0.0;   // over the transitions that were kept
  std::size_t skipped = 0;  // transitions dropped for a non-finite loss
};

std::unique_ptr<Replay> make_replay(const TrainConfig& resolved);

// Minibatch objective and its gradient at fixed targets (and fixed noise for
// the variational loss). The objective is sum_j w_j / m * L_j over the kept
// transitions, L_j being the loss of the taken action's output.
struct BatchGradient {
  NetGradients grads;
  double objective = 0.0;
  double mean_loss = 0.0;           // unweighted, over kept transitions
  std::vector<double> td_errors;    // per transition; NaN when not finite
  std::size_t skipped = 0;
};

// L_j = 1/2 (q_j - d_j)^2 - entropy_coef * H[q_j] with q_j drawn from the head
// of action a_j using noise[j]. Transitions with a non-finite loss are skipped.
// td_errors hold q_j - d_j (or mu_j - d_j when `mean_priority`).
BatchGradient avdqn_batch_gradient(const FeedforwardNet& eval, std::span<const Transition* const> batch,
                                   std::span<const double> weights, std::span<const double> targets,
                                   std::span<const double> noise, Stage stage, double entropy_coef,
                                   bool mean_priority = false);

// L_j = 1/2 (Q(s_j, a_j) - d_j)^2.
BatchGradient dqn_batch_gradient(const FeedforwardNet& eval, std::span<const Transition* const> batch,
                                 std::span<const double> weights, std::span<const double> targets);

// Amortized variational DQN: the network maps a state to one posterior head
// per action; actions and bootstrap targets use reparameterized samples from
// those heads (Cauchy while pre-training, Gaussian while fine-tuning).
class AvdqnAgent {
 public:
  AvdqnAgent(std::size_t observation_dim, std::size_t action_count, const TrainConfig& config, Rng& init_rng);

  std::size_t action_count() const { return action_count_; }
  FeedforwardNet& eval_net() { return eval_; }
  const FeedforwardNet& eval_net() const { return eval_; }
  FeedforwardNet& target_net() { return target_; }
  const FeedforwardNet& target_net() const { return target_; }
  Replay& replay() { return *replay_; }
  TargetSync& sync() { return sync_; }

  // Draws one Q per action from the eval heads and returns the argmax.
  std::size_t select_action(std::span<const double> observation, Stage stage, Rng& rng) const;

  // d_j = r_j + gamma * max_a Q~_target(s'_j, a), or r_j when done.
  std::vector<double> compute_targets(std::span<const Transition* const> batch, Stage stage, Rng& rng) const;

  void remember(Transition t);
  bool ready() const { return replay_->size() >= static_cast<std::size_t>(config_.batch); }

  // One minibatch update of the entropy-augmented objective at `lr`
  // (lr == 0 leaves theta untouched but still refreshes priorities).
  StepDiagnostics train_step(Stage stage, double lr, Rng& rng);

  // Per-environment-step bookkeeping (target sync).
  bool end_env_step() { return sync_.tick(eval_, target_); }

 private:
  TrainConfig config_;  // resolved
  std::size_t action_count_;
  FeedforwardNet eval_;
  FeedforwardNet target_;
  std::unique_ptr<Replay> replay_;
  TargetSync sync_;
};

// Linear epsilon decay from start to end over decay_steps, then constant.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.01;
  long decay_steps = 1;

  double at(long t) const;
};

// Epsilon-greedy action on the net's |A| scalar outputs.
std::size_t dqn_select(const FeedforwardNet& net, std::span<const double> observation, long t,
                       const EpsilonSchedule& schedule, Rng& rng);

class DqnAgent {
 public:
  DqnAgent(std::size_t observation_dim, std::size_t action_count, const TrainConfig& config, Rng& init_rng);

  std::size_t action_count() const { return action_count_; }
  FeedforwardNet& eval_net() { return eval_; }
  const FeedforwardNet& eval_net() const { return eval_; }
  FeedforwardNet& target_net() { return target_; }
  const FeedforwardNet& target_net() const { return target_; }
  Replay& replay() { return *replay_; }
  TargetSync& sync() { return sync_; }
  const EpsilonSchedule& schedule() const { return schedule_; }

  std::size_t select_action(std::span<const double> observation, long t, Rng& rng) const {
    return dqn_select(eval_, observation, t, schedule_, rng);
  }

  // d_j = r_j + gamma * max_a Q_target(s'_j, a), or r_j when done.
  std::vector<double> compute_targets(std::span<const Transition* const> batch) const;

  void remember(Transition t);
  bool ready() const { return replay_->size() >= static_cast<std::size_t>(config_.batch); }

  // Semi-gradient step on the batch mean of 1/2 (Q(s,a) - d)^2.
  StepDiagnostics train_step(double lr, Rng& rng);

  bool end_env_step() { return sync_.tick(eval_, target_); }

 private:
  TrainConfig config_;
  std::size_t action_count_;
  FeedforwardNet eval_;
  FeedforwardNet target_;
  std::unique_ptr<Replay> replay_;
  TargetSync sync_;
  EpsilonSchedule schedule_;
};

// Tabular Q-learning over integer-indexed states.
class TabularQ {
 public:
  TabularQ(std::size_t states, std::size_t actions, double initial = 0.0);

  double& operator()(std::size_t s, std::size_t a);
  double operator()(std::size_t s, std::size_t a) const;
  double max_value(std::size_t s) const;
  std::size_t greedy(std::size_t s) const;
  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }

 private:
  std::size_t states_, actions_;
  std::vector<double> table_;
};

struct TabularTransition {
  std::size_t s = 0;
  std::size_t a = 0;
  double r = 0.0;
  std::size_t s_next = 0;
  bool done = false;
};

// Q(s,a) <- (1 - step) Q(s,a) + step (r + gamma max_a' Q(s', a')); no bootstrap when done.
void tabular_q_update(TabularQ& table, const TabularTransition& t, double step, double gamma);

}  // namespace avdqn

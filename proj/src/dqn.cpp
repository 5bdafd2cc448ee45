#include <algorithm>
#include <cmath>

#include "avdqn/agent.hpp"
#include "avdqn/errors.hpp"
#include "avdqn/kernels.hpp"

namespace avdqn {

double EpsilonSchedule::at(long t) const {
  require(t >= 0, "epsilon: t must be >= 0");
  if (t >= decay_steps) return end;
  const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
  return std::max(end, start - (start - end) * frac);
}

std::size_t dqn_select(const FeedforwardNet& net, std::span<const double> observation, long t,
                       const EpsilonSchedule& schedule, Rng& rng) {
  const std::size_t actions = net.arch().output_dim;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < schedule.at(t)) return std::uniform_int_distribution<std::size_t>(0, actions - 1)(rng);
  return argmax(evaluate(net, observation));
}

namespace {

NetArch dqn_arch(std::size_t input, const std::vector<std::size_t>& hidden, std::size_t actions) {
  NetArch arch;
  arch.input_dim = input;
  arch.hidden_dims = hidden;
  arch.output_dim = actions;
  return arch;
}

std::vector<double> stack(std::span<const Transition* const> batch, bool next) {
  std::vector<double> xs;
  for (const Transition* t : batch) {
    const Observation& o = next ? t->s_next : t->s;
    xs.insert(xs.end(), o.begin(), o.end());
  }
  return xs;
}

}  // namespace

DqnAgent::DqnAgent(std::size_t observation_dim, std::size_t action_count, const TrainConfig& config, Rng& init_rng)
    : config_(config.resolved()),
      action_count_(action_count),
      eval_(dqn_arch(observation_dim, config_.hidden, action_count), init_rng()),
      target_(eval_),
      replay_(make_replay(config_)),
      sync_(config_.tau),
      schedule_{config_.epsilon_start, config_.epsilon_end, *config_.epsilon_decay_steps} {
  require(action_count >= 1, "agent: need at least one action");
}

std::vector<double> DqnAgent::compute_targets(std::span<const Transition* const> batch) const {
  std::vector<double> d(batch.size());
  if (batch.empty()) return d;
  const auto tape = kernels::forward_batch(target_, stack(batch, true), batch.size());
  const double gamma = *config_.gamma;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = *batch[j];
    if (t.done) {
      d[j] = t.r;
    } else {
      const auto q = tape.output_row(j);
      d[j] = t.r + gamma * q[argmax(q)];
    }
  }
  return d;
}

void DqnAgent::remember(Transition t) {
  require(t.a >= 0 && static_cast<std::size_t>(t.a) < action_count_, "agent: transition action out of range");
  replay_->push(std::move(t));
  replay_->maybe_sort();
}

BatchGradient dqn_batch_gradient(const FeedforwardNet& eval, std::span<const Transition* const> batch,
                                 std::span<const double> weights, std::span<const double> targets) {
  const std::size_t m = batch.size();
  require(m >= 1, "batch gradient: empty batch");
  require(weights.size() == m && targets.size() == m, "batch gradient: length mismatch");
  const std::size_t width = eval.arch().output_dim;

  BatchGradient out;
  out.grads = NetGradients(eval.arch());
  out.td_errors.resize(m);
  const auto tape = kernels::forward_batch(eval, stack(batch, false), m);
  std::vector<double> dys(m * width, 0.0);
  const double inv_m = 1.0 / static_cast<double>(m);
  double loss_sum = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const auto a = static_cast<std::size_t>(batch[j]->a);
    require(a < width, "batch gradient: action out of range");
    const double residual = tape.output_row(j)[a] - targets[j];
    out.td_errors[j] = residual;
    loss_sum += 0.5 * residual * residual;
    out.objective += weights[j] * inv_m * 0.5 * residual * residual;
    dys[j * width + a] = weights[j] * inv_m * residual;
  }
  out.mean_loss = loss_sum * inv_m;
  if (!std::isfinite(out.objective)) {
    out.skipped = m;
    return out;
  }
  kernels::backward_batch(eval, tape, dys, out.grads);
  return out;
}

StepDiagnostics DqnAgent::train_step(double lr, Rng& rng) {
  const auto m = static_cast<std::size_t>(config_.batch);
  SampledBatch batch = replay_->sample(m, rng);
  const std::vector<double> targets = compute_targets(batch.items);
  BatchGradient bg = dqn_batch_gradient(eval_, batch.items, batch.weights, targets);

  StepDiagnostics diag;
  diag.trained = true;
  diag.mean_loss = bg.mean_loss;
  diag.skipped = bg.skipped;
  if (bg.skipped) return diag;
  if (lr > 0.0) {
    clip_gradient_norm(bg.grads, *config_.grad_clip);
    sgd_step(eval_, bg.grads, lr);
    diag.updated = true;
  }
  replay_->update_priorities(batch.ids, bg.td_errors);
  return diag;
}

}  // namespace avdqn

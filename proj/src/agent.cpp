#include "avdqn/agent.hpp"

#include <cmath>
#include <limits>

#include "avdqn/errors.hpp"
#include "avdqn/kernels.hpp"

namespace avdqn {

std::vector<PosteriorParams> heads_from_output(std::span<const double> output) {
  require(!output.empty() && output.size() % 2 == 0, "heads: output length must be 2 * |A|");
  std::vector<PosteriorParams> out;
  out.reserve(output.size() / 2);
  for (std::size_t a = 0; a < output.size(); a += 2) out.push_back(PosteriorParams::from_raw(output[a], output[a + 1]));
  return out;
}

std::vector<PosteriorParams> heads(const FeedforwardNet& net, std::span<const double> observation) {
  return heads_from_output(evaluate(net, observation));
}

std::size_t argmax(std::span<const double> values) {
  require(!values.empty(), "argmax: empty input");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

TargetSync::TargetSync(int tau) : tau_(tau) { require(tau >= 1, "target sync: tau must be >= 1"); }

bool TargetSync::tick(const FeedforwardNet& eval, FeedforwardNet& target) {
  ++counter_;
  if (counter_ % tau_ != 0) return false;
  copy_params(eval, target);
  return true;
}

double clip_gradient_norm(NetGradients& grads, double max_norm) {
  require(max_norm >= 0.0, "clip_gradient_norm: bound must be >= 0");
  const double norm = grads.l2_norm();
  if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

std::unique_ptr<Replay> make_replay(const TrainConfig& c) {
  if (c.per.value_or(false)) {
    RankedReplay::Options opts;
    opts.capacity = c.replay_capacity;
    opts.alpha = c.per_alpha;
    opts.beta = c.per_beta;
    opts.sort_period = c.sort_period;
    return std::make_unique<RankedReplay>(opts);
  }
  return std::make_unique<UniformReplay>(c.replay_capacity);
}

namespace {

NetArch make_arch(std::size_t input, const std::vector<std::size_t>& hidden, std::size_t output) {
  NetArch arch;
  arch.input_dim = input;
  arch.hidden_dims = hidden;
  arch.output_dim = output;
  return arch;
}

std::vector<double> stack_observations(std::span<const Transition* const> batch, bool next) {
  std::vector<double> xs;
  if (batch.empty()) return xs;
  xs.reserve(batch.size() * batch.front()->s.size());
  for (const Transition* t : batch) {
    const Observation& o = next ? t->s_next : t->s;
    xs.insert(xs.end(), o.begin(), o.end());
  }
  return xs;
}

}  // namespace

// ---------------------------------------------------------------------------

AvdqnAgent::AvdqnAgent(std::size_t observation_dim, std::size_t action_count, const TrainConfig& config,
                       Rng& init_rng)
    : config_(config.resolved()),
      action_count_(action_count),
      eval_(make_arch(observation_dim, config_.hidden, 2 * action_count), init_rng()),
      target_(eval_),
      replay_(make_replay(config_)),
      sync_(config_.tau) {
  require(action_count >= 1, "agent: need at least one action");
}

std::size_t AvdqnAgent::select_action(std::span<const double> observation, Stage stage, Rng& rng) const {
  const auto hs = heads(eval_, observation);
  std::vector<double> q(hs.size());
  for (std::size_t a = 0; a < hs.size(); ++a) q[a] = sample(hs[a], stage, draw_noise(stage, rng));
  return argmax(q);
}

std::vector<double> AvdqnAgent::compute_targets(std::span<const Transition* const> batch, Stage stage,
                                                Rng& rng) const {
  std::vector<double> d(batch.size());
  if (batch.empty()) return d;
  const auto tape = kernels::forward_batch(target_, stack_observations(batch, true), batch.size());
  const double gamma = *config_.gamma;
  std::vector<double> q(action_count_);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const Transition& t = *batch[j];
    if (t.done) {
      d[j] = t.r;
      continue;
    }
    const auto hs = heads_from_output(tape.output_row(j));
    for (std::size_t a = 0; a < hs.size(); ++a) q[a] = sample(hs[a], stage, draw_noise(stage, rng));
    d[j] = t.r + gamma * q[argmax(q)];
  }
  return d;
}

void AvdqnAgent::remember(Transition t) {
  require(t.a >= 0 && static_cast<std::size_t>(t.a) < action_count_, "agent: transition action out of range");
  replay_->push(std::move(t));
  replay_->maybe_sort();
}

BatchGradient avdqn_batch_gradient(const FeedforwardNet& eval, std::span<const Transition* const> batch,
                                   std::span<const double> weights, std::span<const double> targets,
                                   std::span<const double> noise, Stage stage, double entropy_coef,
                                   bool mean_priority) {
  const std::size_t m = batch.size();
  require(m >= 1, "batch gradient: empty batch");
  require(weights.size() == m && targets.size() == m && noise.size() == m, "batch gradient: length mismatch");
  const std::size_t width = eval.arch().output_dim;
  require(width % 2 == 0, "batch gradient: output length must be 2 * |A|");

  BatchGradient out;
  out.grads = NetGradients(eval.arch());
  out.td_errors.assign(m, std::numeric_limits<double>::quiet_NaN());
  const auto tape = kernels::forward_batch(eval, stack_observations(batch, false), m);
  std::vector<double> dys(m * width, 0.0);
  const double inv_m = 1.0 / static_cast<double>(m);
  double loss_sum = 0.0;
  std::size_t kept = 0;

  for (std::size_t j = 0; j < m; ++j) {
    const auto a = static_cast<std::size_t>(batch[j]->a);
    require(2 * a + 1 < width, "batch gradient: action out of range");
    const auto row = tape.output_row(j);
    const auto params = PosteriorParams::from_raw(row[2 * a], row[2 * a + 1]);
    const double q = sample(params, stage, noise[j]);
    const double td = mean_priority ? params.mu - targets[j] : q - targets[j];
    if (std::isfinite(td)) out.td_errors[j] = td;
    const auto hl = head_loss_grad(params, q, noise[j], targets[j], stage, entropy_coef);
    if (!hl) {
      ++out.skipped;
      continue;
    }
    const double w = weights[j] * inv_m;
    dys[j * width + 2 * a] = w * hl->d_mu;
    dys[j * width + 2 * a + 1] = w * hl->d_raw_scale;
    out.objective += w * hl->loss;
    loss_sum += hl->loss;
    ++kept;
  }
  out.mean_loss = kept ? loss_sum / static_cast<double>(kept) : 0.0;
  if (kept > 0) kernels::backward_batch(eval, tape, dys, out.grads);
  return out;
}

StepDiagnostics AvdqnAgent::train_step(Stage stage, double lr, Rng& rng) {
  const auto m = static_cast<std::size_t>(config_.batch);
  SampledBatch batch = replay_->sample(m, rng);
  const std::vector<double> targets = compute_targets(batch.items, stage, rng);
  std::vector<double> noise(m);
  for (auto& n : noise) n = draw_noise(stage, rng);

  BatchGradient bg = avdqn_batch_gradient(eval_, batch.items, batch.weights, targets, noise, stage,
                                          config_.entropy_coef, config_.priority_source == PrioritySource::Mean);
  StepDiagnostics diag;
  diag.trained = true;
  diag.skipped = bg.skipped;
  diag.mean_loss = bg.mean_loss;
  const std::size_t kept = m - bg.skipped;
  if (lr > 0.0 && kept > 0) {
    if (bg.grads.all_finite()) {
      clip_gradient_norm(bg.grads, *config_.grad_clip);
      sgd_step(eval_, bg.grads, lr);
      diag.updated = true;
    } else {
      diag.skipped += kept;
    }
  }
  std::vector<std::size_t> ids;
  std::vector<double> td;
  for (std::size_t j = 0; j < m; ++j) {
    if (!std::isfinite(bg.td_errors[j])) continue;
    ids.push_back(batch.ids[j]);
    td.push_back(bg.td_errors[j]);
  }
  replay_->update_priorities(ids, td);
  return diag;
}

}  // namespace avdqn

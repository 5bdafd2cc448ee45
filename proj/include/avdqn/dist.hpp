#pragma once

// Posterior heads over Q-values.
//
// Each action's head is a (location, raw scale) pair produced by the network.
// During pre-training the head is read as a Cauchy C(mu, delta), during
// fine-tuning as a Gaussian N(mu, sigma^2). Samples are reparameterized:
//
//   Gaussian: q = mu + sigma * eps,               eps ~ N(0, 1)
//   Cauchy:   q = mu + delta * tan(pi (u - 1/2)), u   ~ U(0, 1)
//
// so gradients of the per-sample surrogate 1/2 (q - d)^2 - H[q] flow into
// (mu, raw_scale) exactly.

#include <optional>
#include <random>
#include <string_view>

namespace avdqn {

using Rng = std::mt19937_64;

enum class Stage { PreTrain, FineTune };

std::string_view stage_name(Stage stage);

// softplus(raw) = ln(1 + e^raw), stable for large |raw|.
double positive_transform(double raw);
// d softplus / d raw = logistic(raw).
double positive_transform_derivative(double raw);

struct PosteriorParams {
  double mu = 0.0;
  double raw_scale = 0.0;
  double scale = 0.0;  // positive_transform(raw_scale)

  static PosteriorParams from_raw(double mu, double raw_scale) {
    return {mu, raw_scale, positive_transform(raw_scale)};
  }
};

// Standardized draw for the stage's family: eps itself (FineTune) or
// tan(pi (u - 1/2)) (PreTrain). Throws std::domain_error for u outside (0, 1).
double standard_draw(Stage stage, double noise);

// Raw noise for the stage: eps ~ N(0,1) or u ~ U(0,1) with u never 0.
double draw_noise(Stage stage, Rng& rng);

double sample(const PosteriorParams& params, Stage stage, double noise);

// Differential entropy: 1/2 ln(2 pi e sigma^2) or ln(4 pi delta).
double entropy(double scale, Stage stage);
inline double entropy(const PosteriorParams& params, Stage stage) { return entropy(params.scale, stage); }

struct HeadLoss {
  double loss = 0.0;
  double d_mu = 0.0;
  double d_raw_scale = 0.0;
};

// Per-sample surrogate L = 1/2 (q - d)^2 - entropy_coef * H[q] and its exact
// gradient in (mu, raw_scale). `target` is a constant. Returns nullopt when
// the loss or a gradient is not finite (extreme Cauchy draw); the caller
// skips the step.
std::optional<HeadLoss> head_loss_grad(const PosteriorParams& params, double q_sample, double noise, double target,
                                       Stage stage, double entropy_coef = 1.0);

}  // namespace avdqn

#include "avdqn/dist.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace avdqn {

std::string_view stage_name(Stage stage) { return stage == Stage::PreTrain ? "pretrain" : "finetune"; }

double positive_transform(double raw) {
  if (raw > 0.0) return raw + std::log1p(std::exp(-raw));
  return std::log1p(std::exp(raw));
}

double positive_transform_derivative(double raw) {
  if (raw >= 0.0) return 1.0 / (1.0 + std::exp(-raw));
  const double e = std::exp(raw);
  return e / (1.0 + e);
}

double standard_draw(Stage stage, double noise) {
  if (stage == Stage::FineTune) return noise;
  if (!(noise > 0.0 && noise < 1.0)) throw std::domain_error("Cauchy reparameterization needs u in (0, 1)");
  return std::tan(std::numbers::pi * (noise - 0.5));
}

double draw_noise(Stage stage, Rng& rng) {
  if (stage == Stage::FineTune) return std::normal_distribution<double>(0.0, 1.0)(rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  double u = 0.0;
  do {
    u = uniform(rng);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

double sample(const PosteriorParams& params, Stage stage, double noise) {
  return params.mu + params.scale * standard_draw(stage, noise);
}

double entropy(double scale, Stage stage) {
  if (stage == Stage::FineTune) return 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e * scale * scale);
  return std::log(4.0 * std::numbers::pi * scale);
}

std::optional<HeadLoss> head_loss_grad(const PosteriorParams& params, double q_sample, double noise, double target,
                                       Stage stage, double entropy_coef) {
  const double z = standard_draw(stage, noise);  // dq/dscale
  const double residual = q_sample - target;
  HeadLoss out;
  out.loss = 0.5 * residual * residual - entropy_coef * entropy(params.scale, stage);
  out.d_mu = residual;
  // dH/dscale is 1/scale for both families.
  const double d_scale = residual * z - entropy_coef / params.scale;
  out.d_raw_scale = d_scale * positive_transform_derivative(params.raw_scale);
  if (!std::isfinite(out.loss) || !std::isfinite(out.d_mu) || !std::isfinite(out.d_raw_scale)) return std::nullopt;
  return out;
}

}  // namespace avdqn

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "avdqn/envs.hpp"
#include "avdqn/errors.hpp"

namespace avdqn {

namespace {

void check_action(int action, std::size_t count) {
  require(action >= 0 && static_cast<std::size_t>(action) < count, "action out of range");
}

double wrap(double x, double lo, double hi) {
  const double span = hi - lo;
  while (x > hi) x -= span;
  while (x < lo) x += span;
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// CartPole

CartPole::CartPole(int horizon) : horizon_(horizon) { require(horizon >= 1, "cartpole: horizon must be >= 1"); }

std::string CartPole::id() const { return horizon_ == 500 ? "cartpole-v1" : "cartpole-v0"; }

CartPole::State CartPole::dynamics(const State& s, int action) {
  const double total_mass = kCartMass + kPoleMass;
  const double polemass_length = kPoleMass * kHalfLength;
  const double force = action == 1 ? kForce : -kForce;
  const auto [x, x_dot, theta, theta_dot] = s;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  const double temp = (force + polemass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) / (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - polemass_length * theta_acc * cos_t / total_mass;

  return {x + kTau * x_dot, x_dot + kTau * x_acc, theta + kTau * theta_dot, theta_dot + kTau * theta_acc};
}

bool CartPole::out_of_bounds(const State& s) {
  return s[0] < -kXLimit || s[0] > kXLimit || s[2] < -kThetaLimit || s[2] > kThetaLimit;
}

void CartPole::reset_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.05, 0.05);
  for (auto& v : state_) v = init(rng);
}

std::pair<double, bool> CartPole::advance(int action) {
  check_action(action, 2);
  state_ = dynamics(state_, action);
  return {1.0, out_of_bounds(state_)};
}

// ---------------------------------------------------------------------------
// Acrobot

namespace {

using AcrobotState = Acrobot::State;

AcrobotState acrobot_derivatives(const AcrobotState& s, double torque) {
  constexpr double m1 = Acrobot::kLinkMass1, m2 = Acrobot::kLinkMass2;
  constexpr double l1 = Acrobot::kLinkLength1;
  constexpr double lc1 = Acrobot::kLinkCom1, lc2 = Acrobot::kLinkCom2;
  constexpr double i1 = Acrobot::kLinkMoi, i2 = Acrobot::kLinkMoi;
  constexpr double g = Acrobot::kGravity;
  constexpr double half_pi = std::numbers::pi / 2.0;
  const auto [theta1, theta2, dtheta1, dtheta2] = s;

  const double d1 = m1 * lc1 * lc1 + m2 * (l1 * l1 + lc2 * lc2 + 2.0 * l1 * lc2 * std::cos(theta2)) + i1 + i2;
  const double d2 = m2 * (lc2 * lc2 + l1 * lc2 * std::cos(theta2)) + i2;
  const double phi2 = m2 * lc2 * g * std::cos(theta1 + theta2 - half_pi);
  const double phi1 = -m2 * l1 * lc2 * dtheta2 * dtheta2 * std::sin(theta2) -
                      2.0 * m2 * l1 * lc2 * dtheta2 * dtheta1 * std::sin(theta2) +
                      (m1 * lc1 + m2 * l1) * g * std::cos(theta1 - half_pi) + phi2;
  const double ddtheta2 = (torque + d2 / d1 * phi1 - m2 * l1 * lc2 * dtheta1 * dtheta1 * std::sin(theta2) - phi2) /
                          (m2 * lc2 * lc2 + i2 - d2 * d2 / d1);
  const double ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
  return {dtheta1, dtheta2, ddtheta1, ddtheta2};
}

AcrobotState axpy(const AcrobotState& y, double h, const AcrobotState& k) {
  return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]};
}

}  // namespace

Acrobot::Acrobot() = default;

Observation Acrobot::observe() const {
  return {std::cos(state_[0]), std::sin(state_[0]), std::cos(state_[1]),
          std::sin(state_[1]), state_[2],           state_[3]};
}

Acrobot::State Acrobot::dynamics(const State& s, int action) {
  const double torque = static_cast<double>(action) - 1.0;
  const double h = kDt;
  const State k1 = acrobot_derivatives(s, torque);
  const State k2 = acrobot_derivatives(axpy(s, h / 2.0, k1), torque);
  const State k3 = acrobot_derivatives(axpy(s, h / 2.0, k2), torque);
  const State k4 = acrobot_derivatives(axpy(s, h, k3), torque);
  State ns;
  for (int i = 0; i < 4; ++i) ns[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

  ns[0] = wrap(ns[0], -std::numbers::pi, std::numbers::pi);
  ns[1] = wrap(ns[1], -std::numbers::pi, std::numbers::pi);
  ns[2] = std::clamp(ns[2], -kMaxVel1, kMaxVel1);
  ns[3] = std::clamp(ns[3], -kMaxVel2, kMaxVel2);
  return ns;
}

bool Acrobot::reached_goal(const State& s) { return -std::cos(s[0]) - std::cos(s[1] + s[0]) > 1.0; }

void Acrobot::reset_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.1, 0.1);
  for (auto& v : state_) v = init(rng);
}

std::pair<double, bool> Acrobot::advance(int action) {
  check_action(action, 3);
  state_ = dynamics(state_, action);
  const bool goal = reached_goal(state_);
  return {goal ? 0.0 : -1.0, goal};
}

// ---------------------------------------------------------------------------
// MountainCar

MountainCar::MountainCar() = default;

MountainCar::State MountainCar::dynamics(const State& s, int action) {
  double position = s[0];
  double velocity = s[1];
  velocity += (action - 1) * kForce + std::cos(3.0 * position) * (-kGravity);
  velocity = std::clamp(velocity, -kMaxSpeed, kMaxSpeed);
  position += velocity;
  position = std::clamp(position, kMinPosition, kMaxPosition);
  if (position == kMinPosition && velocity < 0.0) velocity = 0.0;
  return {position, velocity};
}

bool MountainCar::reached_goal(const State& s) { return s[0] >= kGoalPosition && s[1] >= 0.0; }

void MountainCar::reset_state(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.6, -0.4);
  state_ = {init(rng), 0.0};
}

std::pair<double, bool> MountainCar::advance(int action) {
  check_action(action, 3);
  state_ = dynamics(state_, action);
  return {-1.0, reached_goal(state_)};
}

}  // namespace avdqn

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace avdqn {

using Observation = std::vector<double>;

struct StepResult {
  Observation next_observation;
  double reward = 0.0;
  bool done = false;
};

// Episodic environment with a discrete action set. done is reported when the
// task terminates or the horizon is reached; stepping afterwards throws
// ContractViolation until reset().
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string id() const = 0;
  virtual std::size_t observation_dim() const = 0;
  virtual std::size_t action_count() const = 0;
  virtual int horizon() const = 0;

  Observation reset(std::uint64_t seed);
  StepResult step(int action);
  // Encoding of the current internal state.
  virtual Observation observe() const = 0;

  int t() const { return t_; }
  bool done() const { return done_; }

 protected:
  virtual void reset_state(std::uint64_t seed) = 0;
  // Advances the internal state; returns (reward, terminated).
  virtual std::pair<double, bool> advance(int action) = 0;

 private:
  int t_ = 0;
  bool done_ = true;
};

// N-state chain. Starts at s_2; action 0 = left, 1 = right; moves are
// deterministic and clipped at the ends. (s_1, left) pays 1/1000 and
// (s_N, right) pays 1. The episode lasts N + 9 steps.
class ChainMdp final : public Environment {
 public:
  static constexpr int kLeft = 0;
  static constexpr int kRight = 1;
  static constexpr double kSmallReward = 1.0 / 1000.0;
  static constexpr double kLargeReward = 1.0;

  explicit ChainMdp(int n);

  std::string id() const override;
  std::size_t observation_dim() const override { return static_cast<std::size_t>(n_); }
  std::size_t action_count() const override { return 2; }
  int horizon() const override { return n_ + 9; }
  Observation observe() const override { return encode(position_); }

  int n() const { return n_; }
  int position() const { return position_; }  // 1-based

  // One-hot of a 1-based position.
  Observation encode(int position) const;

  struct Move {
    int next_position;
    double reward;
  };
  Move transition(int position, int action) const;

 protected:
  void reset_state(std::uint64_t seed) override;
  std::pair<double, bool> advance(int action) override;

 private:
  int n_;
  int position_ = 2;
};

// Cart-pole balancing, Euler step of 0.02 s, force +-10 N.
// State (x, x_dot, theta, theta_dot); +1 reward per step.
class CartPole final : public Environment {
 public:
  using State = std::array<double, 4>;

  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr double kXLimit = 2.4;

  explicit CartPole(int horizon);

  std::string id() const override;
  std::size_t observation_dim() const override { return 4; }
  std::size_t action_count() const override { return 2; }
  int horizon() const override { return horizon_; }
  Observation observe() const override { return {state_.begin(), state_.end()}; }

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

  static State dynamics(const State& s, int action);
  static bool out_of_bounds(const State& s);

 protected:
  void reset_state(std::uint64_t seed) override;
  std::pair<double, bool> advance(int action) override;

 private:
  int horizon_;
  State state_{};
};

// Two-link acrobot ("book" dynamics), one RK4 step of 0.2 s per action,
// torque in {-1, 0, +1}. Observation (cos t1, sin t1, cos t2, sin t2, dt1, dt2).
// Reward -1 per step, 0 on the step that reaches the goal height.
class Acrobot final : public Environment {
 public:
  using State = std::array<double, 4>;  // theta1, theta2, dtheta1, dtheta2

  static constexpr double kDt = 0.2;
  static constexpr double kLinkLength1 = 1.0;
  static constexpr double kLinkMass1 = 1.0;
  static constexpr double kLinkMass2 = 1.0;
  static constexpr double kLinkCom1 = 0.5;
  static constexpr double kLinkCom2 = 0.5;
  static constexpr double kLinkMoi = 1.0;
  static constexpr double kGravity = 9.8;
  static constexpr double kMaxVel1 = 4.0 * 3.14159265358979323846;
  static constexpr double kMaxVel2 = 9.0 * 3.14159265358979323846;

  Acrobot();

  std::string id() const override { return "acrobot-v1"; }
  std::size_t observation_dim() const override { return 6; }
  std::size_t action_count() const override { return 3; }
  int horizon() const override { return 500; }
  Observation observe() const override;

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

  static State dynamics(const State& s, int action);
  static bool reached_goal(const State& s);

 protected:
  void reset_state(std::uint64_t seed) override;
  std::pair<double, bool> advance(int action) override;

 private:
  State state_{};
};

// Under-powered car in a cosine valley; actions push left / none / right.
// Reward -1 per step; terminates at position >= 0.5.
class MountainCar final : public Environment {
 public:
  using State = std::array<double, 2>;  // position, velocity

  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPosition = 0.5;
  static constexpr double kForce = 0.001;
  static constexpr double kGravity = 0.0025;

  MountainCar();

  std::string id() const override { return "mountaincar-v0"; }
  std::size_t observation_dim() const override { return 2; }
  std::size_t action_count() const override { return 3; }
  int horizon() const override { return 200; }
  Observation observe() const override { return {state_[0], state_[1]}; }

  const State& state() const { return state_; }
  void set_state(const State& s) { state_ = s; }

  static State dynamics(const State& s, int action);
  static bool reached_goal(const State& s);

 protected:
  void reset_state(std::uint64_t seed) override;
  std::pair<double, bool> advance(int action) override;

 private:
  State state_{};
};

// Ids: "chain:N", "cartpole-v0", "cartpole-v1", "acrobot-v1", "mountaincar-v0".
std::unique_ptr<Environment> make_environment(const std::string& id);
std::vector<std::string> known_environment_ids();

}  // namespace avdqn

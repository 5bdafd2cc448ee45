#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "avdqn/errors.hpp"
#include "avdqn/net.hpp"
#include "oracles.hpp"

namespace avdqn {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

NetArch small_arch() { return {3, {5, 4}, 2}; }

TEST(Net, ZeroNetGivesZeroOutput) {
  FeedforwardNet net(small_arch());
  auto y = evaluate(net, std::vector<double>{1.0, -2.0, 3.0});
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(Net, ReluGating) {
  FeedforwardNet net(NetArch{1, {1}, 1});
  net.mutable_layers()[0].weights[0] = 1.0;
  net.mutable_layers()[1].weights[0] = 1.0;
  auto pos = forward(net, std::vector<double>{2.0});
  EXPECT_EQ(pos.tape.layer_inputs[1][0], 2.0);
  EXPECT_EQ(pos.output[0], 2.0);
  auto neg = forward(net, std::vector<double>{-2.0});
  EXPECT_EQ(neg.tape.layer_inputs[1][0], 0.0);
  EXPECT_EQ(neg.output[0], 0.0);
}

TEST(Net, MatchesEigenOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    FeedforwardNet net({6, {17, 9, 5}, 4}, 100 + trial);
    auto x = random_vector(6, rng, -3, 3);
    auto y = evaluate(net, x);
    auto ref = oracle::eigen_forward(net, x);
    ASSERT_EQ(y.size(), ref.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      EXPECT_LE(std::abs(y[i] - ref[i]), 1e-12 * std::max(1.0, std::abs(ref[i])));
    }
  }
}

TEST(Net, ForwardIsDeterministic) {
  FeedforwardNet net({4, {100, 100}, 4}, 3);
  std::vector<double> x{0.1, -0.2, 0.3, 0.4};
  auto a = evaluate(net, x);
  auto b = evaluate(net, x);
  EXPECT_EQ(a, b);
}

TEST(Net, PositiveHomogeneousWithZeroBiases) {
  FeedforwardNet net({3, {8, 8}, 2}, 11);
  for (auto& l : net.mutable_layers()) std::fill(l.biases.begin(), l.biases.end(), 0.0);
  std::vector<double> x{0.5, -1.5, 2.0};
  auto y = evaluate(net, x);
  std::vector<double> x3{1.5, -4.5, 6.0};
  auto y3 = evaluate(net, x3);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y3[i], 3.0 * y[i], 1e-12);
}

TEST(Net, DimensionMismatchThrows) {
  FeedforwardNet net(small_arch(), 1);
  EXPECT_THROW(forward(net, std::vector<double>{1.0}), ContractViolation);
}

TEST(Net, InvalidArchThrows) {
  EXPECT_THROW((FeedforwardNet(NetArch{0, {4}, 2})), ContractViolation);
  EXPECT_THROW((FeedforwardNet(NetArch{2, {}, 2})), ContractViolation);
  EXPECT_THROW((FeedforwardNet(NetArch{2, {4, 0}, 2})), ContractViolation);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  FeedforwardNet net(small_arch(), 2);
  auto ev = forward(net, std::vector<double>{0.3, 0.2, 0.1});
  auto g = backward(net, ev.tape, std::vector<double>{0.0, 0.0});
  EXPECT_EQ(g.max_abs(), 0.0);
}

TEST(Backward, ProductRuleOnLinearChain) {
  FeedforwardNet net(NetArch{1, {1}, 1});
  const double w1 = 0.7, w2 = 1.3, x = 2.0;
  net.mutable_layers()[0].weights[0] = w1;
  net.mutable_layers()[1].weights[0] = w2;
  auto ev = forward(net, std::vector<double>{x});
  auto g = backward(net, ev.tape, std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(g.layers()[0].weights[0], w2 * x);
  EXPECT_DOUBLE_EQ(g.layers()[1].weights[0], w1 * x);
}

TEST(Backward, ReluSubgradientAtZeroIsZero) {
  FeedforwardNet net(NetArch{1, {1}, 1});
  net.mutable_layers()[0].weights[0] = 1.0;
  net.mutable_layers()[1].weights[0] = 1.0;
  auto ev = forward(net, std::vector<double>{0.0});
  auto g = backward(net, ev.tape, std::vector<double>{1.0});
  EXPECT_EQ(g.layers()[0].weights[0], 0.0);
  EXPECT_EQ(g.layers()[0].biases[0], 0.0);
}

TEST(Backward, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    FeedforwardNet net({4, {7, 6}, 3}, 50 + trial);
    auto x = random_vector(4, rng, -2, 2);
    auto dy = random_vector(3, rng);
    auto ev = forward(net, x);
    auto g = backward(net, ev.tape, dy);
    auto fd = oracle::finite_difference(net, [&](const FeedforwardNet& n) {
      auto y = evaluate(n, x);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += dy[i] * y[i];
      return s;
    });
    EXPECT_LT(oracle::max_relative_error(g, fd), 1e-4) << "trial " << trial;
  }
}

TEST(Backward, StaleTapeThrows) {
  FeedforwardNet net(small_arch(), 4);
  auto ev = forward(net, std::vector<double>{0.1, 0.2, 0.3});
  NetGradients g(net.arch());
  sgd_step(net, g, 0.1);
  EXPECT_THROW(backward(net, ev.tape, std::vector<double>{1.0, 1.0}), ContractViolation);
  FeedforwardNet other(small_arch(), 4);
  auto ev2 = forward(other, std::vector<double>{0.1, 0.2, 0.3});
  EXPECT_THROW(backward(net, ev2.tape, std::vector<double>{1.0, 1.0}), ContractViolation);
}

TEST(Sgd, ZeroGradientLeavesNetUnchanged) {
  FeedforwardNet net(small_arch(), 8);
  auto before = net.layers()[0].weights;
  sgd_step(net, NetGradients(net.arch()), 0.5);
  EXPECT_EQ(net.layers()[0].weights, before);
}

TEST(Sgd, Arithmetic) {
  FeedforwardNet net(NetArch{1, {1}, 1});
  net.mutable_layers()[0].weights[0] = 1.0;
  NetGradients g(net.arch());
  g.layers()[0].weights[0] = 0.5;
  sgd_step(net, g, 0.1);
  EXPECT_DOUBLE_EQ(net.layers()[0].weights[0], 0.95);
}

TEST(Sgd, TwoStepsEqualDoubledRate) {
  FeedforwardNet a(small_arch(), 9);
  FeedforwardNet b(a);
  NetGradients g(a.arch());
  std::mt19937_64 rng(1);
  for (auto& l : g.layers()) {
    l.weights = random_vector(l.weights.size(), rng);
    l.biases = random_vector(l.biases.size(), rng);
  }
  sgd_step(a, g, 0.01);
  sgd_step(a, g, 0.01);
  sgd_step(b, g, 0.02);
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    for (std::size_t i = 0; i < a.layers()[l].weights.size(); ++i) {
      EXPECT_NEAR(a.layers()[l].weights[i], b.layers()[l].weights[i], 1e-15);
    }
  }
}

TEST(Sgd, RejectsBadArguments) {
  FeedforwardNet net(small_arch(), 1);
  EXPECT_THROW(sgd_step(net, NetGradients(net.arch()), 0.0), ContractViolation);
  EXPECT_THROW(sgd_step(net, NetGradients(NetArch{3, {5}, 2}), 0.1), ContractViolation);
}

TEST(CopyParams, DeepCopy) {
  FeedforwardNet src(small_arch(), 12);
  FeedforwardNet dst(small_arch(), 13);
  copy_params(src, dst);
  std::vector<double> x{0.4, 0.5, -0.6};
  EXPECT_EQ(evaluate(src, x), evaluate(dst, x));
  src.mutable_layers()[0].weights[0] += 1.0;
  EXPECT_NE(src.layers()[0].weights[0], dst.layers()[0].weights[0]);
  EXPECT_NE(evaluate(src, x), evaluate(dst, x));
}

TEST(CopyParams, SelfCopyIsNoOp) {
  FeedforwardNet net(small_arch(), 12);
  auto before = net.layers()[1].weights;
  copy_params(net, net);
  EXPECT_EQ(net.layers()[1].weights, before);
}

TEST(CopyParams, ArchMismatchThrows) {
  FeedforwardNet a(small_arch(), 1);
  FeedforwardNet b(NetArch{3, {5, 4}, 3}, 1);
  EXPECT_THROW(copy_params(a, b), ContractViolation);
}

TEST(CountParams, PaperExamples) {
  EXPECT_EQ(count_params({4, {100, 100}, 4}), 11004u);
  EXPECT_EQ(count_params({4, {100, 100}, 2}), 10802u);
  EXPECT_EQ(count_params({50, {100, 100}, 4}), 15604u);
}

TEST(CountParams, MatchesAllocation) {
  for (std::size_t input : {4u, 6u, 2u, 5u, 10u, 50u, 100u}) {
    for (std::size_t out : {2u, 3u, 4u, 6u}) {
      FeedforwardNet net({input, {100, 100}, out});
      EXPECT_EQ(count_params(net.arch()), net.allocated_params());
    }
  }
}

TEST(Checkpoint, RoundTrip) {
  FeedforwardNet net({5, {7, 3}, 4}, 21);
  std::stringstream buf;
  save_checkpoint(net, buf);
  auto loaded = load_checkpoint(buf);
  EXPECT_EQ(loaded.arch(), net.arch());
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    EXPECT_EQ(loaded.layers()[l].weights, net.layers()[l].weights);
    EXPECT_EQ(loaded.layers()[l].biases, net.layers()[l].biases);
  }
}

TEST(Checkpoint, RejectsGarbage) {
  std::stringstream buf("not a checkpoint at all");
  EXPECT_ANY_THROW(load_checkpoint(buf));
}

TEST(Init, WithinFanInBound) {
  FeedforwardNet net({16, {100, 100}, 4}, 77);
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.arch().fan_in(l)));
    for (double w : net.layers()[l].weights) EXPECT_LE(std::abs(w), bound);
  }
  EXPECT_TRUE(net.all_finite());
}

}  // namespace
}  // namespace avdqn

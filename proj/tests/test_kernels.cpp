#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "avdqn/errors.hpp"
#include "avdqn/kernels.hpp"

namespace avdqn {
namespace {

struct Case {
  NetArch arch;
  std::size_t batch;
  bool one_hot;
};

std::vector<double> make_inputs(const Case& c, std::mt19937_64& rng) {
  std::vector<double> xs(c.batch * c.arch.input_dim, 0.0);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<std::size_t> pick(0, c.arch.input_dim - 1);
  for (std::size_t b = 0; b < c.batch; ++b) {
    if (c.one_hot) {
      xs[b * c.arch.input_dim + pick(rng)] = 1.0;
    } else {
      for (std::size_t i = 0; i < c.arch.input_dim; ++i) xs[b * c.arch.input_dim + i] = u(rng);
    }
  }
  return xs;
}

double max_diff(const NetGradients& a, const NetGradients& b) {
  double d = 0.0;
  for (std::size_t l = 0; l < a.layers().size(); ++l) {
    for (std::size_t i = 0; i < a.layers()[l].weights.size(); ++i)
      d = std::max(d, std::abs(a.layers()[l].weights[i] - b.layers()[l].weights[i]));
    for (std::size_t i = 0; i < a.layers()[l].biases.size(); ++i)
      d = std::max(d, std::abs(a.layers()[l].biases[i] - b.layers()[l].biases[i]));
  }
  return d;
}

class KernelAgreement : public ::testing::TestWithParam<Case> {};

TEST_P(KernelAgreement, ParallelMatchesSerial) {
  const Case c = GetParam();
  std::mt19937_64 rng(31);
  FeedforwardNet net(c.arch, 17);
  auto xs = make_inputs(c, rng);
  std::vector<double> dys(c.batch * c.arch.output_dim);
  std::normal_distribution<double> n01;
  for (auto& d : dys) d = n01(rng);

  auto tape = kernels::forward_batch(net, xs, c.batch);
  auto evals = kernels::serial::forward_batch(net, xs, c.batch);
  for (std::size_t b = 0; b < c.batch; ++b) {
    auto row = tape.output_row(b);
    for (std::size_t o = 0; o < c.arch.output_dim; ++o) {
      EXPECT_NEAR(row[o], evals[b].output[o], 1e-12 * std::max(1.0, std::abs(evals[b].output[o])));
    }
  }
  NetGradients par(net.arch()), ser(net.arch());
  kernels::backward_batch(net, tape, dys, par);
  kernels::serial::backward_batch(net, evals, dys, ser);
  EXPECT_LT(max_diff(par, ser), 1e-12 * std::max(1.0, ser.max_abs()));
}

INSTANTIATE_TEST_SUITE_P(Shapes, KernelAgreement,
                         ::testing::Values(Case{{4, {100, 100}, 4}, 128, false},
                                           Case{{50, {100, 100}, 4}, 128, true},
                                           Case{{6, {13, 7}, 6}, 37, false},
                                           Case{{3, {5}, 2}, 1, false},
                                           Case{{10, {100, 100}, 2}, 33, true}));

TEST(Kernels, BitwiseIdenticalAcrossThreadCounts) {
  const Case c{{8, {64, 64}, 4}, 128, false};
  std::mt19937_64 rng(3);
  FeedforwardNet net(c.arch, 5);
  auto xs = make_inputs(c, rng);
  std::vector<double> dys(c.batch * c.arch.output_dim, 0.25);
  const int saved = omp_get_max_threads();
  std::vector<NetGradients> results;
  std::vector<std::vector<double>> outputs;
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    auto tape = kernels::forward_batch(net, xs, c.batch);
    NetGradients g(net.arch());
    kernels::backward_batch(net, tape, dys, g);
    results.push_back(std::move(g));
    outputs.push_back(tape.output);
  }
  omp_set_num_threads(saved);
  for (std::size_t i = 1; i < results.size(); ++i) {
    EXPECT_EQ(outputs[i], outputs[0]);
    for (std::size_t l = 0; l < results[0].layers().size(); ++l) {
      EXPECT_EQ(results[i].layers()[l].weights, results[0].layers()[l].weights);
      EXPECT_EQ(results[i].layers()[l].biases, results[0].layers()[l].biases);
    }
  }
}

TEST(Kernels, AccumulatesIntoExisting) {
  NetArch arch{3, {4}, 2};
  FeedforwardNet net(arch, 2);
  std::vector<double> xs{0.1, 0.2, 0.3, -0.4, 0.5, 0.6};
  std::vector<double> dys{1.0, -1.0, 0.5, 0.5};
  auto tape = kernels::forward_batch(net, xs, 2);
  NetGradients once(arch), twice(arch);
  kernels::backward_batch(net, tape, dys, once);
  kernels::backward_batch(net, tape, dys, twice);
  kernels::backward_batch(net, tape, dys, twice);
  once.scale(2.0);
  EXPECT_LT(max_diff(once, twice), 1e-14);
}

TEST(Kernels, ContractChecks) {
  NetArch arch{3, {4}, 2};
  FeedforwardNet net(arch, 2);
  EXPECT_THROW(kernels::forward_batch(net, std::vector<double>(5, 0.0), 2), ContractViolation);
  auto tape = kernels::forward_batch(net, std::vector<double>(6, 0.1), 2);
  NetGradients g(arch);
  EXPECT_THROW(kernels::backward_batch(net, tape, std::vector<double>(3, 0.0), g), ContractViolation);
  sgd_step(net, g, 0.1);
  EXPECT_THROW(kernels::backward_batch(net, tape, std::vector<double>(4, 0.0), g), ContractViolation);
}

}  // namespace
}  // namespace avdqn

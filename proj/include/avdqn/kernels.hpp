#pragma once

// Minibatch forward/backward over a FeedforwardNet.
//
// The top-level functions are the OpenMP kernels used by training. The
// `serial` namespace keeps a plain per-sample reference built directly on
// forward()/accumulate_backward(); tests and the benchmark compare the two.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "avdqn/net.hpp"

namespace avdqn::kernels {

// Samples are rows of a row-major (batch x dim) matrix.
struct BatchTape {
  std::uint64_t net_id = 0;
  std::uint64_t net_version = 0;
  std::size_t batch = 0;
  std::vector<std::vector<double>> layer_inputs;  // per layer: batch x fan_in
  std::vector<double> output;                     // batch x output_dim
  std::size_t output_dim = 0;

  std::span<const double> output_row(std::size_t b) const { return {output.data() + b * output_dim, output_dim}; }
};

BatchTape forward_batch(const FeedforwardNet& net, std::span<const double> xs, std::size_t batch);

// Adds sum_b d(dy_b . y_b)/d(theta) into `into`. Reduction order is fixed
// (independent of the thread count), so results are reproducible.
void backward_batch(const FeedforwardNet& net, const BatchTape& tape, std::span<const double> dys,
                    NetGradients& into);

// Threads available to the kernels (omp_get_max_threads).
int max_threads();

namespace serial {

std::vector<Evaluation> forward_batch(const FeedforwardNet& net, std::span<const double> xs, std::size_t batch);
void backward_batch(const FeedforwardNet& net, const std::vector<Evaluation>& evals, std::span<const double> dys,
                    NetGradients& into);

}  // namespace serial

}  // namespace avdqn::kernels

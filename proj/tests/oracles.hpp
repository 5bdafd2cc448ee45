#pragma once

// Independent reference computations used by unit and acceptance tests.
// Nothing here calls into the code path it is used to check.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "avdqn/dist.hpp"
#include "avdqn/net.hpp"

namespace avdqn::oracle {

// Dense forward pass with Eigen matrices.
std::vector<double> eigen_forward(const FeedforwardNet& net, std::span<const double> x);

// Central differences of f over every parameter of `net` (restored afterwards).
NetGradients finite_difference(FeedforwardNet& net, const std::function<double(const FeedforwardNet&)>& f,
                               double step = 1e-5);

// Max over coordinates of |a - b| / max(1, |a|, |b|)... relative with a floor.
double max_relative_error(const NetGradients& a, const NetGradients& b, double floor = 1e-6);

// -integral q ln q by tanh-sinh quadrature.
double entropy_by_quadrature(double scale, Stage stage);

double gaussian_cdf(double z);
double cauchy_cdf(double z);
// sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Classic-control one-step maps written independently of the library.
std::array<double, 4> cartpole_step(const std::array<double, 4>& s, int action);
std::array<double, 4> acrobot_step(const std::array<double, 4>& s, int action);
std::array<double, 2> mountaincar_step(const std::array<double, 2>& s, int action);

// Finite-horizon optimal values on the chain by backward induction;
// returns the return of the greedy policy from the start state.
double chain_value_iteration_return(int n, std::vector<int>* greedy_actions = nullptr);

// Probability that a uniform-random walk on the chain (start s_2, N+9 steps)
// reaches position `target` at least once (start included).
double chain_random_reach_probability(int n, int target);

}  // namespace avdqn::oracle

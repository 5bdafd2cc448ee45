#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace avdqn {

// Layer sizes of a fully connected ReLU network:
// input -> hidden[0] -> ... -> hidden[l-1] -> linear output.
struct NetArch {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims{100, 100};
  std::size_t output_dim = 0;

  void validate() const;
  std::size_t layer_count() const { return hidden_dims.size() + 1; }
  std::size_t fan_in(std::size_t layer) const;
  std::size_t fan_out(std::size_t layer) const;

  bool operator==(const NetArch&) const = default;
};

// (I+1)H_1 + sum (H_i+1)H_{i+1} + (H_l+1)*output_dim
std::size_t count_params(const NetArch& arch);

struct Layer {
  std::size_t rows = 0;         // fan-out
  std::size_t cols = 0;         // fan-in
  std::vector<double> weights;  // rows x cols, row-major
  std::vector<double> biases;   // rows

  Layer() = default;
  Layer(std::size_t out, std::size_t in)
      : rows(out), cols(in), weights(out * in, 0.0), biases(out, 0.0) {}

  std::span<const double> row(std::size_t r) const { return {weights.data() + r * cols, cols}; }
  std::span<double> row(std::size_t r) { return {weights.data() + r * cols, cols}; }
};

// Gradient storage, shape-congruent with the layers of one FeedforwardNet.
class NetGradients {
 public:
  NetGradients() = default;
  explicit NetGradients(const NetArch& arch);

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  void zero();
  void scale(double factor);
  NetGradients& operator+=(const NetGradients& other);
  bool all_finite() const;
  double max_abs() const;
  double l2_norm() const;

 private:
  std::vector<Layer> layers_;
};

class FeedforwardNet {
 public:
  // Zero weights and biases.
  explicit FeedforwardNet(NetArch arch);
  // Weights uniform in +-1/sqrt(fan_in), biases likewise.
  FeedforwardNet(NetArch arch, std::uint64_t seed);

  FeedforwardNet(const FeedforwardNet& other);
  FeedforwardNet& operator=(const FeedforwardNet& other);
  FeedforwardNet(FeedforwardNet&&) noexcept = default;
  FeedforwardNet& operator=(FeedforwardNet&&) noexcept = default;

  const NetArch& arch() const { return arch_; }
  const std::vector<Layer>& layers() const { return layers_; }
  // Mutable access invalidates every tape recorded against this net.
  std::vector<Layer>& mutable_layers();

  std::size_t allocated_params() const;
  bool all_finite() const;

  // Identity of the parameter state a tape was recorded against.
  std::uint64_t id() const { return id_; }
  std::uint64_t version() const { return version_; }

  void randomize(std::uint64_t seed);

 private:
  void allocate();

  NetArch arch_;
  std::vector<Layer> layers_;
  std::uint64_t id_;
  std::uint64_t version_ = 0;
};

// Activation record of a single forward pass.
struct Tape {
  std::uint64_t net_id = 0;
  std::uint64_t net_version = 0;
  std::vector<std::vector<double>> layer_inputs;  // x, relu(h_1), ..., relu(h_l)
  std::vector<std::vector<double>> pre_activations;  // h_1, ..., h_l
};

struct Evaluation {
  std::vector<double> output;
  Tape tape;
};

Evaluation forward(const FeedforwardNet& net, std::span<const double> x);
// Forward without recording a tape.
std::vector<double> evaluate(const FeedforwardNet& net, std::span<const double> x);

// d(dy . y)/d(theta) for the pass recorded in `tape`.
NetGradients backward(const FeedforwardNet& net, const Tape& tape, std::span<const double> dy);
void accumulate_backward(const FeedforwardNet& net, const Tape& tape, std::span<const double> dy,
                         NetGradients& into);

// p <- p - lr * g for every parameter.
void sgd_step(FeedforwardNet& net, const NetGradients& grads, double lr);

// dst <- src (deep copy; arch must match).
void copy_params(const FeedforwardNet& src, FeedforwardNet& dst);

// Checkpoint layout (little-endian binary):
//   "AVDQNNET" magic, u32 format version (1), u64 layer count L,
//   u64 input_dim, L-1 x u64 hidden dims, u64 output_dim,
//   then for each layer in order: rows*cols f64 weights (row-major),
//   rows f64 biases.
void save_checkpoint(const FeedforwardNet& net, std::ostream& out);
FeedforwardNet load_checkpoint(std::istream& in);

}  // namespace avdqn

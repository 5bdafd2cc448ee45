#include "avdqn/net.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

#include "avdqn/errors.hpp"

namespace avdqn {

namespace {

std::uint64_t next_net_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

void check_tape(const FeedforwardNet& net, const Tape& tape) {
  require(tape.net_id == net.id() && tape.net_version == net.version(),
          "backward: tape was recorded against a different or since-mutated net");
  require(tape.layer_inputs.size() == net.layers().size(), "backward: malformed tape");
}

}  // namespace

void NetArch::validate() const {
  require(input_dim >= 1, "NetArch: input_dim must be >= 1");
  require(output_dim >= 1, "NetArch: output_dim must be >= 1");
  require(!hidden_dims.empty(), "NetArch: at least one hidden layer is required");
  for (auto h : hidden_dims) require(h >= 1, "NetArch: hidden sizes must be >= 1");
}

std::size_t NetArch::fan_in(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden_dims.at(layer - 1);
}

std::size_t NetArch::fan_out(std::size_t layer) const {
  return layer < hidden_dims.size() ? hidden_dims[layer] : output_dim;
}

std::size_t count_params(const NetArch& arch) {
  arch.validate();
  const auto& h = arch.hidden_dims;
  std::size_t total = (arch.input_dim + 1) * h.front();
  for (std::size_t i = 0; i + 1 < h.size(); ++i) total += (h[i] + 1) * h[i + 1];
  total += (h.back() + 1) * arch.output_dim;
  return total;
}

// ---------------------------------------------------------------------------

NetGradients::NetGradients(const NetArch& arch) {
  arch.validate();
  layers_.reserve(arch.layer_count());
  for (std::size_t l = 0; l < arch.layer_count(); ++l) layers_.emplace_back(arch.fan_out(l), arch.fan_in(l));
}

void NetGradients::zero() {
  for (auto& layer : layers_) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
  }
}

void NetGradients::scale(double factor) {
  for (auto& layer : layers_) {
    for (auto& w : layer.weights) w *= factor;
    for (auto& b : layer.biases) b *= factor;
  }
}

NetGradients& NetGradients::operator+=(const NetGradients& other) {
  require(other.layers_.size() == layers_.size(), "NetGradients: shape mismatch");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    auto& a = layers_[l];
    const auto& b = other.layers_[l];
    require(a.rows == b.rows && a.cols == b.cols, "NetGradients: shape mismatch");
    for (std::size_t i = 0; i < a.weights.size(); ++i) a.weights[i] += b.weights[i];
    for (std::size_t i = 0; i < a.biases.size(); ++i) a.biases[i] += b.biases[i];
  }
  return *this;
}

bool NetGradients::all_finite() const {
  for (const auto& layer : layers_) {
    for (double w : layer.weights)
      if (!std::isfinite(w)) return false;
    for (double b : layer.biases)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

double NetGradients::max_abs() const {
  double m = 0.0;
  for (const auto& layer : layers_) {
    for (double w : layer.weights) m = std::max(m, std::abs(w));
    for (double b : layer.biases) m = std::max(m, std::abs(b));
  }
  return m;
}

double NetGradients::l2_norm() const {
  double s = 0.0;
  for (const auto& layer : layers_) {
    for (double w : layer.weights) s += w * w;
    for (double b : layer.biases) s += b * b;
  }
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------

FeedforwardNet::FeedforwardNet(NetArch arch) : arch_(std::move(arch)), id_(next_net_id()) {
  allocate();
}

FeedforwardNet::FeedforwardNet(NetArch arch, std::uint64_t seed) : FeedforwardNet(std::move(arch)) {
  randomize(seed);
}

FeedforwardNet::FeedforwardNet(const FeedforwardNet& other)
    : arch_(other.arch_), layers_(other.layers_), id_(next_net_id()) {}

FeedforwardNet& FeedforwardNet::operator=(const FeedforwardNet& other) {
  if (this != &other) {
    arch_ = other.arch_;
    layers_ = other.layers_;
    ++version_;
  }
  return *this;
}

void FeedforwardNet::allocate() {
  arch_.validate();
  layers_.clear();
  layers_.reserve(arch_.layer_count());
  for (std::size_t l = 0; l < arch_.layer_count(); ++l) layers_.emplace_back(arch_.fan_out(l), arch_.fan_in(l));
}

std::vector<Layer>& FeedforwardNet::mutable_layers() {
  ++version_;
  return layers_;
}

std::size_t FeedforwardNet::allocated_params() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += layer.weights.size() + layer.biases.size();
  return n;
}

bool FeedforwardNet::all_finite() const {
  for (const auto& layer : layers_) {
    for (double w : layer.weights)
      if (!std::isfinite(w)) return false;
    for (double b : layer.biases)
      if (!std::isfinite(b)) return false;
  }
  return true;
}

void FeedforwardNet::randomize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& layer : mutable_layers()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : layer.weights) w = dist(rng);
    for (auto& b : layer.biases) b = dist(rng);
  }
}

// ---------------------------------------------------------------------------

Evaluation forward(const FeedforwardNet& net, std::span<const double> x) {
  const auto& layers = net.layers();
  require(x.size() == net.arch().input_dim, "forward: input has length " + std::to_string(x.size()) +
                                                ", net expects " + std::to_string(net.arch().input_dim));
  Evaluation ev;
  ev.tape.net_id = net.id();
  ev.tape.net_version = net.version();
  ev.tape.layer_inputs.reserve(layers.size());
  ev.tape.pre_activations.reserve(layers.size() - 1);
  ev.tape.layer_inputs.emplace_back(x.begin(), x.end());

  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& layer = layers[l];
    const std::vector<double>& in = ev.tape.layer_inputs.back();
    std::vector<double> z(layer.rows);
    for (std::size_t o = 0; o < layer.rows; ++o) {
      double acc = layer.biases[o];
      const auto w = layer.row(o);
      for (std::size_t i = 0; i < layer.cols; ++i) acc += w[i] * in[i];
      z[o] = acc;
    }
    if (l + 1 == layers.size()) {
      ev.output = std::move(z);
    } else {
      std::vector<double> a(z.size());
      for (std::size_t o = 0; o < z.size(); ++o) a[o] = z[o] > 0.0 ? z[o] : 0.0;
      ev.tape.pre_activations.push_back(std::move(z));
      ev.tape.layer_inputs.push_back(std::move(a));
    }
  }
  return ev;
}

std::vector<double> evaluate(const FeedforwardNet& net, std::span<const double> x) {
  return forward(net, x).output;
}

void accumulate_backward(const FeedforwardNet& net, const Tape& tape, std::span<const double> dy,
                         NetGradients& into) {
  check_tape(net, tape);
  const auto& layers = net.layers();
  require(dy.size() == net.arch().output_dim, "backward: dy has wrong length");
  require(into.layers().size() == layers.size(), "backward: gradient shape mismatch");

  std::vector<double> delta(dy.begin(), dy.end());
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Layer& layer = layers[l];
    Layer& g = into.layers()[l];
    require(g.rows == layer.rows && g.cols == layer.cols, "backward: gradient shape mismatch");
    const std::vector<double>& in = tape.layer_inputs[l];
    for (std::size_t o = 0; o < layer.rows; ++o) {
      g.biases[o] += delta[o];
      auto grow = g.row(o);
      for (std::size_t i = 0; i < layer.cols; ++i) grow[i] += delta[o] * in[i];
    }
    if (l == 0) break;
    // Through W^T, then the ReLU of the layer below (derivative 0 at 0).
    const std::vector<double>& pre = tape.pre_activations[l - 1];
    std::vector<double> next(layer.cols, 0.0);
    for (std::size_t i = 0; i < layer.cols; ++i) {
      if (pre[i] <= 0.0) continue;
      double acc = 0.0;
      for (std::size_t o = 0; o < layer.rows; ++o) acc += layer.weights[o * layer.cols + i] * delta[o];
      next[i] = acc;
    }
    delta = std::move(next);
  }
}

NetGradients backward(const FeedforwardNet& net, const Tape& tape, std::span<const double> dy) {
  NetGradients grads(net.arch());
  accumulate_backward(net, tape, dy, grads);
  return grads;
}

void sgd_step(FeedforwardNet& net, const NetGradients& grads, double lr) {
  require(lr > 0.0 && std::isfinite(lr), "sgd_step: learning rate must be positive");
  require(grads.layers().size() == net.layers().size(), "sgd_step: shape mismatch");
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const Layer& g = grads.layers()[l];
    require(g.rows == net.layers()[l].rows && g.cols == net.layers()[l].cols, "sgd_step: shape mismatch");
  }
  auto& layers = net.mutable_layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Layer& layer = layers[l];
    const Layer& g = grads.layers()[l];
    for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= lr * g.weights[i];
    for (std::size_t i = 0; i < layer.biases.size(); ++i) layer.biases[i] -= lr * g.biases[i];
  }
}

void copy_params(const FeedforwardNet& src, FeedforwardNet& dst) {
  if (&src == &dst) return;
  require(src.arch() == dst.arch(), "copy_params: architectures differ");
  auto& out = dst.mutable_layers();
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l].weights = src.layers()[l].weights;
    out[l].biases = src.layers()[l].biases;
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'V', 'D', 'Q', 'N', 'N', 'E', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated input");
  return value;
}

}  // namespace

void save_checkpoint(const FeedforwardNet& net, std::ostream& out) {
  const auto& arch = net.arch();
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kFormatVersion);
  write_pod<std::uint64_t>(out, arch.layer_count());
  write_pod<std::uint64_t>(out, arch.input_dim);
  for (auto h : arch.hidden_dims) write_pod<std::uint64_t>(out, h);
  write_pod<std::uint64_t>(out, arch.output_dim);
  for (const auto& layer : net.layers()) {
    out.write(reinterpret_cast<const char*>(layer.weights.data()),
              static_cast<std::streamsize>(layer.weights.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(layer.biases.data()),
              static_cast<std::streamsize>(layer.biases.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("checkpoint: write failed");
}

FeedforwardNet load_checkpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("checkpoint: bad magic");
  if (read_pod<std::uint32_t>(in) != kFormatVersion) throw std::runtime_error("checkpoint: unsupported version");
  const auto layer_count = read_pod<std::uint64_t>(in);
  if (layer_count < 2 || layer_count > 64) throw std::runtime_error("checkpoint: bad layer count");
  NetArch arch;
  arch.input_dim = read_pod<std::uint64_t>(in);
  arch.hidden_dims.clear();
  for (std::uint64_t i = 0; i + 1 < layer_count; ++i) arch.hidden_dims.push_back(read_pod<std::uint64_t>(in));
  arch.output_dim = read_pod<std::uint64_t>(in);
  FeedforwardNet net(arch);
  for (auto& layer : net.mutable_layers()) {
    in.read(reinterpret_cast<char*>(layer.weights.data()),
            static_cast<std::streamsize>(layer.weights.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(layer.biases.data()),
            static_cast<std::streamsize>(layer.biases.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint: truncated parameters");
  }
  return net;
}

}  // namespace avdqn

#include "avdqn/kernels.hpp"

#include <algorithm>

#include <omp.h>

#include "avdqn/errors.hpp"

namespace avdqn::kernels {

namespace {

// Fixed reduction granularity for the gradient sum.
constexpr std::size_t kChunk = 16;
// Inputs with at most this share of nonzeros take the gather path.
constexpr std::size_t kSparseDivisor = 4;

inline double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void nonzeros(const double* x, std::size_t n, std::vector<std::size_t>& out) {
  out.clear();
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] != 0.0) out.push_back(i);
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

BatchTape forward_batch(const FeedforwardNet& net, std::span<const double> xs, std::size_t batch) {
  const auto& arch = net.arch();
  const auto& layers = net.layers();
  require(batch >= 1, "forward_batch: empty batch");
  require(xs.size() == batch * arch.input_dim, "forward_batch: input size does not match batch x input_dim");

  BatchTape tape;
  tape.net_id = net.id();
  tape.net_version = net.version();
  tape.batch = batch;
  tape.output_dim = arch.output_dim;
  tape.layer_inputs.resize(layers.size());
  tape.layer_inputs[0].assign(xs.begin(), xs.end());
  for (std::size_t l = 1; l < layers.size(); ++l) tape.layer_inputs[l].resize(batch * layers[l].cols);
  tape.output.resize(batch * arch.output_dim);

  const auto n = static_cast<std::ptrdiff_t>(batch);
#pragma omp parallel
  {
    std::vector<std::size_t> nz;
#pragma omp for schedule(static)
    for (std::ptrdiff_t sb = 0; sb < n; ++sb) {
      const auto b = static_cast<std::size_t>(sb);
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        const double* in = tape.layer_inputs[l].data() + b * layer.cols;
        const bool last = l + 1 == layers.size();
        double* out = last ? tape.output.data() + b * layer.rows : tape.layer_inputs[l + 1].data() + b * layer.rows;

        bool sparse = false;
        if (l == 0) {
          nonzeros(in, layer.cols, nz);
          sparse = nz.size() * kSparseDivisor <= layer.cols;
        }
        for (std::size_t o = 0; o < layer.rows; ++o) {
          const double* w = layer.weights.data() + o * layer.cols;
          double z = layer.biases[o];
          if (sparse) {
            for (auto j : nz) z += w[j] * in[j];
          } else {
            z += dot(w, in, layer.cols);
          }
          out[o] = last ? z : (z > 0.0 ? z : 0.0);
        }
      }
    }
  }
  return tape;
}

void backward_batch(const FeedforwardNet& net, const BatchTape& tape, std::span<const double> dys,
                    NetGradients& into) {
  const auto& layers = net.layers();
  require(tape.net_id == net.id() && tape.net_version == net.version(),
          "backward_batch: tape was recorded against a different or since-mutated net");
  require(dys.size() == tape.batch * net.arch().output_dim, "backward_batch: dy size does not match batch");
  require(into.layers().size() == layers.size(), "backward_batch: gradient shape mismatch");

  const std::size_t chunks = (tape.batch + kChunk - 1) / kChunk;
  std::vector<NetGradients> partial(chunks, NetGradients(net.arch()));

#pragma omp parallel
  {
    std::vector<double> delta, next;
    std::vector<std::vector<std::size_t>> nz(kChunk);
#pragma omp for schedule(static)
    for (std::ptrdiff_t sc = 0; sc < static_cast<std::ptrdiff_t>(chunks); ++sc) {
      const auto c = static_cast<std::size_t>(sc);
      const std::size_t b0 = c * kChunk;
      const std::size_t b1 = std::min(tape.batch, b0 + kChunk);
      const std::size_t m = b1 - b0;
      NetGradients& g = partial[c];

      std::size_t width = net.arch().output_dim;
      delta.assign(dys.begin() + static_cast<std::ptrdiff_t>(b0 * width),
                   dys.begin() + static_cast<std::ptrdiff_t>(b1 * width));

      for (std::size_t l = layers.size(); l-- > 0;) {
        const Layer& layer = layers[l];
        Layer& gl = g.layers()[l];
        const double* x = tape.layer_inputs[l].data() + b0 * layer.cols;

        if (l == 0) {
          for (std::size_t k = 0; k < m; ++k) nonzeros(x + k * layer.cols, layer.cols, nz[k]);
        }
        for (std::size_t o = 0; o < layer.rows; ++o) {
          double* grow = gl.weights.data() + o * layer.cols;
          double bsum = 0.0;
          for (std::size_t k = 0; k < m; ++k) {
            const double d = delta[k * layer.rows + o];
            if (d == 0.0) continue;
            bsum += d;
            const double* xk = x + k * layer.cols;
            if (l == 0) {
              for (auto j : nz[k]) grow[j] += d * xk[j];
            } else {
              axpy(d, xk, grow, layer.cols);
            }
          }
          gl.biases[o] += bsum;
        }
        if (l == 0) break;

        next.assign(m * layer.cols, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
          double* nk = next.data() + k * layer.cols;
          for (std::size_t o = 0; o < layer.rows; ++o) {
            const double d = delta[k * layer.rows + o];
            if (d != 0.0) axpy(d, layer.weights.data() + o * layer.cols, nk, layer.cols);
          }
          const double* act = x + k * layer.cols;
          for (std::size_t i = 0; i < layer.cols; ++i)
            if (act[i] <= 0.0) nk[i] = 0.0;
        }
        delta.swap(next);
        width = layer.cols;
      }
    }
  }
  for (const auto& p : partial) into += p;
}

namespace serial {

std::vector<Evaluation> forward_batch(const FeedforwardNet& net, std::span<const double> xs, std::size_t batch) {
  const std::size_t dim = net.arch().input_dim;
  require(xs.size() == batch * dim, "serial::forward_batch: input size does not match batch x input_dim");
  std::vector<Evaluation> out;
  out.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) out.push_back(forward(net, xs.subspan(b * dim, dim)));
  return out;
}

void backward_batch(const FeedforwardNet& net, const std::vector<Evaluation>& evals, std::span<const double> dys,
                    NetGradients& into) {
  const std::size_t width = net.arch().output_dim;
  require(dys.size() == evals.size() * width, "serial::backward_batch: dy size does not match batch");
  for (std::size_t b = 0; b < evals.size(); ++b) accumulate_backward(net, evals[b].tape, dys.subspan(b * width, width), into);
}

}  // namespace serial

}  // namespace avdqn::kernels

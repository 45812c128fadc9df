#ifndef FUZZYLOSS_NETWORK_HPP
#define FUZZYLOSS_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzyloss/rng.hpp"

namespace fuzzyloss {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major array of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s, double fill = 0.0)
      : shape(std::move(s)),
        data(std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>()), fill) {}

  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }
  std::size_t size() const { return data.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols() + j]; }

  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols(), cols()}; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// One-hidden-layer classifier: inputs -> ReLU(x W1 + b1) -> softmax(h W2 + b2).
/// Gradients share this type.
struct Network {
  Tensor w1;  // [inputs x hidden]
  Tensor b1;  // [hidden]
  Tensor w2;  // [hidden x outputs]
  Tensor b2;  // [outputs]

  Network() : Network(784, 50, 10) {}
  Network(std::size_t inputs, std::size_t hidden, std::size_t outputs)
      : w1({inputs, hidden}), b1({hidden}), w2({hidden, outputs}), b2({outputs}) {}

  std::size_t inputs() const { return w1.shape[0]; }
  std::size_t hidden() const { return w1.shape[1]; }
  std::size_t outputs() const { return w2.shape[1]; }

  /// Parameter tensors in a fixed order.
  std::vector<Tensor*> parameters() { return {&w1, &b1, &w2, &b2}; }
  std::vector<const Tensor*> parameters() const { return {&w1, &b1, &w2, &b2}; }

  friend bool operator==(const Network&, const Network&) = default;
};

struct OptimState {
  double learning_rate = 0.01;
  std::size_t step = 0;
};

/// Intermediate values of a forward pass, kept for backpropagation.
struct ForwardCache {
  Tensor hidden;  // post-ReLU [B x hidden]
  Tensor probs;   // softmax [B x outputs]
};

/// Glorot-uniform weights, U(-a, a) with a = sqrt(6 / (fan_in + fan_out)),
/// drawn from XorShift64Star(seed): all of w1 row-major, then all of w2.
/// Biases are zero.
inline Network init_network(std::uint64_t seed, std::size_t inputs = 784, std::size_t hidden = 50,
                            std::size_t outputs = 10) {
  Network net(inputs, hidden, outputs);
  XorShift64Star rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
  for (double& w : net.w1.data) w = rng.uniform(-a1, a1);
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + outputs));
  for (double& w : net.w2.data) w = rng.uniform(-a2, a2);
  return net;
}

inline ForwardCache forward_cached(const Network& net, const Tensor& batch) {
  if (batch.shape.size() != 2 || batch.cols() != net.inputs()) {
    throw ShapeError("forward: batch must be [B x " + std::to_string(net.inputs()) + "]");
  }
  const std::size_t n = batch.rows();
  const std::size_t hid = net.hidden();
  const std::size_t out = net.outputs();
  ForwardCache c{Tensor({n, hid}), Tensor({n, out})};
  for (std::size_t b = 0; b < n; ++b) {
    double* h = &c.hidden.data[b * hid];
    std::copy(net.b1.data.begin(), net.b1.data.end(), h);
    for (std::size_t k = 0; k < net.inputs(); ++k) {
      const double x = batch(b, k);
      if (x == 0.0) continue;
      const double* w = &net.w1.data[k * hid];
      for (std::size_t j = 0; j < hid; ++j) h[j] += x * w[j];
    }
    for (std::size_t j = 0; j < hid; ++j) h[j] = std::max(0.0, h[j]);

    double* z = &c.probs.data[b * out];
    std::copy(net.b2.data.begin(), net.b2.data.end(), z);
    for (std::size_t j = 0; j < hid; ++j) {
      if (h[j] == 0.0) continue;
      const double* w = &net.w2.data[j * out];
      for (std::size_t o = 0; o < out; ++o) z[o] += h[j] * w[o];
    }
    const double peak = *std::max_element(z, z + out);
    double total = 0.0;
    for (std::size_t o = 0; o < out; ++o) {
      z[o] = std::exp(z[o] - peak);
      total += z[o];
    }
    for (std::size_t o = 0; o < out; ++o) z[o] /= total;
  }
  return c;
}

/// Softmax class probabilities, one row per pattern.
inline Tensor forward(const Network& net, const Tensor& batch) {
  return forward_cached(net, batch).probs;
}

/// Parameter gradients given d(loss)/d(probs).
inline Network backward_from_probs(const Network& net, const Tensor& batch,
                                   const ForwardCache& cache, const Tensor& dprobs) {
  const std::size_t n = batch.rows();
  const std::size_t hid = net.hidden();
  const std::size_t out = net.outputs();
  Network grads(net.inputs(), hid, out);
  std::vector<double> dz(out);
  std::vector<double> dh(hid);
  for (std::size_t b = 0; b < n; ++b) {
    const double* p = &cache.probs.data[b * out];
    const double* dp = &dprobs.data[b * out];
    // softmax Jacobian-vector product: dz = p * (dp - <p, dp>)
    double inner = 0.0;
    for (std::size_t o = 0; o < out; ++o) inner += p[o] * dp[o];
    for (std::size_t o = 0; o < out; ++o) dz[o] = p[o] * (dp[o] - inner);

    const double* h = &cache.hidden.data[b * hid];
    for (std::size_t o = 0; o < out; ++o) grads.b2.data[o] += dz[o];
    for (std::size_t j = 0; j < hid; ++j) {
      double acc = 0.0;
      const double* w = &net.w2.data[j * out];
      double* gw = &grads.w2.data[j * out];
      for (std::size_t o = 0; o < out; ++o) {
        gw[o] += h[j] * dz[o];
        acc += w[o] * dz[o];
      }
      dh[j] = h[j] > 0.0 ? acc : 0.0;
    }
    for (std::size_t j = 0; j < hid; ++j) grads.b1.data[j] += dh[j];
    for (std::size_t k = 0; k < net.inputs(); ++k) {
      const double x = batch(b, k);
      if (x == 0.0) continue;
      double* gw = &grads.w1.data[k * hid];
      for (std::size_t j = 0; j < hid; ++j) gw[j] += x * dh[j];
    }
  }
  return grads;
}

/// theta <- theta - lr * grad for every parameter.
inline Network sgd_step(Network net, const Network& grads, OptimState& opt) {
  auto params = net.parameters();
  auto gs = grads.parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (params[t]->shape != gs[t]->shape) throw ShapeError("sgd_step: gradient shape mismatch");
    auto& p = params[t]->data;
    const auto& g = gs[t]->data;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= opt.learning_rate * g[i];
  }
  ++opt.step;
  return net;
}

}  // namespace fuzzyloss

#endif  // FUZZYLOSS_NETWORK_HPP

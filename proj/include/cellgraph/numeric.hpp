#pragma once

// Dense row-major matrices, MLP forward/backward with cached activations,
// the Adam update, and a central-difference gradient checker.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "cellgraph/error.hpp"

namespace cellgraph::numeric {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rs) {
    DenseMatrix m(rs.size(), rs.empty() ? 0 : rs.front().size());
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (rs[i].size() != m.cols) throw Error(ErrorCode::DimensionMismatch, "ragged rows");
      std::copy(rs[i].begin(), rs[i].end(), m.row(i).begin());
    }
    return m;
  }

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {values.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

  void set_zero() { std::fill(values.begin(), values.end(), 0.0); }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  // four accumulators; fixed summation order keeps results reproducible
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

/// out = X * W, with X (n x in) and W (in x out). `out` is overwritten.
inline void matmul(const DenseMatrix& x, const DenseMatrix& w, DenseMatrix& out) {
  if (x.cols != w.rows) throw Error(ErrorCode::DimensionMismatch, "matmul inner dimensions differ");
  out.rows = x.rows;
  out.cols = w.cols;
  out.values.assign(x.rows * w.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto yi = out.row(i);
    const auto xi = x.row(i);
    for (std::size_t k = 0; k < x.cols; ++k)
      if (xi[k] != 0.0) axpy(xi[k], w.row(k), yi);
  }
}

/// dx = dY * W^T, with dY (n x out) and W (in x out).
inline void matmul_transposed(const DenseMatrix& dy, const DenseMatrix& w, DenseMatrix& dx) {
  if (dy.cols != w.cols) throw Error(ErrorCode::DimensionMismatch, "matmul_transposed dimensions differ");
  dx.rows = dy.rows;
  dx.cols = w.rows;
  dx.values.assign(dy.rows * w.rows, 0.0);
  for (std::size_t i = 0; i < dy.rows; ++i) {
    const auto gi = dy.row(i);
    auto xi = dx.row(i);
    for (std::size_t k = 0; k < w.rows; ++k) xi[k] = dot(gi, w.row(k));
  }
}

/// dW += X^T * dY, with X (n x in) and dY (n x out).
inline void accumulate_outer(const DenseMatrix& x, const DenseMatrix& dy, DenseMatrix& dw) {
  if (x.rows != dy.rows || dw.rows != x.cols || dw.cols != dy.cols)
    throw Error(ErrorCode::DimensionMismatch, "accumulate_outer dimensions differ");
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    const auto gi = dy.row(i);
    for (std::size_t k = 0; k < x.cols; ++k)
      if (xi[k] != 0.0) axpy(xi[k], gi, dw.row(k));
  }
}

// ---------------------------------------------------------------------------
// MLP

enum class Activation { ReLU, Identity };

/// Affine layer y = x * weight + bias, weight stored (in x out).
struct Layer {
  DenseMatrix weight;
  std::vector<double> bias;
  Activation activation = Activation::ReLU;

  std::size_t in_dim() const { return weight.rows; }
  std::size_t out_dim() const { return weight.cols; }

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct MlpParams {
  std::vector<Layer> layers;

  std::size_t in_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weight.values.size() + l.bias.size();
    return n;
  }

  /// Visits every scalar parameter in a fixed order (weights, then bias, per layer).
  template <typename F>
  void for_each_param(F&& f) {
    for (auto& l : layers) {
      for (auto& w : l.weight.values) f(w);
      for (auto& b : l.bias) f(b);
    }
  }
  template <typename F>
  void for_each_param(F&& f) const {
    for (const auto& l : layers) {
      for (const auto& w : l.weight.values) f(w);
      for (const auto& b : l.bias) f(b);
    }
  }

  /// Zero-valued parameters with the same shapes.
  MlpParams zeros_like() const {
    MlpParams z;
    for (const auto& l : layers)
      z.layers.push_back(Layer{DenseMatrix(l.weight.rows, l.weight.cols), std::vector<double>(l.bias.size()),
                               l.activation});
    return z;
  }

  void add(const MlpParams& other) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      auto& a = layers[i];
      const auto& b = other.layers[i];
      for (std::size_t j = 0; j < a.weight.values.size(); ++j) a.weight.values[j] += b.weight.values[j];
      for (std::size_t j = 0; j < a.bias.size(); ++j) a.bias[j] += b.bias[j];
    }
  }

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Builds an MLP with the given layer widths. Hidden layers use ReLU; the last
/// layer uses `last_activation`. Weights ~ U(+-sqrt(6/(fan_in+fan_out))), biases 0.
template <typename Rng>
MlpParams make_mlp(std::size_t in_dim, std::span<const std::size_t> widths, Activation last_activation, Rng& rng) {
  MlpParams p;
  std::size_t fan_in = in_dim;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const std::size_t fan_out = widths[i];
    Layer l{DenseMatrix(fan_in, fan_out), std::vector<double>(fan_out, 0.0),
            i + 1 == widths.size() ? last_activation : Activation::ReLU};
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : l.weight.values) w = dist(rng);
    p.layers.push_back(std::move(l));
    fan_in = fan_out;
  }
  return p;
}

/// Cached per-layer inputs and outputs of a forward pass.
struct MlpTape {
  std::vector<DenseMatrix> inputs;   ///< input of layer i
  std::vector<DenseMatrix> outputs;  ///< post-activation output of layer i
};

/// Forward pass over a batch (one sample per row).
inline DenseMatrix mlp_forward(const MlpParams& p, const DenseMatrix& x, MlpTape* tape = nullptr) {
  if (p.layers.empty()) return x;
  if (x.cols != p.in_dim()) throw Error(ErrorCode::DimensionMismatch, "MLP input width mismatch");
  if (tape) {
    tape->inputs.clear();
    tape->outputs.clear();
  }
  DenseMatrix cur = x;
  for (std::size_t li = 0; li < p.layers.size(); ++li) {
    const Layer& l = p.layers[li];
    if (cur.cols != l.in_dim()) throw Error(ErrorCode::DimensionMismatch, "MLP layers do not chain");
    DenseMatrix out;
    matmul(cur, l.weight, out);
    for (std::size_t i = 0; i < out.rows; ++i) {
      auto r = out.row(i);
      for (std::size_t j = 0; j < out.cols; ++j) {
        const double v = r[j] + l.bias[j];
        r[j] = (l.activation == Activation::ReLU && v < 0.0) ? 0.0 : v;
      }
    }
    if (tape) {
      tape->inputs.push_back(std::move(cur));
      tape->outputs.push_back(out);
    }
    cur = std::move(out);
  }
  return cur;
}

inline std::vector<double> mlp_forward(const MlpParams& p, std::span<const double> x, MlpTape* tape = nullptr) {
  DenseMatrix m(1, x.size());
  std::copy(x.begin(), x.end(), m.values.begin());
  return mlp_forward(p, m, tape).values;
}

/// Reverse pass. Accumulates parameter gradients into `grads` (same shapes as
/// `p`) and returns d(loss)/d(input).
inline DenseMatrix mlp_backward(const MlpParams& p, const MlpTape& tape, DenseMatrix dy, MlpParams& grads) {
  if (p.layers.empty()) return dy;
  if (tape.inputs.size() != p.layers.size()) throw Error(ErrorCode::DimensionMismatch, "tape does not match MLP");
  if (dy.cols != p.out_dim() || dy.rows != tape.outputs.back().rows)
    throw Error(ErrorCode::DimensionMismatch, "output gradient shape mismatch");
  for (std::size_t li = p.layers.size(); li-- > 0;) {
    const Layer& l = p.layers[li];
    Layer& g = grads.layers[li];
    const DenseMatrix& out = tape.outputs[li];
    if (l.activation == Activation::ReLU)
      for (std::size_t j = 0; j < dy.values.size(); ++j)
        if (out.values[j] <= 0.0) dy.values[j] = 0.0;
    for (std::size_t i = 0; i < dy.rows; ++i) axpy(1.0, dy.row(i), g.bias);
    accumulate_outer(tape.inputs[li], dy, g.weight);
    DenseMatrix dx;
    matmul_transposed(dy, l.weight, dx);
    dy = std::move(dx);
  }
  return dy;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

inline void adam_update(std::span<double> params, std::span<const double> grads, AdamState& state,
                        const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw Error(ErrorCode::DimensionMismatch, "Adam parameter/gradient size");
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
  }
}

// ---------------------------------------------------------------------------
// Gradient checking

/// |analytic - numeric| / max(|analytic|, |numeric|, abs_floor). The floor
/// keeps derivatives that are zero up to rounding from dividing by ~0.
inline double relative_error(double analytic, double numeric, double abs_floor = 1e-10) {
  const double diff = std::abs(analytic - numeric);
  const double scale = std::max({std::abs(analytic), std::abs(numeric), abs_floor});
  return diff / scale;
}

/// Compares `analytic` against central differences of `f` at `params` and
/// returns the worst relative error. `params` is restored before returning.
inline double grad_check(const std::function<double(std::span<const double>)>& f, std::span<double> params,
                         std::span<const double> analytic, double eps = 1e-5, double abs_floor = 1e-10) {
  if (params.size() != analytic.size()) throw Error(ErrorCode::DimensionMismatch, "grad_check sizes");
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + eps;
    const double fp = f(params);
    params[i] = saved - eps;
    const double fm = f(params);
    params[i] = saved;
    const double numeric = (fp - fm) / (2.0 * eps);
    worst = std::max(worst, relative_error(analytic[i], numeric, abs_floor));
  }
  return worst;
}

}  // namespace cellgraph::numeric

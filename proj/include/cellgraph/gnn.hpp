#pragma once

// Edge-featured message-passing network over a PlanningSubgraph.
//
//   h0_v        = encoder(x_v)
//   m_e         = message(concat[h_src, h_dst, edge_features(e)])     (per edge)
//   h{t}_v      = update(concat[h{t-1}_v, c * sum_{e: dst(e)=v} m_e]) (t = 1..T, c constant)
//   prediction  = readout(hT_target)
//
// Message weights are shared across iterations. The message MLP's last layer
// is linear, so it is applied once per node after summation; its first layer
// is evaluated as three row blocks (source, destination, edge) of the weight
// matrix instead of materializing the concatenated per-edge input.

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cellgraph/data_model.hpp"
#include "cellgraph/error.hpp"
#include "cellgraph/graph_build.hpp"
#include "cellgraph/numeric.hpp"

namespace cellgraph::gnn {

using numeric::Activation;
using numeric::DenseMatrix;
using numeric::MlpParams;

inline constexpr std::size_t kEdgeFeatureDim = 5;

struct GnnHyperparams {
  std::size_t hidden_dim = 32;
  int iterations = 2;  ///< message-passing rounds T
  // hidden widths of each MLP; the output width is implied
  // (hidden_dim for encoder/message/update, 1 for readout)
  std::vector<std::size_t> encoder_hidden{32};
  std::vector<std::size_t> message_hidden{32};
  std::vector<std::size_t> update_hidden{32};
  std::vector<std::size_t> readout_hidden{32};
  double distance_scale_m = 500.0;
  double aggregation_scale = 0.02;  ///< constant multiplier on each node's summed messages
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  int max_epochs = 20;
  int early_stop_patience = 5;

  void validate() const {
    if (iterations < 1) throw Error(ErrorCode::InvalidConfig, "T must be >= 1", "iterations");
    if (hidden_dim < 1) throw Error(ErrorCode::InvalidConfig, "hidden_dim must be >= 1", "hidden_dim");
    if (message_hidden.empty())
      throw Error(ErrorCode::InvalidConfig, "message MLP needs at least one hidden layer", "message_hidden");
    if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1", "batch_size");
    if (!(distance_scale_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "distance_scale must be > 0", "distance_scale_m");
    if (!(aggregation_scale > 0.0))
      throw Error(ErrorCode::InvalidConfig, "aggregation_scale must be > 0", "aggregation_scale");
    if (!(learning_rate >= 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be >= 0", "learning_rate");
  }
};

struct GnnParameters {
  MlpParams encoder;  ///< node features -> hidden
  MlpParams message;  ///< concat[h_src, h_dst, edge] -> hidden
  MlpParams update;   ///< concat[h_dst, aggregated message] -> hidden
  MlpParams readout;  ///< hidden -> scalar

  std::size_t hidden_dim() const { return encoder.out_dim(); }
  std::size_t node_dim() const { return encoder.in_dim(); }

  template <typename F>
  void for_each_param(F&& f) {
    encoder.for_each_param(f);
    message.for_each_param(f);
    update.for_each_param(f);
    readout.for_each_param(f);
  }
  template <typename F>
  void for_each_param(F&& f) const {
    encoder.for_each_param(f);
    message.for_each_param(f);
    update.for_each_param(f);
    readout.for_each_param(f);
  }

  std::size_t param_count() const {
    return encoder.param_count() + message.param_count() + update.param_count() + readout.param_count();
  }

  std::vector<double> flatten() const {
    std::vector<double> out;
    out.reserve(param_count());
    for_each_param([&](double v) { out.push_back(v); });
    return out;
  }

  void assign(std::span<const double> flat) {
    if (flat.size() != param_count()) throw Error(ErrorCode::DimensionMismatch, "flat parameter size");
    std::size_t i = 0;
    for_each_param([&](double& v) { v = flat[i++]; });
  }

  GnnParameters zeros_like() const {
    return GnnParameters{encoder.zeros_like(), message.zeros_like(), update.zeros_like(), readout.zeros_like()};
  }

  friend bool operator==(const GnnParameters&, const GnnParameters&) = default;
};

inline GnnParameters init_params(const GnnHyperparams& hp, std::size_t node_feature_dim, std::uint64_t seed) {
  hp.validate();
  std::mt19937_64 rng(seed);
  const std::size_t h = hp.hidden_dim;
  auto widths = [](std::vector<std::size_t> hidden, std::size_t out) {
    hidden.push_back(out);
    return hidden;
  };
  GnnParameters p;
  const auto we = widths(hp.encoder_hidden, h);
  const auto wm = widths(hp.message_hidden, h);
  const auto wu = widths(hp.update_hidden, h);
  const auto wr = widths(hp.readout_hidden, 1);
  p.encoder = numeric::make_mlp(node_feature_dim, we, Activation::Identity, rng);
  p.message = numeric::make_mlp(2 * h + kEdgeFeatureDim, wm, Activation::Identity, rng);
  p.update = numeric::make_mlp(2 * h, wu, Activation::Identity, rng);
  p.readout = numeric::make_mlp(h, wr, Activation::Identity, rng);
  return p;
}

inline std::array<double, kEdgeFeatureDim> edge_features(const geometry::EdgeGeometry& g, double distance_scale) {
  return {g.d / distance_scale, g.alpha / 180.0, g.theta / 180.0, g.rho / 180.0, g.angles_valid ? 1.0 : 0.0};
}

inline void check_shapes(const GnnParameters& p) {
  const std::size_t h = p.hidden_dim();
  if (p.message.layers.size() < 2 || p.message.in_dim() != 2 * h + kEdgeFeatureDim || p.message.out_dim() != h ||
      p.message.layers.back().activation != Activation::Identity)
    throw Error(ErrorCode::DimensionMismatch, "message MLP shape");
  if (p.update.in_dim() != 2 * h || p.update.out_dim() != h) throw Error(ErrorCode::DimensionMismatch, "update MLP shape");
  if (p.readout.in_dim() != h || p.readout.out_dim() != 1) throw Error(ErrorCode::DimensionMismatch, "readout MLP shape");
}

namespace detail {

/// Per-iteration cache for the backward pass.
struct IterationTape {
  std::vector<std::uint32_t> active_edges;  ///< indices into g.edges
  std::vector<std::uint32_t> dst_rows;       ///< node ids updated this round
  std::vector<long> row_of_node;             ///< node id -> row in the per-round matrices, or -1
  DenseMatrix pre;                           ///< first message layer pre-activation, per active edge
  numeric::MlpTape middle;                   ///< message layers between first and last, per edge
  DenseMatrix summed;                        ///< per dst row: sum of penultimate message activations
  std::vector<double> degree;                ///< per dst row
  numeric::MlpTape update;
};

struct ForwardTape {
  numeric::MlpTape encoder;
  DenseMatrix edge_feats;                      ///< E x 5
  DenseMatrix edge_proj;                       ///< E x m1, edge block of the first message layer
  std::vector<DenseMatrix> hidden;             ///< hidden[t]: node states entering round t+1 (rows = all nodes
                                               ///< for t < T; hidden[T] holds only the target row)
  std::vector<IterationTape> rounds;
  numeric::MlpTape readout;
  double aggregation_scale = 1.0;
};

/// out = x * w[row_offset : row_offset + x.cols, :]
inline void matmul_block(const DenseMatrix& x, const DenseMatrix& w, std::size_t row_offset, DenseMatrix& out) {
  out.rows = x.rows;
  out.cols = w.cols;
  out.values.assign(x.rows * w.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto yi = out.row(i);
    const auto xi = x.row(i);
    for (std::size_t k = 0; k < x.cols; ++k)
      if (xi[k] != 0.0) numeric::axpy(xi[k], w.row(row_offset + k), yi);
  }
}

}  // namespace detail

/// Forward pass; fills `tape` when non-null.
inline double forward_impl(const GnnParameters& p, const graph::PlanningSubgraph& g, const GnnHyperparams& hp,
                           detail::ForwardTape* tape) {
  const int iterations = hp.iterations;
  check_shapes(p);
  const std::size_t n = g.node_count();
  const std::size_t h = p.hidden_dim();
  if (n == 0) throw Error(ErrorCode::DimensionMismatch, "empty subgraph");
  if (g.node_features.cols != p.node_dim() || g.node_features.rows != n)
    throw Error(ErrorCode::DimensionMismatch, "node feature width does not match parameters");
  for (const auto& e : g.edges)
    if (e.src >= n || e.dst >= n) throw Error(ErrorCode::DimensionMismatch, "edge endpoint out of range");

  detail::ForwardTape local;
  detail::ForwardTape& tp = tape ? *tape : local;
  tp.rounds.assign(static_cast<std::size_t>(iterations), {});
  tp.hidden.assign(static_cast<std::size_t>(iterations) + 1, {});
  tp.aggregation_scale = hp.aggregation_scale;

  tp.hidden[0] = numeric::mlp_forward(p.encoder, g.node_features, tape ? &tp.encoder : nullptr);

  const numeric::Layer& first = p.message.layers.front();
  const numeric::Layer& last = p.message.layers.back();
  const std::size_t m1 = first.out_dim();
  MlpParams middle;
  middle.layers.assign(p.message.layers.begin() + 1, p.message.layers.end() - 1);

  tp.edge_feats = DenseMatrix(g.edges.size(), kEdgeFeatureDim);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto f = edge_features(g.edges[e].geometry, hp.distance_scale_m);
    std::copy(f.begin(), f.end(), tp.edge_feats.row(e).begin());
  }
  detail::matmul_block(tp.edge_feats, first.weight, 2 * h, tp.edge_proj);

  for (int t = 0; t < iterations; ++t) {
    auto& rt = tp.rounds[static_cast<std::size_t>(t)];
    const bool final_round = t + 1 == iterations;
    const DenseMatrix& hin = tp.hidden[static_cast<std::size_t>(t)];
    // in the final round only the target's state is needed
    rt.row_of_node.assign(n, -1);
    if (final_round) {
      rt.dst_rows = {0};
    } else {
      rt.dst_rows.resize(n);
      for (std::size_t v = 0; v < n; ++v) rt.dst_rows[v] = static_cast<std::uint32_t>(v);
    }
    for (std::size_t r = 0; r < rt.dst_rows.size(); ++r) rt.row_of_node[rt.dst_rows[r]] = static_cast<long>(r);
    rt.active_edges.clear();
    for (std::size_t e = 0; e < g.edges.size(); ++e)
      if (rt.row_of_node[g.edges[e].dst] >= 0) rt.active_edges.push_back(static_cast<std::uint32_t>(e));

    // hin rows are indexed by node id when t == 0 or not final (all nodes present)
    DenseMatrix ps, pd;
    detail::matmul_block(hin, first.weight, 0, ps);
    detail::matmul_block(hin, first.weight, h, pd);

    rt.pre = DenseMatrix(rt.active_edges.size(), m1);
    DenseMatrix act(rt.active_edges.size(), m1);
    for (std::size_t i = 0; i < rt.active_edges.size(); ++i) {
      const auto& e = g.edges[rt.active_edges[i]];
      auto z = rt.pre.row(i);
      auto a = act.row(i);
      const auto s = ps.row(e.src);
      const auto d = pd.row(e.dst);
      const auto ep = tp.edge_proj.row(rt.active_edges[i]);
      for (std::size_t j = 0; j < m1; ++j) {
        z[j] = s[j] + d[j] + ep[j] + first.bias[j];
        a[j] = z[j] > 0.0 ? z[j] : 0.0;
      }
    }
    const DenseMatrix penult = middle.layers.empty() ? std::move(act)
                                                     : numeric::mlp_forward(middle, act, tape ? &rt.middle : nullptr);

    const std::size_t rows = rt.dst_rows.size();
    rt.summed = DenseMatrix(rows, penult.cols);
    rt.degree.assign(rows, 0.0);
    for (std::size_t i = 0; i < rt.active_edges.size(); ++i) {
      const auto r = static_cast<std::size_t>(rt.row_of_node[g.edges[rt.active_edges[i]].dst]);
      numeric::axpy(1.0, penult.row(i), rt.summed.row(r));
      rt.degree[r] += 1.0;
    }
    DenseMatrix agg;
    numeric::matmul(rt.summed, last.weight, agg);
    for (std::size_t r = 0; r < rows; ++r) numeric::axpy(rt.degree[r], last.bias, agg.row(r));
    if (hp.aggregation_scale != 1.0)
      for (double& v : agg.values) v *= hp.aggregation_scale;

    DenseMatrix uin(rows, 2 * h);
    for (std::size_t r = 0; r < rows; ++r) {
      auto u = uin.row(r);
      const auto hv = hin.row(rt.dst_rows[r]);
      std::copy(hv.begin(), hv.end(), u.begin());
      const auto av = agg.row(r);
      std::copy(av.begin(), av.end(), u.begin() + static_cast<long>(h));
    }
    tp.hidden[static_cast<std::size_t>(t) + 1] = numeric::mlp_forward(p.update, uin, tape ? &rt.update : nullptr);
  }

  const DenseMatrix& hT = tp.hidden.back();
  DenseMatrix target(1, h);
  std::copy(hT.row(0).begin(), hT.row(0).end(), target.values.begin());
  const DenseMatrix y = numeric::mlp_forward(p.readout, target, tape ? &tp.readout : nullptr);
  return y.values[0];
}

/// Normalized scalar prediction at the target node.
inline double forward(const GnnParameters& p, const graph::PlanningSubgraph& g, const GnnHyperparams& hp) {
  return forward_impl(p, g, hp, nullptr);
}

/// Accumulates d(output)/d(params) * dy into `grads`.
inline void backward(const GnnParameters& p, const graph::PlanningSubgraph& g, const detail::ForwardTape& tp,
                     double dy, GnnParameters& grads) {
  const std::size_t n = g.node_count();
  const std::size_t h = p.hidden_dim();
  const int iterations = static_cast<int>(tp.rounds.size());
  const numeric::Layer& first = p.message.layers.front();
  const numeric::Layer& last = p.message.layers.back();
  numeric::Layer& gfirst = grads.message.layers.front();
  numeric::Layer& glast = grads.message.layers.back();
  const std::size_t m1 = first.out_dim();
  MlpParams middle, gmiddle;
  middle.layers.assign(p.message.layers.begin() + 1, p.message.layers.end() - 1);
  gmiddle = middle.zeros_like();

  DenseMatrix dout(1, 1, dy);
  DenseMatrix dtarget = numeric::mlp_backward(p.readout, tp.readout, dout, grads.readout);

  // gradient w.r.t. the states produced by the current round (rows = dst_rows)
  DenseMatrix dh_rows = std::move(dtarget);
  DenseMatrix dedge_proj(g.edges.size(), m1);

  for (int t = iterations; t-- > 0;) {
    const auto& rt = tp.rounds[static_cast<std::size_t>(t)];
    const DenseMatrix& hin = tp.hidden[static_cast<std::size_t>(t)];
    const std::size_t rows = rt.dst_rows.size();

    DenseMatrix duin = numeric::mlp_backward(p.update, rt.update, std::move(dh_rows), grads.update);
    DenseMatrix dhin(n, h);
    DenseMatrix dagg(rows, h);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto u = duin.row(r);
      numeric::axpy(1.0, u.subspan(0, h), dhin.row(rt.dst_rows[r]));
      auto da = dagg.row(r);
      for (std::size_t k = 0; k < h; ++k) da[k] = tp.aggregation_scale * u[h + k];
    }
    // aggregated = scale * (summed * W_last + degree * b_last)
    numeric::accumulate_outer(rt.summed, dagg, glast.weight);
    for (std::size_t r = 0; r < rows; ++r) numeric::axpy(rt.degree[r], dagg.row(r), glast.bias);
    DenseMatrix dsummed;
    numeric::matmul_transposed(dagg, last.weight, dsummed);

    const std::size_t ne = rt.active_edges.size();
    DenseMatrix dpenult(ne, dsummed.cols);
    for (std::size_t i = 0; i < ne; ++i) {
      const auto r = static_cast<std::size_t>(rt.row_of_node[g.edges[rt.active_edges[i]].dst]);
      const auto src = dsummed.row(r);
      std::copy(src.begin(), src.end(), dpenult.row(i).begin());
    }
    DenseMatrix dact = middle.layers.empty() ? std::move(dpenult)
                                             : numeric::mlp_backward(middle, rt.middle, std::move(dpenult), gmiddle);

    DenseMatrix dps(n, m1), dpd(n, m1);
    for (std::size_t i = 0; i < ne; ++i) {
      const auto& e = g.edges[rt.active_edges[i]];
      const auto z = rt.pre.row(i);
      auto da = dact.row(i);
      for (std::size_t j = 0; j < m1; ++j)
        if (z[j] <= 0.0) da[j] = 0.0;
      numeric::axpy(1.0, da, dps.row(e.src));
      numeric::axpy(1.0, da, dpd.row(e.dst));
      numeric::axpy(1.0, da, dedge_proj.row(rt.active_edges[i]));
      numeric::axpy(1.0, da, gfirst.bias);
    }
    // first-layer weight blocks: rows [0,h) source, [h,2h) destination
    for (std::size_t v = 0; v < n; ++v) {
      const auto hv = hin.row(v);
      const auto gs = dps.row(v);
      const auto gd = dpd.row(v);
      for (std::size_t k = 0; k < h; ++k) {
        if (hv[k] == 0.0) continue;
        numeric::axpy(hv[k], gs, gfirst.weight.row(k));
        numeric::axpy(hv[k], gd, gfirst.weight.row(h + k));
      }
      auto dh = dhin.row(v);
      for (std::size_t k = 0; k < h; ++k)
        dh[k] += numeric::dot(gs, first.weight.row(k)) + numeric::dot(gd, first.weight.row(h + k));
    }
    dh_rows = std::move(dhin);
  }
  // edge block of the first message layer
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto f = tp.edge_feats.row(e);
    const auto ge = dedge_proj.row(e);
    for (std::size_t k = 0; k < kEdgeFeatureDim; ++k)
      if (f[k] != 0.0) numeric::axpy(f[k], ge, gfirst.weight.row(2 * h + k));
  }
  for (std::size_t i = 0; i < gmiddle.layers.size(); ++i) {
    auto& dst = grads.message.layers[i + 1];
    const auto& src = gmiddle.layers[i];
    numeric::axpy(1.0, src.weight.values, dst.weight.values);
    numeric::axpy(1.0, src.bias, dst.bias);
  }
  numeric::mlp_backward(p.encoder, tp.encoder, std::move(dh_rows), grads.encoder);
}

inline double loss(double prediction, double label) {
  const double d = prediction - label;
  return d * d;
}

struct Sample {
  const graph::PlanningSubgraph* graph = nullptr;
  double label = 0.0;  ///< normalized
};

/// Mean squared error over `batch` and its gradient (accumulated into a fresh
/// zero gradient set that is returned through `grads`).
inline double batch_loss_and_grad(const GnnParameters& p, std::span<const Sample> batch, const GnnHyperparams& hp,
                                  GnnParameters& grads) {
  grads = p.zeros_like();
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (const auto& s : batch) {
    detail::ForwardTape tp;
    const double y = forward_impl(p, *s.graph, hp, &tp);
    total += loss(y, s.label);
    backward(p, *s.graph, tp, 2.0 * (y - s.label) * inv, grads);
  }
  return total * inv;
}

struct TrainState {
  numeric::AdamState adam;
};

/// One Adam step on the mean batch loss. Throws NonFiniteLoss on divergence.
inline double train_step(GnnParameters& p, std::span<const Sample> batch, const GnnHyperparams& hp, TrainState& st) {
  if (batch.empty()) return 0.0;
  GnnParameters grads;
  const double l = batch_loss_and_grad(p, batch, hp, grads);
  if (!std::isfinite(l)) throw Error(ErrorCode::NonFiniteLoss, "training loss is not finite");
  auto flat = p.flatten();
  const auto g = grads.flatten();
  numeric::AdamConfig cfg;
  cfg.learning_rate = hp.learning_rate;
  numeric::adam_update(flat, g, st.adam, cfg);
  p.assign(flat);
  return l;
}

// ---------------------------------------------------------------------------
// Prediction in physical units

struct KpiPrediction {
  double value = 0.0;
  bool clipped = false;
};

/// De-normalizes `normalized` and clips into the KPI's physical range.
inline KpiPrediction to_physical(double normalized, KpiKind kpi, const NormalizationSpec& spec) {
  double v = spec.invert(kpi, normalized);
  KpiPrediction out;
  const double hi = kpi == KpiKind::PrbUtil ? 100.0 : std::numeric_limits<double>::infinity();
  if (!std::isfinite(v)) v = v > 0 ? hi : 0.0;
  out.value = std::clamp(v, 0.0, hi);
  out.clipped = out.value != v;
  return out;
}

inline KpiPrediction predict_kpi(const GnnParameters& p, const GnnHyperparams& hp, KpiKind kpi,
                                 const NormalizationSpec& spec, const graph::PlanningSubgraph& g) {
  return to_physical(forward(p, g, hp), kpi, spec);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json mlp_to_json(const MlpParams& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : m.layers)
    layers.push_back({{"in", l.in_dim()},
                      {"out", l.out_dim()},
                      {"activation", l.activation == Activation::ReLU ? "relu" : "identity"},
                      {"weight", l.weight.values},
                      {"bias", l.bias}});
  return layers;
}

inline MlpParams mlp_from_json(const nlohmann::json& j) {
  MlpParams m;
  for (const auto& lj : j) {
    numeric::Layer l;
    const auto in = lj.at("in").get<std::size_t>();
    const auto out = lj.at("out").get<std::size_t>();
    l.weight = DenseMatrix(in, out);
    l.weight.values = lj.at("weight").get<std::vector<double>>();
    l.bias = lj.at("bias").get<std::vector<double>>();
    if (l.weight.values.size() != in * out || l.bias.size() != out)
      throw Error(ErrorCode::DimensionMismatch, "layer size in checkpoint");
    const auto act = lj.at("activation").get<std::string>();
    if (act != "relu" && act != "identity") throw Error(ErrorCode::ParseError, "unknown activation", "activation");
    l.activation = act == "relu" ? Activation::ReLU : Activation::Identity;
    if (!m.layers.empty() && m.layers.back().out_dim() != in)
      throw Error(ErrorCode::DimensionMismatch, "layers do not chain in checkpoint");
    m.layers.push_back(std::move(l));
  }
  return m;
}

inline nlohmann::json to_json(const GnnParameters& p) {
  return {{"encoder", mlp_to_json(p.encoder)},
          {"message", mlp_to_json(p.message)},
          {"update", mlp_to_json(p.update)},
          {"readout", mlp_to_json(p.readout)}};
}

inline GnnParameters params_from_json(const nlohmann::json& j) {
  GnnParameters p{mlp_from_json(j.at("encoder")), mlp_from_json(j.at("message")), mlp_from_json(j.at("update")),
                  mlp_from_json(j.at("readout"))};
  check_shapes(p);
  return p;
}

inline nlohmann::json to_json(const GnnHyperparams& hp) {
  return {{"hidden_dim", hp.hidden_dim},
          {"iterations", hp.iterations},
          {"encoder_hidden", hp.encoder_hidden},
          {"message_hidden", hp.message_hidden},
          {"update_hidden", hp.update_hidden},
          {"readout_hidden", hp.readout_hidden},
          {"distance_scale_m", hp.distance_scale_m},
          {"aggregation_scale", hp.aggregation_scale},
          {"learning_rate", hp.learning_rate},
          {"batch_size", hp.batch_size},
          {"max_epochs", hp.max_epochs},
          {"early_stop_patience", hp.early_stop_patience}};
}

/// Absent keys keep the values already in `hp`.
inline void update_from_json(const nlohmann::json& j, GnnHyperparams& hp) {
  try {
    if (j.contains("hidden_dim")) hp.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    if (j.contains("iterations")) hp.iterations = j.at("iterations").get<int>();
    if (j.contains("encoder_hidden")) hp.encoder_hidden = j.at("encoder_hidden").get<std::vector<std::size_t>>();
    if (j.contains("message_hidden")) hp.message_hidden = j.at("message_hidden").get<std::vector<std::size_t>>();
    if (j.contains("update_hidden")) hp.update_hidden = j.at("update_hidden").get<std::vector<std::size_t>>();
    if (j.contains("readout_hidden")) hp.readout_hidden = j.at("readout_hidden").get<std::vector<std::size_t>>();
    if (j.contains("distance_scale_m")) hp.distance_scale_m = j.at("distance_scale_m").get<double>();
    if (j.contains("aggregation_scale")) hp.aggregation_scale = j.at("aggregation_scale").get<double>();
    if (j.contains("learning_rate")) hp.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("batch_size")) hp.batch_size = j.at("batch_size").get<std::size_t>();
    if (j.contains("max_epochs")) hp.max_epochs = j.at("max_epochs").get<int>();
    if (j.contains("early_stop_patience")) hp.early_stop_patience = j.at("early_stop_patience").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what(), "hyperparams");
  }
  hp.validate();
}

}  // namespace cellgraph::gnn

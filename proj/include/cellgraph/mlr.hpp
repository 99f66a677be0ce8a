#pragma once

// Multiple linear regression over a fixed-width vector: the target's node
// features followed by k neighbor slots, zero-padded when the subgraph has
// fewer than k neighbors.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cellgraph/error.hpp"
#include "cellgraph/graph_build.hpp"
#include "cellgraph/numeric.hpp"

namespace cellgraph::mlr {

inline constexpr std::size_t kSlotEdgeDim = 5;

struct MlrLayout {
  std::size_t k = 50;
  std::size_t node_dim = 0;
  bool include_edge_geometry = true;
  double distance_scale_m = 500.0;

  std::size_t slot_width() const { return node_dim + (include_edge_geometry ? kSlotEdgeDim : 0); }
  std::size_t dimension() const { return node_dim + k * slot_width(); }

  friend bool operator==(const MlrLayout&, const MlrLayout&) = default;
};

struct MlrParameters {
  MlrLayout layout;
  std::vector<double> weights;
  double bias = 0.0;
  double ridge_lambda = 1e-6;

  friend bool operator==(const MlrParameters&, const MlrParameters&) = default;
};

/// Target features, then one slot per neighbor ordered by ascending distance
/// to the target (ties by cell_id). A slot holds the neighbor's features and,
/// optionally, the geometry of the target->neighbor edge (zeros if absent).
inline std::vector<double> assemble_vector(const graph::PlanningSubgraph& g, const MlrLayout& layout) {
  if (g.node_features.cols != layout.node_dim)
    throw Error(ErrorCode::DimensionMismatch, "node feature width does not match MLR layout");
  std::vector<double> x(layout.dimension(), 0.0);
  const auto target = g.node_features.row(0);
  std::copy(target.begin(), target.end(), x.begin());

  std::vector<std::size_t> order(g.neighbor_count());
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (g.distance_to_target[a] != g.distance_to_target[b]) return g.distance_to_target[a] < g.distance_to_target[b];
    return g.node_ids[a] < g.node_ids[b];
  });

  std::vector<const geometry::EdgeGeometry*> to_target(g.node_count(), nullptr);
  for (const auto& e : g.edges)
    if (e.src == 0) to_target[e.dst] = &e.geometry;

  const std::size_t slots = std::min(order.size(), layout.k);
  for (std::size_t s = 0; s < slots; ++s) {
    const std::size_t node = order[s];
    auto* out = x.data() + layout.node_dim + s * layout.slot_width();
    const auto f = g.node_features.row(node);
    std::copy(f.begin(), f.end(), out);
    if (layout.include_edge_geometry && to_target[node]) {
      const auto& eg = *to_target[node];
      out += layout.node_dim;
      out[0] = eg.d / layout.distance_scale_m;
      out[1] = eg.alpha / 180.0;
      out[2] = eg.theta / 180.0;
      out[3] = eg.rho / 180.0;
      out[4] = eg.angles_valid ? 1.0 : 0.0;
    }
  }
  return x;
}

/// In-place Cholesky factorization of a symmetric positive definite matrix
/// (lower triangle). Returns false when a pivot is not safely positive.
inline bool cholesky(numeric::DenseMatrix& a) {
  const std::size_t n = a.rows;
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double tol = std::max(max_diag, 1.0) * 1e-13;
  for (std::size_t j = 0; j < n; ++j) {
    auto rj = a.row(j);
    double d = rj[j] - numeric::dot(rj.subspan(0, j), rj.subspan(0, j));
    if (!(d > tol)) return false;
    d = std::sqrt(d);
    rj[j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      auto ri = a.row(i);
      ri[j] = (ri[j] - numeric::dot(ri.subspan(0, j), rj.subspan(0, j))) / d;
    }
  }
  return true;
}

/// Solves L L^T x = b given the factor from cholesky().
inline std::vector<double> cholesky_solve(const numeric::DenseMatrix& l, std::vector<double> b) {
  const std::size_t n = l.rows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = l.row(i);
    b[i] = (b[i] - numeric::dot(ri.subspan(0, i), std::span<const double>(b.data(), i))) / ri[i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= l(j, i) * b[j];
    b[i] = s / l(i, i);
  }
  return b;
}

/// Ridge regression with an unpenalized intercept via the normal equations
/// of the intercept-augmented design: [X 1]^T [X 1] + diag(lambda, ..., 0).
inline MlrParameters fit(std::span<const std::vector<double>> xs, std::span<const double> ys, double ridge_lambda,
                         const MlrLayout& layout) {
  if (xs.empty()) throw Error(ErrorCode::EmptyTrainingSet, "MLR needs at least one sample");
  if (xs.size() != ys.size()) throw Error(ErrorCode::DimensionMismatch, "sample/label count");
  if (!(ridge_lambda >= 0.0)) throw Error(ErrorCode::InvalidConfig, "ridge_lambda must be >= 0", "ridge_lambda");
  const std::size_t d = xs.front().size();
  const std::size_t m = d + 1;
  numeric::DenseMatrix a(m, m);
  std::vector<double> rhs(m, 0.0);
  std::vector<std::size_t> nz;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const auto& x = xs[s];
    if (x.size() != d) throw Error(ErrorCode::DimensionMismatch, "ragged MLR design matrix");
    nz.clear();
    for (std::size_t i = 0; i < d; ++i)
      if (x[i] != 0.0) nz.push_back(i);
    // lower triangle only
    for (std::size_t ii = 0; ii < nz.size(); ++ii) {
      const std::size_t i = nz[ii];
      auto ri = a.row(i);
      for (std::size_t jj = 0; jj <= ii; ++jj) ri[nz[jj]] += x[i] * x[nz[jj]];
      a(d, i) += x[i];
      rhs[i] += x[i] * ys[s];
    }
    a(d, d) += 1.0;
    rhs[d] += ys[s];
  }
  for (std::size_t i = 0; i < d; ++i) a(i, i) += ridge_lambda;
  if (!cholesky(a)) throw Error(ErrorCode::SingularSystem, "normal equations are singular; use ridge_lambda > 0");
  const auto sol = cholesky_solve(a, rhs);
  MlrParameters p;
  p.layout = layout;
  p.weights.assign(sol.begin(), sol.begin() + static_cast<long>(d));
  p.bias = sol[d];
  p.ridge_lambda = ridge_lambda;
  return p;
}

inline double predict(const MlrParameters& p, std::span<const double> x) {
  if (x.size() != p.weights.size()) throw Error(ErrorCode::DimensionMismatch, "MLR input width");
  return numeric::dot(p.weights, x) + p.bias;
}

inline double predict(const MlrParameters& p, const graph::PlanningSubgraph& g) {
  return predict(p, assemble_vector(g, p.layout));
}

/// Gradient of the ridge objective at the fitted parameters, per coefficient
/// (intercept last): X^T (Xw + b - y) + lambda * w. Zero at the optimum.
inline std::vector<double> optimality_residual(const MlrParameters& p, std::span<const std::vector<double>> xs,
                                               std::span<const double> ys) {
  const std::size_t d = p.weights.size();
  std::vector<double> g(d + 1, 0.0);
  for (std::size_t s = 0; s < xs.size(); ++s) {
    const double r = predict(p, xs[s]) - ys[s];
    for (std::size_t i = 0; i < d; ++i) g[i] += xs[s][i] * r;
    g[d] += r;
  }
  for (std::size_t i = 0; i < d; ++i) g[i] += p.ridge_lambda * p.weights[i];
  return g;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const MlrParameters& p) {
  return {{"layout",
           {{"k", p.layout.k},
            {"node_dim", p.layout.node_dim},
            {"include_edge_geometry", p.layout.include_edge_geometry},
            {"distance_scale_m", p.layout.distance_scale_m},
            {"slot_order", "distance_asc_then_cell_id"},
            {"dimension", p.layout.dimension()}}},
          {"weights", p.weights},
          {"bias", p.bias},
          {"ridge_lambda", p.ridge_lambda}};
}

inline MlrParameters params_from_json(const nlohmann::json& j) {
  MlrParameters p;
  const auto& l = j.at("layout");
  p.layout.k = l.at("k").get<std::size_t>();
  p.layout.node_dim = l.at("node_dim").get<std::size_t>();
  p.layout.include_edge_geometry = l.at("include_edge_geometry").get<bool>();
  p.layout.distance_scale_m = l.at("distance_scale_m").get<double>();
  p.weights = j.at("weights").get<std::vector<double>>();
  p.bias = j.at("bias").get<double>();
  p.ridge_lambda = j.at("ridge_lambda").get<double>();
  if (p.weights.size() != p.layout.dimension())
    throw Error(ErrorCode::DimensionMismatch, "MLR weights do not match layout");
  return p;
}

}  // namespace cellgraph::mlr

#pragma once

// Exact k-NN / radius retrieval over 4G cells and construction of the
// per-candidate planning subgraph.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cellgraph/data_model.hpp"
#include "cellgraph/error.hpp"
#include "cellgraph/geometry.hpp"
#include "cellgraph/numeric.hpp"

namespace cellgraph::graph {

struct GraphBuildConfig {
  std::size_t k = 50;
  double target_radius_m = 500.0;
  int kpi_window_days = 1;  ///< 1 = that day's values; >1 = trailing mean

  void validate() const {
    if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1", "k");
    if (!(target_radius_m > 0.0)) throw Error(ErrorCode::InvalidConfig, "target_radius must be > 0", "target_radius");
    if (kpi_window_days < 1) throw Error(ErrorCode::InvalidConfig, "kpi_window_days must be >= 1", "kpi_window_days");
  }
};

struct Neighbor {
  std::size_t cell = 0;  ///< index into the inventory
  double distance_m = 0.0;
};

/// Ordering contract for every neighbor query: ascending distance, ties by cell_id.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b, const Inventory& inv) {
  if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
  return inv[a.cell].cell_id < inv[b.cell].cell_id;
}

/// Grid-bucketed exact index over the 4G cells of an inventory. Buckets are
/// rings of lat/lon cells; a query stops once a rigorous lower bound on the
/// great-circle distance to any unvisited bucket exceeds the current answer.
/// The inventory must outlive the index. Data straddling the antimeridian is
/// not supported.
class SpatialIndex {
 public:
  SpatialIndex(const Inventory& inventory, double bucket_m = 250.0) : inv_(&inventory) {
    for (std::size_t i = 0; i < inventory.size(); ++i)
      if (inventory[i].technology == Technology::LTE4G) cells_.push_back(i);
    if (cells_.empty()) throw Error(ErrorCode::EmptyInventory, "no 4G cells to index");
    double min_lat = 90, max_lat = -90, min_lon = 180, max_lon = -180;
    for (auto i : cells_) {
      const auto& p = inventory[i].position;
      min_lat = std::min(min_lat, p.lat);
      max_lat = std::max(max_lat, p.lat);
      min_lon = std::min(min_lon, p.lon);
      max_lon = std::max(max_lon, p.lon);
      max_abs_lat_ = std::max(max_abs_lat_, std::abs(p.lat));
    }
    dlat_ = geometry::rad2deg(bucket_m / geometry::kEarthRadiusM);
    dlon_ = dlat_ / std::max(0.01, std::cos(geometry::deg2rad(max_abs_lat_)));
    lat0_ = min_lat;
    lon0_ = min_lon;
    nrows_ = static_cast<long>((max_lat - min_lat) / dlat_) + 1;
    ncols_ = static_cast<long>((max_lon - min_lon) / dlon_) + 1;
    buckets_.assign(static_cast<std::size_t>(nrows_ * ncols_), {});
    for (auto i : cells_) {
      const auto [r, c] = bucket_of(inventory[i].position);
      buckets_[static_cast<std::size_t>(r * ncols_ + c)].push_back(i);
    }
  }

  const Inventory& inventory() const { return *inv_; }
  std::size_t size() const { return cells_.size(); }
  const std::vector<std::size_t>& cells() const { return cells_; }

  /// The k nearest 4G cells to p (all of them if fewer than k exist).
  std::vector<Neighbor> nearest(const GeoPoint& p, std::size_t k) const {
    std::vector<Neighbor> found;
    if (k == 0) return found;
    const auto cmp = [this](const Neighbor& a, const Neighbor& b) { return neighbor_less(a, b, *inv_); };
    visit_rings(p, [&](long ring) {
      // results strictly inside the bound can no longer change
      std::sort(found.begin(), found.end(), cmp);
      if (found.size() > k) found.resize(k);
      return found.size() == k && found.back().distance_m < lower_bound(p, ring);
    }, [&](std::size_t cell) {
      found.push_back(Neighbor{cell, geometry::geodesic_distance(p, (*inv_)[cell].position)});
    });
    std::sort(found.begin(), found.end(), cmp);
    if (found.size() > k) found.resize(k);
    return found;
  }

  /// All 4G cells with distance <= radius, ordered by the neighbor contract.
  std::vector<Neighbor> within(const GeoPoint& p, double radius_m) const {
    std::vector<Neighbor> found;
    visit_rings(p, [&](long ring) { return lower_bound(p, ring) > radius_m; },
                [&](std::size_t cell) {
                  const double d = geometry::geodesic_distance(p, (*inv_)[cell].position);
                  if (d <= radius_m) found.push_back(Neighbor{cell, d});
                });
    std::sort(found.begin(), found.end(), [this](const Neighbor& a, const Neighbor& b) {
      return neighbor_less(a, b, *inv_);
    });
    return found;
  }

 private:
  std::pair<long, long> bucket_of(const GeoPoint& p) const {
    return {static_cast<long>(std::floor((p.lat - lat0_) / dlat_)), static_cast<long>(std::floor((p.lon - lon0_) / dlon_))};
  }

  /// Lower bound on the distance from p to any cell outside rings 0..ring.
  double lower_bound(const GeoPoint& p, long ring) const {
    if (ring <= 0) return 0.0;
    const double by_lat = geometry::kEarthRadiusM * geometry::deg2rad(ring * dlat_);
    const double cos_prod =
        std::cos(geometry::deg2rad(std::abs(p.lat))) * std::cos(geometry::deg2rad(max_abs_lat_));
    const double s = std::sqrt(std::max(0.0, cos_prod)) * std::sin(std::min(std::numbers::pi, geometry::deg2rad(ring * dlon_)) / 2.0);
    const double by_lon = 2.0 * geometry::kEarthRadiusM * std::asin(std::min(1.0, s));
    // small relative margin against rounding in the two bounds
    return std::min(by_lat, by_lon) * (1.0 - 1e-9);
  }

  /// Visits buckets ring by ring around p. `done(ring)` is asked after each
  /// complete ring; visiting stops when it returns true or the grid is exhausted.
  template <typename Done, typename Visit>
  void visit_rings(const GeoPoint& p, Done&& done, Visit&& visit) const {
    const auto [r0, c0] = bucket_of(p);
    // rings needed to cover the whole grid from (r0, c0)
    const long max_ring = std::max({std::abs(r0), std::abs(nrows_ - 1 - r0), std::abs(c0), std::abs(ncols_ - 1 - c0)});
    for (long ring = 0; ring <= max_ring; ++ring) {
      for (long r = r0 - ring; r <= r0 + ring; ++r) {
        if (r < 0 || r >= nrows_) continue;
        const bool edge_row = (r == r0 - ring || r == r0 + ring);
        const long step = edge_row ? 1 : 2 * ring;
        for (long c = c0 - ring; c <= c0 + ring; c += (step == 0 ? 1 : step)) {
          if (c < 0 || c >= ncols_) continue;
          for (auto cell : buckets_[static_cast<std::size_t>(r * ncols_ + c)]) visit(cell);
        }
      }
      if (done(ring)) return;
    }
  }

  const Inventory* inv_;
  std::vector<std::size_t> cells_;
  std::vector<std::vector<std::size_t>> buckets_;
  double dlat_ = 0, dlon_ = 0, lat0_ = 0, lon0_ = 0, max_abs_lat_ = 0;
  long nrows_ = 0, ncols_ = 0;
};

inline SpatialIndex build_index(const Inventory& inventory) { return SpatialIndex(inventory); }

inline std::vector<Neighbor> nearest_neighbors(const SpatialIndex& index, const GeoPoint& p, std::size_t k) {
  return index.nearest(p, k);
}

// ---------------------------------------------------------------------------
// Subgraphs

struct SubgraphEdge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  geometry::EdgeGeometry geometry;

  friend bool operator==(const SubgraphEdge&, const SubgraphEdge&) = default;
};

/// Node 0 is the target candidate; nodes 1..n are its 4G neighbors in
/// ascending distance order.
struct SubgraphTopology {
  CellInventoryEntry target;
  std::vector<Neighbor> neighbors;
  std::vector<SubgraphEdge> edges;
  bool low_confidence = false;

  std::size_t node_count() const { return neighbors.size() + 1; }
};

struct PlanningSubgraph {
  std::vector<std::string> node_ids;      ///< node 0 = target
  std::vector<double> distance_to_target;  ///< meters; 0 for the target itself
  numeric::DenseMatrix node_features;      ///< one row per node
  std::vector<SubgraphEdge> edges;
  bool low_confidence = false;

  std::size_t node_count() const { return node_ids.size(); }
  std::size_t neighbor_count() const { return node_ids.empty() ? 0 : node_ids.size() - 1; }

  friend bool operator==(const PlanningSubgraph&, const PlanningSubgraph&) = default;
};

/// Neighbors and featured edges for a candidate; independent of the date.
/// Neighbor pairs are fully connected in both directions. The target links
/// (both directions) to neighbors within target_radius; when none qualifies
/// only the nearest neighbor is linked and low_confidence is set.
inline SubgraphTopology build_topology(const SpatialIndex& index, const CellInventoryEntry& candidate,
                                       const GraphBuildConfig& cfg) {
  cfg.validate();
  if (index.size() == 0) throw Error(ErrorCode::NoFourGCells, "no 4G cells available");
  const Inventory& inv = index.inventory();
  SubgraphTopology t;
  t.target = candidate;
  t.neighbors = index.nearest(candidate.position, cfg.k);
  if (t.neighbors.empty()) throw Error(ErrorCode::NoFourGCells, "no 4G cells near candidate");
  const std::size_t n = t.neighbors.size();
  t.edges.reserve(n * (n - 1) + 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = inv[t.neighbors[i].cell];
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& b = inv[t.neighbors[j].cell];
      t.edges.push_back(SubgraphEdge{static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1),
                                     geometry::relative_angles(a.position, a.azimuth, b.position, b.azimuth)});
    }
  }
  auto link = [&](std::size_t i) {
    const auto& b = inv[t.neighbors[i].cell];
    t.edges.push_back(SubgraphEdge{0, static_cast<std::uint32_t>(i + 1),
                                   geometry::relative_angles(candidate.position, candidate.azimuth, b.position,
                                                             b.azimuth)});
    t.edges.push_back(SubgraphEdge{static_cast<std::uint32_t>(i + 1), 0,
                                   geometry::relative_angles(b.position, b.azimuth, candidate.position,
                                                             candidate.azimuth)});
  };
  std::size_t linked = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (t.neighbors[i].distance_m <= cfg.target_radius_m) {
      link(i);
      ++linked;
    }
  if (linked == 0) {
    link(0);
    t.low_confidence = true;
  }
  return t;
}

/// Attaches date-specific node features to a topology.
inline PlanningSubgraph attach_features(const SubgraphTopology& topo, const Inventory& inv, Date date,
                                        const KpiTable& kpis, const NormalizationSpec& spec, const NodeVocab& vocab,
                                        const GraphBuildConfig& cfg) {
  PlanningSubgraph g;
  const std::size_t dim = node_dim(vocab);
  g.node_features = numeric::DenseMatrix(topo.node_count(), dim);
  g.node_ids.reserve(topo.node_count());
  g.distance_to_target.reserve(topo.node_count());

  auto put = [&](std::size_t row, const std::vector<double>& f) {
    std::copy(f.begin(), f.end(), g.node_features.row(row).begin());
  };
  g.node_ids.push_back(topo.target.cell_id);
  g.distance_to_target.push_back(0.0);
  put(0, encode_node(topo.target, nullptr, spec, vocab, true));
  for (std::size_t i = 0; i < topo.neighbors.size(); ++i) {
    const auto& cell = inv[topo.neighbors[i].cell];
    const auto rec = node_kpis(kpis, cell.cell_id, date, cfg.kpi_window_days);
    g.node_ids.push_back(cell.cell_id);
    g.distance_to_target.push_back(topo.neighbors[i].distance_m);
    put(i + 1, encode_node(cell, rec ? &*rec : nullptr, spec, vocab, false));
  }
  g.edges = topo.edges;
  g.low_confidence = topo.low_confidence;
  return g;
}

inline PlanningSubgraph build_subgraph(const SpatialIndex& index, const CellInventoryEntry& candidate, Date date,
                                       const KpiTable& kpis, const NormalizationSpec& spec, const NodeVocab& vocab,
                                       const GraphBuildConfig& cfg) {
  return attach_features(build_topology(index, candidate, cfg), index.inventory(), date, kpis, spec, vocab, cfg);
}

}  // namespace cellgraph::graph

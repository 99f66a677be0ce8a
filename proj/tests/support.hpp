#pragma once

#include <random>
#include <string>
#include <vector>

#include "cellgraph/data_model.hpp"
#include "cellgraph/gnn.hpp"
#include "cellgraph/graph_build.hpp"
#include "cellgraph/synth.hpp"

namespace cellgraph::fixtures {

/// A small, fast scenario (a few dozen sites, two weeks of data).
inline synth::ScenarioConfig small_scenario(std::uint64_t seed = 3) {
  synth::ScenarioConfig c;
  c.seed = seed;
  c.n_sites = 40;
  c.bbox_max = GeoPoint{51.512, -0.105};
  c.n_days = 14;
  return c;
}

/// Random cells scattered within `radius_m` of a center point; a share of
/// them sits on shared sites, some are omni.
inline Inventory random_inventory(std::mt19937_64& rng, std::size_t n, double radius_m = 1500.0,
                                  GeoPoint center = {51.5, -0.1}) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), az(0.0, 360.0), unit(0.0, 1.0);
  const double dlat = geometry::rad2deg(radius_m / geometry::kEarthRadiusM);
  const double dlon = dlat / std::cos(geometry::deg2rad(center.lat));
  Inventory inv;
  std::size_t site = 0;
  while (inv.size() < n) {
    const GeoPoint p{center.lat + u(rng) * dlat, center.lon + u(rng) * dlon};
    const std::size_t sectors = unit(rng) < 0.5 ? 1 : 3;
    const bool omni = unit(rng) < 0.1;
    for (std::size_t s = 0; s < sectors && inv.size() < n; ++s) {
      CellInventoryEntry c;
      c.site_id = "S" + std::to_string(site);
      c.cell_id = c.site_id + "-" + std::to_string(s);
      c.position = p;
      c.azimuth = omni ? Azimuth::omni() : Azimuth::degrees(az(rng));
      c.technology = Technology::LTE4G;
      c.manufacturer = unit(rng) < 0.5 ? "Ericsson" : "Nokia";
      c.antenna_model = unit(rng) < 0.5 ? "M1" : "M2";
      inv.push_back(std::move(c));
    }
    ++site;
  }
  return inv;
}

inline KpiTable random_kpis(std::mt19937_64& rng, const Inventory& inv, Date date, double missing = 0.1) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KpiTable t;
  for (const auto& c : inv) {
    if (unit(rng) < missing) continue;
    t.insert(KpiRecord{c.cell_id, date, 100.0 * unit(rng), 1.0 + 20.0 * unit(rng), 10.0 + 200.0 * unit(rng)});
  }
  return t;
}

inline CellInventoryEntry candidate_at(GeoPoint p, double azimuth) {
  CellInventoryEntry c;
  c.cell_id = "CAND";
  c.site_id = "CAND";
  c.position = p;
  c.azimuth = Azimuth::degrees(azimuth);
  c.technology = Technology::NR5G;
  c.manufacturer = "Ericsson";
  c.antenna_model = "M5";
  return c;
}

/// Random featured subgraph with up to `max_neighbors` 4G neighbors.
struct RandomGraph {
  Inventory inventory;
  KpiTable kpis;
  NormalizationSpec spec;
  NodeVocab vocab;
  graph::PlanningSubgraph graph;
};

inline RandomGraph random_subgraph(std::mt19937_64& rng, std::size_t max_neighbors, double radius_m = 800.0) {
  RandomGraph r;
  std::uniform_int_distribution<std::size_t> count(1, max_neighbors);
  const std::size_t n = count(rng);
  r.inventory = random_inventory(rng, n, radius_m);
  const Date date = Date::from_ymd(2022, 10, 3);
  r.kpis = random_kpis(rng, r.inventory, date);
  r.spec = fit_normalization(r.kpis.size() ? r.kpis : random_kpis(rng, r.inventory, date, 0.0), {date});
  r.vocab = fit_vocab(r.inventory);
  graph::GraphBuildConfig cfg;
  cfg.k = n;
  std::uniform_real_distribution<double> az(0.0, 360.0);
  const graph::SpatialIndex index(r.inventory);
  r.graph = graph::build_subgraph(index, candidate_at({51.5, -0.1}, az(rng)), date, r.kpis, r.spec, r.vocab, cfg);
  return r;
}

}  // namespace cellgraph::fixtures

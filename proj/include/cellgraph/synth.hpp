#pragma once

// Synthetic cities: seeded site layouts with sectored 4G/5G cells and a
// planted ground-truth KPI function.
//
// Ground truth (noiseless base value of a cell on a date):
//
//   demand(p)  = base_demand + sum_i amp_i * exp(-|p - c_i|^2 / (2 sigma_i^2))
//   s          = mean of demand(p) over points along the boresight at
//                boresight_samples_m (omni cells: averaged over 8 directions)
//   load       = s * weekday_factor(date) * day_factor(date) * region_kpi_scale
//   prb_util   = 100 * min(1, prb_coeff[tech] * load)
//   ul_thr     = gain(antenna_model) * ul_coeff[tech] / (load_offset + load)
//   dl_thr     = gain(antenna_model) * dl_coeff[tech] / (load_offset + load)
//
// Observed values multiply the base by (1 + noise_std[kpi] * z), z ~ N(0, 1)
// truncated to [-3, 3], then clip into the valid KPI ranges. The KPI function
// never reads absolute coordinates, only the demand sampled along the antenna
// direction.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cellgraph/data_model.hpp"
#include "cellgraph/error.hpp"
#include "cellgraph/geometry.hpp"

namespace cellgraph::synth {

struct AntennaModelSpec {
  std::string manufacturer;
  std::string model;
  double gain = 1.0;
  Technology technology = Technology::LTE4G;
};

inline std::vector<AntennaModelSpec> default_catalog() {
  return {
      {"Ericsson", "AIR-3246", 0.85, Technology::LTE4G}, {"Ericsson", "KRE-1012", 1.0, Technology::LTE4G},
      {"Nokia", "AAHF-8T", 1.15, Technology::LTE4G},     {"Huawei", "ASI-4518", 1.3, Technology::LTE4G},
      {"Ericsson", "AIR-6449", 1.2, Technology::NR5G},   {"Nokia", "AEQD-64T", 1.4, Technology::NR5G},
      {"Huawei", "AAU-5613", 1.0, Technology::NR5G},
  };
}

struct ScenarioConfig {
  std::uint64_t seed = 1;
  std::string name = "A";  ///< prefix for site and cell ids
  GeoPoint bbox_min{51.500, -0.125};
  GeoPoint bbox_max{51.530, -0.065};
  int n_sites = 220;
  double min_site_spacing_m = 60.0;
  int layers_4g_min = 1;  ///< 4G carriers per sector, drawn uniformly in [min, max]
  int layers_4g_max = 2;
  double azimuth_jitter_4g_deg = 12.0;
  double azimuth_jitter_5g_deg = 3.0;
  double omni_site_share = 0.04;
  double share_5g_sites = 0.23;
  Date start_date = Date::from_ymd(2022, 10, 1);
  int n_days = 92;
  double missing_rate = 0.01;
  std::array<double, 3> noise_std{0.06, 0.08, 0.07};
  double region_kpi_scale = 1.0;

  // demand field
  int n_bumps = 14;
  double base_demand = 0.45;
  double bump_amp_min = 0.25;
  double bump_amp_max = 2.0;
  double bump_sigma_min_m = 500.0;
  double bump_sigma_max_m = 1400.0;
  std::vector<double> boresight_samples_m{40.0, 80.0, 120.0, 160.0};
  double weekend_factor = 0.85;
  double day_factor_std = 0.05;

  // KPI function coefficients, index 0 = 4G, 1 = 5G
  std::array<double, 2> prb_coeff{0.5, 0.35};
  std::array<double, 2> ul_coeff{12.0, 20.0};
  std::array<double, 2> dl_coeff{80.0, 240.0};
  double load_offset = 0.5;

  std::vector<AntennaModelSpec> catalog = default_catalog();

  Date end_date() const { return start_date + (n_days - 1); }
};

inline void validate(const ScenarioConfig& c) {
  auto bad = [](const std::string& field, const std::string& msg) {
    throw Error(ErrorCode::InvalidConfig, msg, field);
  };
  if (!(c.bbox_min.lat < c.bbox_max.lat) || !(c.bbox_min.lon < c.bbox_max.lon))
    bad("region_bbox", "bbox min corner must be south-west of max corner");
  if (c.bbox_min.lat < -90 || c.bbox_max.lat > 90) bad("region_bbox", "latitude out of range");
  if (c.n_sites < 1) bad("n_sites", "n_sites must be >= 1");
  if (c.layers_4g_min < 1 || c.layers_4g_max < c.layers_4g_min) bad("cells_per_site_4g", "invalid layer range");
  if (!(c.share_5g_sites >= 0.0 && c.share_5g_sites <= 1.0)) bad("share_5g_sites", "must be in [0, 1]");
  if (!(c.omni_site_share >= 0.0 && c.omni_site_share <= 1.0)) bad("omni_site_share", "must be in [0, 1]");
  if (!(c.missing_rate >= 0.0 && c.missing_rate < 1.0)) bad("missing_rate", "must be in [0, 1)");
  if (c.n_days < 1) bad("date_range", "need at least one day");
  for (double s : c.noise_std)
    if (!(s >= 0.0)) bad("noise_std", "must be >= 0");
  if (!(c.region_kpi_scale > 0.0)) bad("region_kpi_scale", "must be > 0");
  if (c.min_site_spacing_m < 0.0) bad("min_site_spacing_m", "must be >= 0");
  if (c.boresight_samples_m.empty()) bad("boresight_samples_m", "need at least one sample distance");
  if (!(c.bump_sigma_min_m > 0.0) || c.bump_sigma_max_m < c.bump_sigma_min_m) bad("bump_sigma", "invalid range");
  bool has4 = false, has5 = false;
  for (const auto& a : c.catalog) {
    if (!(a.gain > 0.0)) bad("catalog", "antenna gain must be > 0");
    (a.technology == Technology::LTE4G ? has4 : has5) = true;
  }
  if (!has4 || !has5) bad("catalog", "catalog needs at least one 4G and one 5G antenna model");
}

// ---------------------------------------------------------------------------
// Ground truth

struct Bump {
  double x = 0.0;  ///< meters east of the bbox center
  double y = 0.0;  ///< meters north of the bbox center
  double amp = 0.0;
  double sigma = 1.0;
};

class GroundTruthField {
 public:
  GroundTruthField() = default;
  GroundTruthField(ScenarioConfig cfg, std::vector<Bump> bumps) : cfg_(std::move(cfg)), bumps_(std::move(bumps)) {
    origin_ = GeoPoint{(cfg_.bbox_min.lat + cfg_.bbox_max.lat) / 2.0, (cfg_.bbox_min.lon + cfg_.bbox_max.lon) / 2.0};
    for (const auto& a : cfg_.catalog) gains_[a.model] = a.gain;
  }

  const ScenarioConfig& config() const { return cfg_; }
  const std::vector<Bump>& bumps() const { return bumps_; }

  /// Local east/north meters relative to the bbox center.
  std::array<double, 2> to_local(const GeoPoint& p) const {
    const double k = geometry::deg2rad(1.0) * geometry::kEarthRadiusM;
    return {(p.lon - origin_.lon) * k * std::cos(geometry::deg2rad(origin_.lat)), (p.lat - origin_.lat) * k};
  }

  double demand_local(double x, double y) const {
    double v = cfg_.base_demand;
    for (const auto& b : bumps_) {
      const double dx = x - b.x, dy = y - b.y;
      v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
    }
    return v;
  }

  double demand(const GeoPoint& p) const {
    const auto l = to_local(p);
    return demand_local(l[0], l[1]);
  }

  /// Mean demand over points along the cell's boresight.
  double boresight_demand(const CellInventoryEntry& cell) const {
    const auto o = to_local(cell.position);
    double acc = 0.0;
    int n = 0;
    auto sample_dir = [&](double az_deg) {
      const double a = geometry::deg2rad(az_deg);
      for (double r : cfg_.boresight_samples_m) {
        acc += demand_local(o[0] + r * std::sin(a), o[1] + r * std::cos(a));
        ++n;
      }
    };
    if (cell.azimuth.is_omni)
      for (int i = 0; i < 8; ++i) sample_dir(45.0 * i);
    else
      sample_dir(cell.azimuth.value);
    return acc / n;
  }

  double gain(const std::string& antenna_model) const {
    auto it = gains_.find(antenna_model);
    return it == gains_.end() ? 1.0 : it->second;
  }

  double weekday_factor(Date d) const { return d.is_weekend() ? cfg_.weekend_factor : 1.0; }

  /// City-wide daily multiplier, a deterministic function of (seed, date).
  double day_factor(Date d) const {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg_.seed), static_cast<std::uint32_t>(cfg_.seed >> 32),
                      static_cast<std::uint32_t>(d.days), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> n(0.0, 1.0);
    return std::max(0.5, 1.0 + cfg_.day_factor_std * n(rng));
  }

  double load(const CellInventoryEntry& cell, Date d) const {
    return boresight_demand(cell) * weekday_factor(d) * day_factor(d) * cfg_.region_kpi_scale;
  }

  /// Noiseless KPI values.
  KpiRecord base_kpi(const CellInventoryEntry& cell, Date d) const {
    const int t = cell.technology == Technology::LTE4G ? 0 : 1;
    const double l = load(cell, d);
    const double g = gain(cell.antenna_model);
    KpiRecord r;
    r.cell_id = cell.cell_id;
    r.date = d;
    r.prb_util = 100.0 * std::min(1.0, cfg_.prb_coeff[t] * l);
    r.ul_throughput = g * cfg_.ul_coeff[t] / (cfg_.load_offset + l);
    r.dl_throughput = g * cfg_.dl_coeff[t] / (cfg_.load_offset + l);
    return r;
  }

 private:
  ScenarioConfig cfg_;
  std::vector<Bump> bumps_;
  GeoPoint origin_;
  std::map<std::string, double, std::less<>> gains_;
};

/// Applies multiplicative truncated-Gaussian noise to a base record.
template <typename Rng>
KpiRecord add_noise(const KpiRecord& base, const std::array<double, 3>& noise_std, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  auto noisy = [&](double v, double sd) {
    const double z = std::clamp(n(rng), -3.0, 3.0);
    return v * std::max(0.0, 1.0 + sd * z);
  };
  KpiRecord r = base;
  r.prb_util = std::clamp(noisy(base.prb_util, noise_std[0]), 0.0, 100.0);
  r.ul_throughput = noisy(base.ul_throughput, noise_std[1]);
  r.dl_throughput = noisy(base.dl_throughput, noise_std[2]);
  return r;
}

/// One observed KPI record for `cell` on `date`.
template <typename Rng>
KpiRecord oracle_kpi(const GroundTruthField& field, const CellInventoryEntry& cell, Date date, Rng& rng) {
  return add_noise(field.base_kpi(cell, date), field.config().noise_std, rng);
}

// ---------------------------------------------------------------------------
// Scenario generation

struct Scenario {
  Inventory inventory;
  GroundTruthField field;
};

namespace detail {

inline std::string site_id(const ScenarioConfig& c, int site) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d", site);
  return c.name + "S" + buf;
}

}  // namespace detail

inline Scenario generate_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // bbox extent in local meters
  GroundTruthField probe(cfg, {});
  const auto lo = probe.to_local(cfg.bbox_min);
  const auto hi = probe.to_local(cfg.bbox_max);
  const double w = hi[0] - lo[0], h = hi[1] - lo[1];

  std::vector<Bump> bumps;
  for (int i = 0; i < cfg.n_bumps; ++i) {
    Bump b;
    b.x = lo[0] + unit(rng) * w;
    b.y = lo[1] + unit(rng) * h;
    b.amp = cfg.bump_amp_min + unit(rng) * (cfg.bump_amp_max - cfg.bump_amp_min);
    b.sigma = cfg.bump_sigma_min_m + unit(rng) * (cfg.bump_sigma_max_m - cfg.bump_sigma_min_m);
    bumps.push_back(b);
  }
  GroundTruthField field(cfg, std::move(bumps));

  // hard-core uniform point process for site positions
  std::vector<GeoPoint> sites;
  const int max_attempts = cfg.n_sites * 200;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(sites.size()) < cfg.n_sites; ++attempt) {
    const GeoPoint p{cfg.bbox_min.lat + unit(rng) * (cfg.bbox_max.lat - cfg.bbox_min.lat),
                     cfg.bbox_min.lon + unit(rng) * (cfg.bbox_max.lon - cfg.bbox_min.lon)};
    bool ok = true;
    for (const auto& s : sites)
      if (geometry::geodesic_distance(s, p) < std::max(cfg.min_site_spacing_m, geometry::kCoLocationM)) {
        ok = false;
        break;
      }
    if (ok) sites.push_back(p);
  }
  if (static_cast<int>(sites.size()) < cfg.n_sites)
    throw Error(ErrorCode::InvalidConfig, "cannot place n_sites with the requested spacing", "n_sites");

  std::vector<const AntennaModelSpec*> models4, models5;
  for (const auto& a : cfg.catalog) (a.technology == Technology::LTE4G ? models4 : models5).push_back(&a);
  auto pick = [&](const std::vector<const AntennaModelSpec*>& v) {
    return v[std::min(v.size() - 1, static_cast<std::size_t>(unit(rng) * v.size()))];
  };

  Inventory inv;
  for (int s = 0; s < cfg.n_sites; ++s) {
    const std::string sid = detail::site_id(cfg, s);
    const bool omni = unit(rng) < cfg.omni_site_share;
    const bool has5g = !omni && unit(rng) < cfg.share_5g_sites;
    const int layers = cfg.layers_4g_min +
                       std::min(cfg.layers_4g_max - cfg.layers_4g_min,
                                static_cast<int>(unit(rng) * (cfg.layers_4g_max - cfg.layers_4g_min + 1)));
    const double rotation = unit(rng) * 120.0;
    std::array<double, 3> sector_az{};
    for (int k = 0; k < 3; ++k)
      sector_az[k] = geometry::wrap360(rotation + 120.0 * k + (unit(rng) * 2.0 - 1.0) * cfg.azimuth_jitter_4g_deg);
    const auto* site_model = pick(models4);
    for (int layer = 0; layer < layers; ++layer) {
      const int n_cells = omni ? 1 : 3;
      for (int k = 0; k < n_cells; ++k) {
        CellInventoryEntry c;
        c.cell_id = sid + "-L" + std::to_string(layer) + (omni ? std::string("O") : std::string(1, char('A' + k)));
        c.site_id = sid;
        c.position = sites[s];
        c.azimuth = omni ? Azimuth::omni() : Azimuth::degrees(sector_az[k]);
        c.technology = Technology::LTE4G;
        // one model per site on the first layer, random on others
        const auto* m = layer == 0 ? site_model : pick(models4);
        c.manufacturer = m->manufacturer;
        c.antenna_model = m->model;
        inv.push_back(std::move(c));
      }
    }
    if (has5g) {
      const auto* m5 = pick(models5);
      for (int k = 0; k < 3; ++k) {
        CellInventoryEntry c;
        c.cell_id = sid + "-N" + std::string(1, char('A' + k));
        c.site_id = sid;
        c.position = sites[s];
        c.azimuth =
            Azimuth::degrees(sector_az[k] + (unit(rng) * 2.0 - 1.0) * cfg.azimuth_jitter_5g_deg);
        c.technology = Technology::NR5G;
        c.manufacturer = m5->manufacturer;
        c.antenna_model = m5->model;
        inv.push_back(std::move(c));
      }
    }
  }
  return Scenario{std::move(inv), std::move(field)};
}

/// Observed KPI table over the configured date range, seeded from cfg.seed.
inline KpiTable generate_kpis(const Scenario& sc) {
  const auto& cfg = sc.field.config();
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  KpiTable table;
  for (const auto& cell : sc.inventory) {
    for (int day = 0; day < cfg.n_days; ++day) {
      const Date d = cfg.start_date + day;
      const bool missing = unit(rng) < cfg.missing_rate;
      KpiRecord r = oracle_kpi(sc.field, cell, d, rng);
      if (!missing) table.insert(std::move(r));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const AntennaModelSpec& a) {
  j = {{"manufacturer", a.manufacturer},
       {"model", a.model},
       {"gain", a.gain},
       {"technology", std::string(to_string(a.technology))}};
}

inline void from_json(const nlohmann::json& j, AntennaModelSpec& a) {
  a.manufacturer = j.at("manufacturer").get<std::string>();
  a.model = j.at("model").get<std::string>();
  a.gain = j.at("gain").get<double>();
  const auto t = j.at("technology").get<std::string>();
  if (t != "4G" && t != "5G") throw Error(ErrorCode::InvalidConfig, "technology must be 4G or 5G", "catalog");
  a.technology = t == "4G" ? Technology::LTE4G : Technology::NR5G;
}

inline nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["name"] = c.name;
  j["region_bbox"] = {c.bbox_min.lat, c.bbox_min.lon, c.bbox_max.lat, c.bbox_max.lon};
  j["n_sites"] = c.n_sites;
  j["min_site_spacing_m"] = c.min_site_spacing_m;
  j["cells_per_site_4g"] = {{"sectors", 3}, {"layers_min", c.layers_4g_min}, {"layers_max", c.layers_4g_max}};
  j["azimuth_jitter_4g_deg"] = c.azimuth_jitter_4g_deg;
  j["azimuth_jitter_5g_deg"] = c.azimuth_jitter_5g_deg;
  j["omni_site_share"] = c.omni_site_share;
  j["share_5g_sites"] = c.share_5g_sites;
  j["date_range"] = {c.start_date.iso(), c.end_date().iso()};
  j["missing_rate"] = c.missing_rate;
  j["noise_std"] = {{"prb_util", c.noise_std[0]}, {"ul_throughput", c.noise_std[1]}, {"dl_throughput", c.noise_std[2]}};
  j["region_kpi_scale"] = c.region_kpi_scale;
  j["demand"] = {{"n_bumps", c.n_bumps},
                 {"base", c.base_demand},
                 {"amp_min", c.bump_amp_min},
                 {"amp_max", c.bump_amp_max},
                 {"sigma_min_m", c.bump_sigma_min_m},
                 {"sigma_max_m", c.bump_sigma_max_m},
                 {"boresight_samples_m", c.boresight_samples_m},
                 {"weekend_factor", c.weekend_factor},
                 {"day_factor_std", c.day_factor_std}};
  j["kpi_function"] = {{"prb_coeff", c.prb_coeff},
                       {"ul_coeff", c.ul_coeff},
                       {"dl_coeff", c.dl_coeff},
                       {"load_offset", c.load_offset}};
  j["catalog"] = c.catalog;
  return j;
}

/// Reads a scenario config; absent keys keep the values already in `c`.
inline void update_from_json(const nlohmann::json& j, ScenarioConfig& c) {
  try {
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (j.contains("region_bbox")) {
      const auto b = j.at("region_bbox").get<std::vector<double>>();
      if (b.size() != 4) throw Error(ErrorCode::InvalidConfig, "region_bbox needs 4 numbers", "region_bbox");
      c.bbox_min = GeoPoint{b[0], b[1]};
      c.bbox_max = GeoPoint{b[2], b[3]};
    }
    if (j.contains("n_sites")) c.n_sites = j.at("n_sites").get<int>();
    if (j.contains("min_site_spacing_m")) c.min_site_spacing_m = j.at("min_site_spacing_m").get<double>();
    if (j.contains("cells_per_site_4g")) {
      const auto& cp = j.at("cells_per_site_4g");
      if (cp.contains("layers_min")) c.layers_4g_min = cp.at("layers_min").get<int>();
      if (cp.contains("layers_max")) c.layers_4g_max = cp.at("layers_max").get<int>();
    }
    if (j.contains("azimuth_jitter_4g_deg")) c.azimuth_jitter_4g_deg = j.at("azimuth_jitter_4g_deg").get<double>();
    if (j.contains("azimuth_jitter_5g_deg")) c.azimuth_jitter_5g_deg = j.at("azimuth_jitter_5g_deg").get<double>();
    if (j.contains("omni_site_share")) c.omni_site_share = j.at("omni_site_share").get<double>();
    if (j.contains("share_5g_sites")) c.share_5g_sites = j.at("share_5g_sites").get<double>();
    if (j.contains("date_range")) {
      const auto r = j.at("date_range").get<std::vector<std::string>>();
      if (r.size() != 2) throw Error(ErrorCode::InvalidConfig, "date_range needs [first, last]", "date_range");
      c.start_date = Date::parse(r[0]);
      c.n_days = Date::parse(r[1]).days - c.start_date.days + 1;
    }
    if (j.contains("missing_rate")) c.missing_rate = j.at("missing_rate").get<double>();
    if (j.contains("noise_std")) {
      const auto& n = j.at("noise_std");
      if (n.is_number()) {
        c.noise_std.fill(n.get<double>());
      } else {
        for (auto k : kAllKpis)
          if (n.contains(std::string(to_string(k))))
            c.noise_std[static_cast<int>(k)] = n.at(std::string(to_string(k))).get<double>();
      }
    }
    if (j.contains("region_kpi_scale")) c.region_kpi_scale = j.at("region_kpi_scale").get<double>();
    if (j.contains("demand")) {
      const auto& d = j.at("demand");
      if (d.contains("n_bumps")) c.n_bumps = d.at("n_bumps").get<int>();
      if (d.contains("base")) c.base_demand = d.at("base").get<double>();
      if (d.contains("amp_min")) c.bump_amp_min = d.at("amp_min").get<double>();
      if (d.contains("amp_max")) c.bump_amp_max = d.at("amp_max").get<double>();
      if (d.contains("sigma_min_m")) c.bump_sigma_min_m = d.at("sigma_min_m").get<double>();
      if (d.contains("sigma_max_m")) c.bump_sigma_max_m = d.at("sigma_max_m").get<double>();
      if (d.contains("boresight_samples_m"))
        c.boresight_samples_m = d.at("boresight_samples_m").get<std::vector<double>>();
      if (d.contains("weekend_factor")) c.weekend_factor = d.at("weekend_factor").get<double>();
      if (d.contains("day_factor_std")) c.day_factor_std = d.at("day_factor_std").get<double>();
    }
    if (j.contains("kpi_function")) {
      const auto& k = j.at("kpi_function");
      if (k.contains("prb_coeff")) c.prb_coeff = k.at("prb_coeff").get<std::array<double, 2>>();
      if (k.contains("ul_coeff")) c.ul_coeff = k.at("ul_coeff").get<std::array<double, 2>>();
      if (k.contains("dl_coeff")) c.dl_coeff = k.at("dl_coeff").get<std::array<double, 2>>();
      if (k.contains("load_offset")) c.load_offset = k.at("load_offset").get<double>();
    }
    if (j.contains("catalog")) c.catalog = j.at("catalog").get<std::vector<AntennaModelSpec>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what(), "scenario");
  }
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  ScenarioConfig c;
  update_from_json(j, c);
  return c;
}

/// The held-out region used for cross-region checks: a sparser, single-layer
/// city in a disjoint bbox with a 1.5x KPI scale.
inline ScenarioConfig default_region_b() {
  ScenarioConfig c;
  c.seed = 101;
  c.name = "B";
  c.bbox_min = GeoPoint{52.940, -1.175};
  c.bbox_max = GeoPoint{52.975, -1.115};
  c.n_sites = 170;
  c.layers_4g_min = 1;
  c.layers_4g_max = 1;
  c.share_5g_sites = 0.25;
  c.region_kpi_scale = 1.5;
  c.bump_amp_max = 0.9;
  return c;
}

}  // namespace cellgraph::synth

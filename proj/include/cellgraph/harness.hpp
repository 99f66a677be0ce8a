#pragma once

// Experiment orchestration: temporal splits, training, APE/MAPE evaluation,
// checkpoints, cross-region evaluation and the planning benchmark.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cellgraph/data_model.hpp"
#include "cellgraph/error.hpp"
#include "cellgraph/gnn.hpp"
#include "cellgraph/graph_build.hpp"
#include "cellgraph/mlr.hpp"
#include "cellgraph/synth.hpp"

namespace cellgraph::harness {

using nlohmann::json;

inline constexpr double kApeFloor = 1e-3;
inline constexpr int kCheckpointVersion = 1;

struct Dataset {
  std::string name;
  Inventory inventory;
  KpiTable kpis;
};

inline Dataset make_dataset(const synth::Scenario& sc) {
  return Dataset{sc.field.config().name, sc.inventory, synth::generate_kpis(sc)};
}

// ---------------------------------------------------------------------------
// Splits

struct SplitConfig {
  int train_days = 31;         ///< leading days used for training + validation
  double val_fraction = 0.2;   ///< trailing share of the training period used for validation
};

struct SplitSpec {
  std::set<Date> train_dates;
  std::set<Date> val_dates;
  std::set<Date> test_dates;

  void validate() const {
    if (train_dates.empty()) throw Error(ErrorCode::InvalidConfig, "split has no training dates", "split");
    for (const auto& d : val_dates)
      if (train_dates.contains(d)) throw Error(ErrorCode::InvalidConfig, "train/val overlap", "split");
    for (const auto& d : test_dates)
      if (train_dates.contains(d) || val_dates.contains(d))
        throw Error(ErrorCode::InvalidConfig, "test dates overlap training period", "split");
  }
};

/// The first `train_days` distinct dates form the training period, whose last
/// round(val_fraction * train_days) dates are held out for validation; all
/// later dates are test dates.
inline SplitSpec make_split(const std::vector<Date>& dates, const SplitConfig& cfg) {
  if (cfg.train_days < 1) throw Error(ErrorCode::InvalidConfig, "train_days must be >= 1", "train_days");
  if (!(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "val_fraction must be in [0, 1)", "val_fraction");
  std::vector<Date> sorted = dates;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t period = std::min(sorted.size(), static_cast<std::size_t>(cfg.train_days));
  std::size_t n_val = static_cast<std::size_t>(std::lround(cfg.val_fraction * static_cast<double>(period)));
  if (period >= 2 && cfg.val_fraction > 0.0) n_val = std::clamp<std::size_t>(n_val, 1, period - 1);
  else n_val = 0;
  SplitSpec s;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i < period - n_val) s.train_dates.insert(sorted[i]);
    else if (i < period) s.val_dates.insert(sorted[i]);
    else s.test_dates.insert(sorted[i]);
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Models

enum class ModelKind { Gnn, Mlr };

inline std::string_view to_string(ModelKind m) { return m == ModelKind::Gnn ? "gnn" : "mlr"; }

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "gnn") return ModelKind::Gnn;
  if (s == "mlr") return ModelKind::Mlr;
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(s) + "'", "model");
}

struct ExperimentConfig {
  graph::GraphBuildConfig graph;
  gnn::GnnHyperparams gnn;
  double ridge_lambda = 1e-6;
  bool mlr_edge_geometry = true;
  SplitConfig split;
  std::uint64_t seed = 1;
};

/// A fitted single-KPI model together with everything needed to rebuild its inputs.
struct TrainedModel {
  ModelKind kind = ModelKind::Gnn;
  KpiKind kpi = KpiKind::PrbUtil;
  graph::GraphBuildConfig graph;
  NormalizationSpec normalization;
  NodeVocab vocab;
  gnn::GnnHyperparams hyperparams;
  gnn::GnnParameters gnn;
  mlr::MlrParameters mlr;
  std::string model_version;

  double predict_normalized(const graph::PlanningSubgraph& g) const {
    return kind == ModelKind::Gnn ? gnn::forward(gnn, g, hyperparams) : mlr::predict(mlr, g);
  }
  gnn::KpiPrediction predict(const graph::PlanningSubgraph& g) const {
    return gnn::to_physical(predict_normalized(g), kpi, normalization);
  }
};

// ---------------------------------------------------------------------------
// Samples

/// Date-independent topologies for every 5G cell of a dataset.
class Workspace {
 public:
  Workspace(const Dataset& data, const graph::GraphBuildConfig& cfg)
      : data_(&data), cfg_(cfg), index_(data.inventory) {
    for (std::size_t i = 0; i < data.inventory.size(); ++i) {
      if (data.inventory[i].technology != Technology::NR5G) continue;
      targets_.push_back(i);
      topologies_.push_back(graph::build_topology(index_, data.inventory[i], cfg));
    }
  }
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const Dataset& data() const { return *data_; }
  const graph::GraphBuildConfig& config() const { return cfg_; }
  const graph::SpatialIndex& index() const { return index_; }
  const std::vector<graph::SubgraphTopology>& topologies() const { return topologies_; }
  const CellInventoryEntry& target(std::size_t t) const { return data_->inventory[targets_[t]]; }

 private:
  const Dataset* data_;
  graph::GraphBuildConfig cfg_;
  graph::SpatialIndex index_;
  std::vector<std::size_t> targets_;
  std::vector<graph::SubgraphTopology> topologies_;
};

struct SampleEntry {
  std::uint32_t topology = 0;
  Date date;
  const KpiRecord* truth = nullptr;
};

/// One entry per (5G cell, date) with an observed KPI record, in inventory
/// then date order.
inline std::vector<SampleEntry> collect_samples(const Workspace& ws, const std::set<Date>& dates) {
  std::vector<SampleEntry> out;
  for (std::size_t t = 0; t < ws.topologies().size(); ++t)
    for (const auto& d : dates)
      if (const auto* r = ws.data().kpis.find(ws.target(t).cell_id, d))
        out.push_back(SampleEntry{static_cast<std::uint32_t>(t), d, r});
  return out;
}

inline graph::PlanningSubgraph sample_graph(const Workspace& ws, const SampleEntry& e, const NormalizationSpec& spec,
                                            const NodeVocab& vocab) {
  return graph::attach_features(ws.topologies()[e.topology], ws.data().inventory, e.date, ws.data().kpis, spec, vocab,
                                ws.config());
}

// ---------------------------------------------------------------------------
// Evaluation

/// 100 * |pred - truth| / truth. Throws LabelBelowFloor when truth < 1e-3.
inline double ape(double pred, double truth) {
  if (!(truth >= kApeFloor)) throw Error(ErrorCode::LabelBelowFloor, "label below APE floor");
  return 100.0 * std::abs(pred - truth) / truth;
}

/// Linear-interpolation quantile of sorted values.
inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct SampleRow {
  std::string cell_id;
  Date date;
  KpiKind kpi = KpiKind::PrbUtil;
  double pred = 0.0;
  double truth = 0.0;
  std::optional<double> ape;
  bool low_confidence = false;
};

struct EvalReport {
  std::string model;
  std::string kpi;
  std::string region;
  std::size_t n_total = 0;
  std::size_t n_scored = 0;
  std::size_t n_excluded = 0;
  double mape = 0.0;
  double p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
  double low_confidence_share = 0.0;
};

inline EvalReport summarize(const std::vector<SampleRow>& rows, std::string model, std::string kpi, std::string region) {
  EvalReport r{std::move(model), std::move(kpi), std::move(region)};
  std::vector<double> apes;
  std::size_t low = 0;
  for (const auto& s : rows) {
    if (s.ape) apes.push_back(*s.ape);
    if (s.low_confidence) ++low;
  }
  r.n_total = rows.size();
  r.n_scored = apes.size();
  r.n_excluded = r.n_total - r.n_scored;
  if (!apes.empty()) {
    double sum = 0.0;
    for (double a : apes) sum += a;
    r.mape = sum / static_cast<double>(apes.size());
    std::sort(apes.begin(), apes.end());
    r.p25 = quantile(apes, 0.25);
    r.p50 = quantile(apes, 0.50);
    r.p75 = quantile(apes, 0.75);
    r.p95 = quantile(apes, 0.95);
  }
  if (!rows.empty()) r.low_confidence_share = static_cast<double>(low) / static_cast<double>(rows.size());
  return r;
}

inline json to_json(const EvalReport& r) {
  return {{"model", r.model},
          {"kpi", r.kpi},
          {"region", r.region},
          {"n_total", r.n_total},
          {"n_scored", r.n_scored},
          {"n_excluded", r.n_excluded},
          {"mape", r.mape},
          {"ape_quantiles", {{"p25", r.p25}, {"p50", r.p50}, {"p75", r.p75}, {"p95", r.p95}}},
          {"low_confidence_share", r.low_confidence_share}};
}

inline std::vector<SampleRow> predict_samples(const TrainedModel& m, const Workspace& ws,
                                              const std::vector<SampleEntry>& entries) {
  std::vector<SampleRow> rows;
  rows.reserve(entries.size());
  for (const auto& e : entries) {
    const auto g = sample_graph(ws, e, m.normalization, m.vocab);
    SampleRow row;
    row.cell_id = e.truth->cell_id;
    row.date = e.date;
    row.kpi = m.kpi;
    row.pred = m.predict(g).value;
    row.truth = e.truth->value(m.kpi);
    if (row.truth >= kApeFloor) row.ape = ape(row.pred, row.truth);
    row.low_confidence = g.low_confidence;
    rows.push_back(std::move(row));
  }
  return rows;
}

struct EvalResult {
  EvalReport report;
  std::vector<SampleRow> rows;
};

inline EvalResult evaluate(const TrainedModel& m, const Workspace& ws, const std::set<Date>& dates,
                           const std::string& region) {
  EvalResult r;
  r.rows = predict_samples(m, ws, collect_samples(ws, dates));
  r.report = summarize(r.rows, std::string(to_string(m.kind)), std::string(to_string(m.kpi)), region);
  return r;
}

inline void write_sample_dump(std::ostream& out, const std::vector<SampleRow>& rows) {
  out << "cell_id,date,kpi,pred,truth,ape,low_confidence\n";
  for (const auto& r : rows)
    out << r.cell_id << ',' << r.date.iso() << ',' << to_string(r.kpi) << ',' << format_double(r.pred) << ','
        << format_double(r.truth) << ',' << (r.ape ? format_double(*r.ape) : std::string()) << ','
        << (r.low_confidence ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------------------
// Training

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_mape = 0.0;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochLog> epochs;
  int best_epoch = 0;
  EvalResult validation;
  EvalResult test;
  double train_seconds = 0.0;  ///< wall clock; never part of a report
};

inline double validation_mape(const TrainedModel& m, const Workspace& ws, const std::vector<SampleEntry>& val) {
  if (val.empty()) return 0.0;
  return summarize(predict_samples(m, ws, val), "", "", "").mape;
}

inline TrainedModel train_model(const Workspace& ws, ModelKind kind, KpiKind kpi, const SplitSpec& split,
                                const ExperimentConfig& cfg, std::vector<EpochLog>* log = nullptr,
                                int* best_epoch = nullptr) {
  split.validate();
  TrainedModel m;
  m.kind = kind;
  m.kpi = kpi;
  m.graph = ws.config();
  m.normalization = fit_normalization(ws.data().kpis, split.train_dates, ws.data().name);
  m.vocab = fit_vocab(ws.data().inventory);
  m.hyperparams = cfg.gnn;
  const auto train = collect_samples(ws, split.train_dates);
  const auto val = collect_samples(ws, split.val_dates);
  if (train.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no target samples on training dates");
  const std::size_t dim = node_dim(m.vocab);

  if (kind == ModelKind::Mlr) {
    m.mlr.layout = mlr::MlrLayout{m.graph.k, dim, cfg.mlr_edge_geometry, cfg.gnn.distance_scale_m};
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    xs.reserve(train.size());
    for (const auto& e : train) {
      xs.push_back(mlr::assemble_vector(sample_graph(ws, e, m.normalization, m.vocab), m.mlr.layout));
      ys.push_back(m.normalization.apply(kpi, e.truth->value(kpi)));
    }
    m.mlr = mlr::fit(xs, ys, cfg.ridge_lambda, m.mlr.layout);
    if (log) log->push_back(EpochLog{0, 0.0, validation_mape(m, ws, val)});
    if (best_epoch) *best_epoch = 0;
    m.model_version = "mlr-" + std::string(to_string(kpi)) + "-s" + std::to_string(cfg.seed);
    return m;
  }

  cfg.gnn.validate();
  m.gnn = gnn::init_params(cfg.gnn, dim, cfg.seed);
  std::mt19937_64 rng(cfg.seed ^ 0x5bd1e995ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  gnn::TrainState state;
  gnn::GnnParameters best = m.gnn;
  double best_val = std::numeric_limits<double>::infinity();
  int best_at = 0;
  int since_best = 0;
  std::vector<graph::PlanningSubgraph> graphs;
  std::vector<gnn::Sample> batch;
  for (int epoch = 1; epoch <= cfg.gnn.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.gnn.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.gnn.batch_size);
      graphs.clear();
      batch.clear();
      for (std::size_t i = start; i < end; ++i) graphs.push_back(sample_graph(ws, train[order[i]], m.normalization, m.vocab));
      for (std::size_t i = start; i < end; ++i)
        batch.push_back(gnn::Sample{&graphs[i - start], m.normalization.apply(kpi, train[order[i]].truth->value(kpi))});
      loss_sum += gnn::train_step(m.gnn, batch, cfg.gnn, state);
      ++n_batches;
    }
    const double vm = val.empty() ? 0.0 : validation_mape(m, ws, val);
    if (log) log->push_back(EpochLog{epoch, loss_sum / static_cast<double>(n_batches), vm});
    if (vm < best_val) {
      best_val = vm;
      best = m.gnn;
      best_at = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.gnn.early_stop_patience) {
      break;
    }
  }
  m.gnn = std::move(best);
  if (best_epoch) *best_epoch = best_at;
  m.model_version = "gnn-" + std::string(to_string(kpi)) + "-s" + std::to_string(cfg.seed) + "-e" + std::to_string(best_at);
  return m;
}

inline TrainResult run_training(const Dataset& data, ModelKind kind, KpiKind kpi, const SplitSpec& split,
                                const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  Workspace ws(data, cfg.graph);
  TrainResult r;
  r.model = train_model(ws, kind, kpi, split, cfg, &r.epochs, &r.best_epoch);
  r.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.validation = evaluate(r.model, ws, split.val_dates, data.name);
  r.test = evaluate(r.model, ws, split.test_dates, data.name);
  return r;
}

inline json to_json(const std::vector<EpochLog>& log) {
  json a = json::array();
  for (const auto& e : log) a.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_mape", e.val_mape}});
  return a;
}

// ---------------------------------------------------------------------------
// Cross-region evaluation

struct GeneralizationResult {
  TrainedModel model;
  EvalResult region_a;
  EvalResult region_b;
  double gap() const { return region_b.report.mape - region_a.report.mape; }
};

/// Trains on region A only; region B is encoded with region A's normalization
/// and vocabularies and scored on its own test-period dates.
inline GeneralizationResult run_generalization(const Dataset& a, const Dataset& b, ModelKind kind, KpiKind kpi,
                                               const ExperimentConfig& cfg) {
  const auto split_a = make_split(a.kpis.dates(), cfg.split);
  const auto split_b = make_split(b.kpis.dates(), cfg.split);
  Workspace wa(a, cfg.graph);
  Workspace wb(b, cfg.graph);
  GeneralizationResult r;
  r.model = train_model(wa, kind, kpi, split_a, cfg);
  r.region_a = evaluate(r.model, wa, split_a.test_dates, a.name);
  r.region_b = evaluate(r.model, wb, split_b.test_dates, b.name);
  return r;
}

// ---------------------------------------------------------------------------
// Noise floor

/// MAPE of the noiseless ground truth against noisy observations, estimated
/// from `draws` random (5G cell, date) pairs. No model can beat it on average.
inline std::array<double, 3> noise_floor(const synth::Scenario& sc, const std::set<Date>& dates, std::size_t draws,
                                         std::uint64_t seed) {
  std::vector<const CellInventoryEntry*> cells;
  for (const auto& c : sc.inventory)
    if (c.technology == Technology::NR5G) cells.push_back(&c);
  const std::vector<Date> ds(dates.begin(), dates.end());
  if (cells.empty() || ds.empty()) throw Error(ErrorCode::InvalidArgument, "noise floor needs 5G cells and dates");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_cell(0, cells.size() - 1), pick_date(0, ds.size() - 1);
  std::array<double, 3> sum{};
  std::array<std::size_t, 3> n{};
  for (std::size_t i = 0; i < draws; ++i) {
    const auto& cell = *cells[pick_cell(rng)];
    const Date d = ds[pick_date(rng)];
    const auto base = sc.field.base_kpi(cell, d);
    const auto obs = synth::add_noise(base, sc.field.config().noise_std, rng);
    for (auto k : kAllKpis) {
      const auto ki = static_cast<std::size_t>(k);
      if (obs.value(k) < kApeFloor) continue;
      sum[ki] += ape(base.value(k), obs.value(k));
      ++n[ki];
    }
  }
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = n[i] ? sum[i] / static_cast<double>(n[i]) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Planning benchmark

struct BenchReport {
  std::string model;
  std::size_t n_candidates = 0;
  std::size_t n_schemes = 0;
  std::size_t n_predictions = 0;
  double total_s = 0.0;
  double mean_ms = 0.0;
  double p50_ms = 0.0, p95_ms = 0.0, p99_ms = 0.0;
  double checksum = 0.0;  ///< sum of predictions, keeps the work observable
};

inline json to_json(const BenchReport& b) {
  return {{"model", b.model},           {"n_candidates", b.n_candidates}, {"n_schemes", b.n_schemes},
          {"n_predictions", b.n_predictions}, {"total_s", b.total_s},   {"mean_ms", b.mean_ms},
          {"p50_ms", b.p50_ms},         {"p95_ms", b.p95_ms},           {"p99_ms", b.p99_ms}};
}

/// Random candidate 5G cells inside the 4G footprint of `inv`, using antenna
/// models seen on 5G cells of the inventory.
inline std::vector<CellInventoryEntry> random_candidates(const Inventory& inv, std::size_t n, std::mt19937_64& rng) {
  double lat0 = 90, lat1 = -90, lon0 = 180, lon1 = -180;
  std::vector<std::pair<std::string, std::string>> models;
  for (const auto& c : inv) {
    if (c.technology == Technology::LTE4G) {
      lat0 = std::min(lat0, c.position.lat);
      lat1 = std::max(lat1, c.position.lat);
      lon0 = std::min(lon0, c.position.lon);
      lon1 = std::max(lon1, c.position.lon);
    } else {
      models.emplace_back(c.manufacturer, c.antenna_model);
    }
  }
  if (lat0 > lat1) throw Error(ErrorCode::NoFourGCells, "inventory has no 4G cells");
  std::sort(models.begin(), models.end());
  models.erase(std::unique(models.begin(), models.end()), models.end());
  if (models.empty()) models.emplace_back("unknown", "unknown");
  std::uniform_real_distribution<double> ulat(lat0, lat1), ulon(lon0, lon1), uaz(0.0, 360.0);
  std::uniform_int_distribution<std::size_t> umodel(0, models.size() - 1);
  std::vector<CellInventoryEntry> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    CellInventoryEntry c;
    c.cell_id = "CAND" + std::to_string(i);
    c.site_id = c.cell_id;
    const double lat = ulat(rng);
    const double lon = ulon(rng);
    c.position = GeoPoint::make(lat, lon);
    c.azimuth = Azimuth::degrees(uaz(rng));
    c.technology = Technology::NR5G;
    const auto& [man, model] = models[umodel(rng)];
    c.manufacturer = man;
    c.antenna_model = model;
    out.push_back(std::move(c));
  }
  return out;
}

/// Single-threaded loop of n_schemes * n_candidates subgraph builds plus
/// predictions on the latest date of the data; each prediction is timed
/// individually, including its subgraph construction.
inline BenchReport bench_planning(const TrainedModel& m, const Dataset& data, std::size_t n_candidates,
                                  std::size_t n_schemes, std::uint64_t seed) {
  BenchReport b;
  b.model = std::string(to_string(m.kind));
  b.n_candidates = n_candidates;
  b.n_schemes = n_schemes;
  if (n_candidates == 0 || n_schemes == 0) return b;
  const graph::SpatialIndex index(data.inventory);
  const auto dates = data.kpis.dates();
  const Date date = dates.empty() ? Date{} : dates.back();
  std::mt19937_64 rng(seed);
  std::vector<double> ms;
  ms.reserve(n_candidates * n_schemes);
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (std::size_t s = 0; s < n_schemes; ++s) {
    const auto candidates = random_candidates(data.inventory, n_candidates, rng);
    for (const auto& c : candidates) {
      const auto t0 = clock::now();
      const auto g = graph::build_subgraph(index, c, date, data.kpis, m.normalization, m.vocab, m.graph);
      b.checksum += m.predict(g).value;
      ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
    }
  }
  b.total_s = std::chrono::duration<double>(clock::now() - start).count();
  b.n_predictions = ms.size();
  double sum = 0.0;
  for (double v : ms) sum += v;
  b.mean_ms = sum / static_cast<double>(ms.size());
  std::sort(ms.begin(), ms.end());
  b.p50_ms = quantile(ms, 0.50);
  b.p95_ms = quantile(ms, 0.95);
  b.p99_ms = quantile(ms, 0.99);
  return b;
}

// ---------------------------------------------------------------------------
// Checkpoints

inline json to_json(const graph::GraphBuildConfig& g) {
  return {{"k", g.k}, {"target_radius_m", g.target_radius_m}, {"kpi_window_days", g.kpi_window_days}};
}

inline graph::GraphBuildConfig graph_config_from_json(const json& j, graph::GraphBuildConfig g = {}) {
  if (j.contains("k")) g.k = j.at("k").get<std::size_t>();
  if (j.contains("target_radius_m")) g.target_radius_m = j.at("target_radius_m").get<double>();
  if (j.contains("kpi_window_days")) g.kpi_window_days = j.at("kpi_window_days").get<int>();
  g.validate();
  return g;
}

inline std::string_view to_string(FeatureTransform::Kind k) {
  switch (k) {
    case FeatureTransform::Kind::ZScore: return "zscore";
    case FeatureTransform::Kind::Log1pZScore: return "log1p_zscore";
    case FeatureTransform::Kind::UnitInterval: return "unit_interval";
  }
  return "?";
}

inline json to_json(const NormalizationSpec& s) {
  json t = json::object();
  for (auto k : kAllKpis) {
    const auto& f = s[k];
    t[std::string(to_string(k))] = {{"kind", to_string(f.kind)}, {"mean", f.mean}, {"std", f.std}, {"scale", f.scale}};
  }
  return {{"fitted_on", s.fitted_on}, {"transforms", t}};
}

inline NormalizationSpec normalization_from_json(const json& j) {
  NormalizationSpec s;
  s.fitted_on = j.at("fitted_on").get<std::string>();
  for (auto k : kAllKpis) {
    const auto& f = j.at("transforms").at(std::string(to_string(k)));
    auto& t = s.transforms[static_cast<std::size_t>(k)];
    const auto kind = f.at("kind").get<std::string>();
    if (kind == "zscore") t.kind = FeatureTransform::Kind::ZScore;
    else if (kind == "log1p_zscore") t.kind = FeatureTransform::Kind::Log1pZScore;
    else if (kind == "unit_interval") t.kind = FeatureTransform::Kind::UnitInterval;
    else throw Error(ErrorCode::ParseError, "unknown transform kind '" + kind + "'", "normalization");
    t.mean = f.at("mean").get<double>();
    t.std = f.at("std").get<double>();
    t.scale = f.at("scale").get<double>();
  }
  return s;
}

inline json to_json(const TrainedModel& m) {
  json j = {{"format", "cellgraph-checkpoint"},
            {"version", kCheckpointVersion},
            {"model", to_string(m.kind)},
            {"kpi", to_string(m.kpi)},
            {"model_version", m.model_version},
            {"graph", to_json(m.graph)},
            {"normalization", to_json(m.normalization)},
            {"vocab",
             {{"manufacturer", m.vocab.manufacturer.categories}, {"antenna_model", m.vocab.antenna_model.categories}}},
            {"hyperparams", gnn::to_json(m.hyperparams)}};
  j["params"] = m.kind == ModelKind::Gnn ? gnn::to_json(m.gnn) : mlr::to_json(m.mlr);
  return j;
}

inline TrainedModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "cellgraph-checkpoint")
      throw Error(ErrorCode::ParseError, "not a checkpoint file", "format");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error(ErrorCode::ParseError, "unsupported checkpoint version", "version");
    TrainedModel m;
    m.kind = parse_model_kind(j.at("model").get<std::string>());
    m.kpi = parse_kpi_kind(j.at("kpi").get<std::string>());
    m.model_version = j.at("model_version").get<std::string>();
    m.graph = graph_config_from_json(j.at("graph"));
    m.normalization = normalization_from_json(j.at("normalization"));
    m.vocab.manufacturer.categories = j.at("vocab").at("manufacturer").get<std::vector<std::string>>();
    m.vocab.antenna_model.categories = j.at("vocab").at("antenna_model").get<std::vector<std::string>>();
    gnn::update_from_json(j.at("hyperparams"), m.hyperparams);
    const std::size_t dim = node_dim(m.vocab);
    if (m.kind == ModelKind::Gnn) {
      m.gnn = gnn::params_from_json(j.at("params"));
      if (m.gnn.node_dim() != dim) throw Error(ErrorCode::DimensionMismatch, "encoder width does not match vocabulary");
    } else {
      m.mlr = mlr::params_from_json(j.at("params"));
      if (m.mlr.layout.node_dim != dim) throw Error(ErrorCode::DimensionMismatch, "MLR layout does not match vocabulary");
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed checkpoint: ") + e.what(), "checkpoint");
  }
}

inline void save_model(const TrainedModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path, "checkpoint");
  out << to_json(m).dump() << '\n';
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open checkpoint " + path, "checkpoint");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("checkpoint is not JSON: ") + e.what(), "checkpoint");
  }
  return model_from_json(j);
}

}  // namespace cellgraph::harness

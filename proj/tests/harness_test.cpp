#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "cellgraph/harness.hpp"
#include "support.hpp"

using namespace cellgraph;
using namespace cellgraph::harness;

namespace {

std::vector<Date> day_range(int n) {
  std::vector<Date> d;
  for (int i = 0; i < n; ++i) d.push_back(Date::from_ymd(2022, 10, 1) + i);
  return d;
}

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.graph.k = 12;
  cfg.gnn.hidden_dim = 8;
  cfg.gnn.encoder_hidden = {8};
  cfg.gnn.message_hidden = {8};
  cfg.gnn.update_hidden = {8};
  cfg.gnn.readout_hidden = {8};
  cfg.gnn.max_epochs = 2;
  cfg.split = SplitConfig{8, 0.25};
  cfg.seed = 7;
  return cfg;
}

class SmallData : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    scenario_ = new synth::Scenario(synth::generate_scenario(fixtures::small_scenario()));
    data_ = new Dataset(make_dataset(*scenario_));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete scenario_;
  }
  static synth::Scenario* scenario_;
  static Dataset* data_;
};

synth::Scenario* SmallData::scenario_ = nullptr;
Dataset* SmallData::data_ = nullptr;

}  // namespace

TEST(Split, DefaultLayout) {
  const auto s = make_split(day_range(92), SplitConfig{});
  EXPECT_EQ(s.train_dates.size(), 25u);
  EXPECT_EQ(s.val_dates.size(), 6u);
  EXPECT_EQ(s.test_dates.size(), 61u);
  EXPECT_LT(*s.train_dates.rbegin(), *s.val_dates.begin());
  EXPECT_LT(*s.val_dates.rbegin(), *s.test_dates.begin());
}

TEST(Split, UnsortedAndDuplicateDates) {
  auto d = day_range(10);
  std::reverse(d.begin(), d.end());
  d.push_back(d.front());
  const auto s = make_split(d, SplitConfig{5, 0.2});
  EXPECT_EQ(s.train_dates.size(), 4u);
  EXPECT_EQ(s.val_dates.size(), 1u);
  EXPECT_EQ(s.test_dates.size(), 5u);
}

TEST(Split, EdgeCases) {
  const auto one = make_split(day_range(1), SplitConfig{});
  EXPECT_EQ(one.train_dates.size(), 1u);
  EXPECT_TRUE(one.val_dates.empty());
  EXPECT_TRUE(one.test_dates.empty());
  const auto no_val = make_split(day_range(10), SplitConfig{5, 0.0});
  EXPECT_TRUE(no_val.val_dates.empty());
  EXPECT_THROW(make_split(day_range(10), SplitConfig{0, 0.2}), Error);
  EXPECT_THROW(make_split(day_range(10), SplitConfig{5, 1.0}), Error);
  EXPECT_THROW(make_split({}, SplitConfig{}), Error);
  SplitSpec bad;
  bad.train_dates = {Date{1}};
  bad.test_dates = {Date{1}};
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Metrics, ApeAndFloor) {
  EXPECT_DOUBLE_EQ(ape(110.0, 100.0), 10.0);
  EXPECT_DOUBLE_EQ(ape(0.0, 50.0), 100.0);
  EXPECT_DOUBLE_EQ(ape(1e-3, 1e-3), 0.0);
  try {
    ape(1.0, 5e-4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LabelBelowFloor);
  }
}

TEST(Metrics, QuantilesLinearInterpolation) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  EXPECT_DOUBLE_EQ(quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.5), 3.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile(v, 0.95), 4.8);
  EXPECT_DOUBLE_EQ(quantile({10, 20}, 0.25), 12.5);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.9), 7.0);
}

TEST(Metrics, SummarizeExcludesBelowFloor) {
  std::vector<SampleRow> rows(4);
  rows[0].ape = 10.0;
  rows[1].ape = 20.0;
  rows[2].ape = 30.0;
  rows[3].low_confidence = true;  // label below floor, no APE
  const auto r = summarize(rows, "gnn", "prb_util", "A");
  EXPECT_EQ(r.n_total, 4u);
  EXPECT_EQ(r.n_scored, 3u);
  EXPECT_EQ(r.n_excluded, 1u);
  EXPECT_DOUBLE_EQ(r.mape, 20.0);
  EXPECT_DOUBLE_EQ(r.p50, 20.0);
  EXPECT_DOUBLE_EQ(r.low_confidence_share, 0.25);
  const auto j = to_json(r);
  EXPECT_EQ(j["ape_quantiles"]["p50"], 20.0);
  EXPECT_EQ(j["n_excluded"], 1);
}

TEST(ModelKindNames, RoundTrip) {
  EXPECT_EQ(parse_model_kind("gnn"), ModelKind::Gnn);
  EXPECT_EQ(parse_model_kind(to_string(ModelKind::Mlr)), ModelKind::Mlr);
  EXPECT_THROW(parse_model_kind("svm"), Error);
}

TEST_F(SmallData, WorkspaceCoversEveryFiveGCell) {
  Workspace ws(*data_, graph::GraphBuildConfig{});
  std::size_t n5 = 0;
  for (const auto& c : data_->inventory) n5 += c.technology == Technology::NR5G;
  EXPECT_EQ(ws.topologies().size(), n5);
  for (std::size_t t = 0; t < n5; ++t) EXPECT_EQ(ws.topologies()[t].target.cell_id, ws.target(t).cell_id);
  const auto split = make_split(data_->kpis.dates(), SplitConfig{8, 0.25});
  const auto samples = collect_samples(ws, split.test_dates);
  EXPECT_GT(samples.size(), 0u);
  EXPECT_LE(samples.size(), n5 * split.test_dates.size());
  for (const auto& s : samples) EXPECT_TRUE(split.test_dates.contains(s.date));
}

TEST_F(SmallData, MlrTrainsOnTrainingDatesOnly) {
  const auto cfg = small_experiment();
  const auto split = make_split(data_->kpis.dates(), cfg.split);
  Workspace ws(*data_, cfg.graph);
  const auto m = train_model(ws, ModelKind::Mlr, KpiKind::DlThroughput, split, cfg);
  EXPECT_EQ(m.mlr.layout.dimension(), m.mlr.weights.size());
  EXPECT_EQ(m.model_version, "mlr-dl_throughput-s7");

  // the fit satisfies the normal equations of exactly the training samples
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  for (const auto& e : collect_samples(ws, split.train_dates)) {
    xs.push_back(mlr::assemble_vector(sample_graph(ws, e, m.normalization, m.vocab), m.mlr.layout));
    ys.push_back(m.normalization.apply(KpiKind::DlThroughput, e.truth->dl_throughput));
  }
  double worst = 0;
  for (double g : mlr::optimality_residual(m.mlr, xs, ys)) worst = std::max(worst, std::abs(g));
  EXPECT_LT(worst, 1e-6);
}

TEST_F(SmallData, ReportMapeMatchesSampleDump) {
  const auto cfg = small_experiment();
  const auto split = make_split(data_->kpis.dates(), cfg.split);
  const auto r = run_training(*data_, ModelKind::Mlr, KpiKind::UlThroughput, split, cfg);
  std::ostringstream dump;
  write_sample_dump(dump, r.test.rows);
  std::istringstream in(dump.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "cell_id,date,kpi,pred,truth,ape,low_confidence");
  double sum = 0;
  std::size_t n = 0, total = 0;
  while (std::getline(in, line)) {
    ++total;
    const auto f = split_csv_line(line);
    ASSERT_EQ(f.size(), 7u);
    EXPECT_EQ(f[2], "ul_throughput");
    if (f[5].empty()) continue;
    const double pred = *parse_double(f[3]), truth = *parse_double(f[4]);
    EXPECT_NEAR(*parse_double(f[5]), 100.0 * std::abs(pred - truth) / truth, 1e-9);
    sum += *parse_double(f[5]);
    ++n;
  }
  EXPECT_EQ(total, r.test.report.n_total);
  EXPECT_EQ(n, r.test.report.n_scored);
  EXPECT_NEAR(sum / static_cast<double>(n), r.test.report.mape, 1e-9);
}

TEST_F(SmallData, GnnTrainingIsDeterministic) {
  const auto cfg = small_experiment();
  const auto split = make_split(data_->kpis.dates(), cfg.split);
  const auto a = run_training(*data_, ModelKind::Gnn, KpiKind::PrbUtil, split, cfg);
  const auto b = run_training(*data_, ModelKind::Gnn, KpiKind::PrbUtil, split, cfg);
  EXPECT_EQ(a.model.gnn, b.model.gnn);
  EXPECT_EQ(to_json(a.test.report).dump(), to_json(b.test.report).dump());
  EXPECT_EQ(to_json(a.epochs).dump(), to_json(b.epochs).dump());
  EXPECT_GE(a.best_epoch, 1);
  EXPECT_LE(static_cast<int>(a.epochs.size()), cfg.gnn.max_epochs);

  auto other = cfg;
  other.seed = 8;
  const auto c = run_training(*data_, ModelKind::Gnn, KpiKind::PrbUtil, split, other);
  EXPECT_NE(c.model.gnn, a.model.gnn);
}

TEST_F(SmallData, EarlyStoppingKeepsBestEpoch) {
  auto cfg = small_experiment();
  cfg.gnn.max_epochs = 6;
  cfg.gnn.early_stop_patience = 1;
  const auto split = make_split(data_->kpis.dates(), cfg.split);
  const auto r = run_training(*data_, ModelKind::Gnn, KpiKind::DlThroughput, split, cfg);
  double best = std::numeric_limits<double>::infinity();
  int best_at = 0;
  for (const auto& e : r.epochs)
    if (e.val_mape < best) {
      best = e.val_mape;
      best_at = e.epoch;
    }
  EXPECT_EQ(r.best_epoch, best_at);
  EXPECT_NEAR(r.validation.report.mape, best, 1e-9);
  EXPECT_EQ(r.model.model_version, "gnn-dl_throughput-s7-e" + std::to_string(best_at));
}

TEST_F(SmallData, CheckpointRoundTripPredictsIdentically) {
  const auto cfg = small_experiment();
  const auto split = make_split(data_->kpis.dates(), cfg.split);
  Workspace ws(*data_, cfg.graph);
  const auto path = (std::filesystem::temp_directory_path() / "cellgraph_ckpt_test.json").string();
  for (auto kind : {ModelKind::Gnn, ModelKind::Mlr}) {
    const auto m = train_model(ws, kind, KpiKind::PrbUtil, split, cfg);
    save_model(m, path);
    const auto back = load_model(path);
    EXPECT_EQ(back.model_version, m.model_version);
    EXPECT_EQ(to_json(back).dump(), to_json(m).dump());
    const auto a = evaluate(m, ws, split.test_dates, "A");
    const auto b = evaluate(back, ws, split.test_dates, "A");
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].pred, b.rows[i].pred);
  }
  std::remove(path.c_str());
}

TEST(Checkpoint, RejectsMalformed) {
  EXPECT_THROW(model_from_json(json{{"format", "other"}}), Error);
  EXPECT_THROW(model_from_json(json::object()), Error);
  EXPECT_THROW(load_model("/nonexistent/ckpt.json"), Error);
}

TEST_F(SmallData, GeneralizationUsesRegionANormalization) {
  auto cfg_b = fixtures::small_scenario(99);
  cfg_b.name = "B";
  cfg_b.region_kpi_scale = 1.5;
  const auto b = make_dataset(synth::generate_scenario(cfg_b));
  const auto cfg = small_experiment();
  const auto r = run_generalization(*data_, b, ModelKind::Mlr, KpiKind::DlThroughput, cfg);
  EXPECT_EQ(r.model.normalization.fitted_on, data_->name);
  EXPECT_EQ(r.region_b.report.region, "B");
  EXPECT_GT(r.region_b.report.n_total, 0u);
  EXPECT_DOUBLE_EQ(r.gap(), r.region_b.report.mape - r.region_a.report.mape);
}

TEST_F(SmallData, NoiseFloorMatchesNoiseLevel) {
  const auto dates = data_->kpis.dates();
  const auto nf = noise_floor(*scenario_, {dates.begin(), dates.end()}, 20000, 3);
  // E|1/(1+s z) - 1| is roughly s * sqrt(2/pi) for small s
  const auto& s = scenario_->field.config().noise_std;
  for (int k = 1; k < 3; ++k) EXPECT_NEAR(nf[k], 100.0 * s[k] * std::sqrt(2.0 / std::numbers::pi), 1.0);
  EXPECT_EQ(nf, noise_floor(*scenario_, {dates.begin(), dates.end()}, 20000, 3));

  auto quiet = fixtures::small_scenario();
  quiet.noise_std = {0, 0, 0};
  const auto zero = noise_floor(synth::generate_scenario(quiet), {dates.begin(), dates.end()}, 500, 3);
  for (double v : zero) EXPECT_EQ(v, 0.0);
}

TEST_F(SmallData, BenchmarkCountsPredictions) {
  const auto cfg = small_experiment();
  const auto split = make_split(data_->kpis.dates(), cfg.split);
  Workspace ws(*data_, cfg.graph);
  const auto m = train_model(ws, ModelKind::Mlr, KpiKind::PrbUtil, split, cfg);
  const auto b = bench_planning(m, *data_, 20, 3, 1);
  EXPECT_EQ(b.n_predictions, 60u);
  EXPECT_GT(b.mean_ms, 0.0);
  EXPECT_LE(b.p50_ms, b.p99_ms);
  EXPECT_EQ(bench_planning(m, *data_, 20, 3, 1).checksum, b.checksum);

  std::mt19937_64 rng(1);
  for (const auto& c : random_candidates(data_->inventory, 50, rng)) {
    EXPECT_EQ(c.technology, Technology::NR5G);
    EXPECT_FALSE(c.azimuth.is_omni);
  }
}

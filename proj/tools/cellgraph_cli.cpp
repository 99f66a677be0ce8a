// cellgraph command line: generate, train, evaluate, generalize, bench,
// predict, serve. Reports go to stdout as JSON, summaries to stderr.
// Exit codes: 0 ok, 1 usage or validation error, 2 runtime failure.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cellgraph/data_model.hpp"
#include "cellgraph/harness.hpp"
#include "cellgraph/service.hpp"
#include "cellgraph/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cellgraph;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path, "config");
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what(), "config");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message(), "out");
}

/// Config file sections: scenario, scenario_b, split, model, hyperparams, seed.
struct Config {
  json raw = json::object();
  std::optional<std::uint64_t> seed_override;

  json section(const char* name) const { return raw.contains(name) ? raw.at(name) : json::object(); }

  std::uint64_t seed() const {
    if (seed_override) return *seed_override;
    return raw.contains("seed") ? raw.at("seed").get<std::uint64_t>() : 1;
  }

  synth::ScenarioConfig scenario(const char* name = "scenario") const {
    synth::ScenarioConfig c = std::string(name) == "scenario_b" ? synth::default_region_b() : synth::ScenarioConfig{};
    synth::update_from_json(section(name), c);
    if (seed_override && std::string(name) == "scenario") c.seed = *seed_override;
    synth::validate(c);
    return c;
  }

  harness::ExperimentConfig experiment() const {
    harness::ExperimentConfig e;
    e.seed = seed();
    const auto split = section("split");
    try {
      if (split.contains("train_days")) e.split.train_days = split.at("train_days").get<int>();
      if (split.contains("val_fraction")) e.split.val_fraction = split.at("val_fraction").get<double>();
      const auto model = section("model");
      if (model.contains("graph")) e.graph = harness::graph_config_from_json(model.at("graph"), e.graph);
      if (model.contains("ridge_lambda")) e.ridge_lambda = model.at("ridge_lambda").get<double>();
      if (model.contains("mlr_edge_geometry")) e.mlr_edge_geometry = model.at("mlr_edge_geometry").get<bool>();
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::InvalidConfig, ex.what(), "config");
    }
    gnn::update_from_json(section("hyperparams"), e.gnn);
    return e;
  }
};

Config load_config(const std::string& path) {
  Config c;
  if (!path.empty()) c.raw = read_json_file(path);
  if (!c.raw.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object", "config");
  return c;
}

harness::Dataset load_data_dir(const std::string& dir, const std::string& name) {
  const fs::path p(dir);
  return harness::Dataset{name, load_inventory((p / "inventory.csv").string()), load_kpis((p / "kpi.csv").string())};
}

/// Data from --data when given, otherwise generated from the config scenario.
harness::Dataset dataset_for(const std::string& data_dir, const Config& cfg, const char* section = "scenario") {
  if (!data_dir.empty()) return load_data_dir(data_dir, fs::path(data_dir).filename().string());
  return harness::make_dataset(synth::generate_scenario(cfg.scenario(section)));
}

void emit(const json& report) { std::cout << report.dump(2) << '\n'; }

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_generate(const Config& cfg, const std::string& out, const std::string& region) {
  const auto sc_cfg = cfg.scenario(region == "b" ? "scenario_b" : "scenario");
  const auto sc = synth::generate_scenario(sc_cfg);
  const auto kpis = synth::generate_kpis(sc);
  ensure_dir(out);
  const fs::path dir(out);
  {
    std::ofstream f(dir / "inventory.csv");
    write_inventory(f, sc.inventory);
  }
  {
    std::ofstream f(dir / "kpi.csv");
    write_kpis(f, kpis);
  }
  write_text(dir / "scenario.json", synth::to_json(sc_cfg).dump(2) + "\n");
  std::size_t n4 = 0, n5 = 0;
  for (const auto& c : sc.inventory) (c.technology == Technology::LTE4G ? n4 : n5)++;
  emit({{"command", "generate"},
        {"scenario", sc_cfg.name},
        {"seed", sc_cfg.seed},
        {"cells_4g", n4},
        {"cells_5g", n5},
        {"kpi_records", kpis.size()},
        {"files", {"inventory.csv", "kpi.csv", "scenario.json"}}});
  std::cerr << "generated " << n4 << " 4G and " << n5 << " 5G cells, " << kpis.size() << " KPI records in " << out
            << '\n';
  return 0;
}

json split_json(const harness::SplitSpec& s) {
  auto range = [](const std::set<Date>& d) {
    return d.empty() ? json(nullptr) : json{{"first", d.begin()->iso()}, {"last", d.rbegin()->iso()}, {"days", d.size()}};
  };
  return {{"train", range(s.train_dates)}, {"val", range(s.val_dates)}, {"test", range(s.test_dates)}};
}

void write_outputs(const std::string& out, const json& report, const std::vector<harness::SampleRow>& rows,
                   const json& timing) {
  if (out.empty()) return;
  const fs::path dir(out);
  write_text(dir / "report.json", report.dump(2) + "\n");
  std::ofstream samples(dir / "samples.csv");
  harness::write_sample_dump(samples, rows);
  if (!timing.is_null()) write_text(dir / "timing.json", timing.dump(2) + "\n");
}

int cmd_train(const Config& cfg, const std::string& data_dir, const std::string& model, const std::string& kpi,
              const std::string& out, std::optional<int> epochs) {
  auto exp = cfg.experiment();
  if (epochs) exp.gnn.max_epochs = *epochs;
  const auto kind = harness::parse_model_kind(model);
  const auto k = parse_kpi_kind(kpi);
  const auto data = dataset_for(data_dir, cfg);
  const auto split = harness::make_split(data.kpis.dates(), exp.split);
  const auto r = harness::run_training(data, kind, k, split, exp);
  json report = {{"command", "train"},
                 {"model", model},
                 {"kpi", kpi},
                 {"seed", exp.seed},
                 {"model_version", r.model.model_version},
                 {"split", split_json(split)},
                 {"best_epoch", r.best_epoch},
                 {"epochs", harness::to_json(r.epochs)},
                 {"validation", harness::to_json(r.validation.report)},
                 {"test", harness::to_json(r.test.report)}};
  if (!out.empty()) {
    ensure_dir(out);
    harness::save_model(r.model, (fs::path(out) / "checkpoint.json").string());
    write_outputs(out, report, r.test.rows, json{{"train_seconds", r.train_seconds}});
  }
  emit(report);
  std::cerr << model << " " << kpi << ": test MAPE " << fmt(r.test.report.mape) << "% over " << r.test.report.n_scored
            << " samples (best epoch " << r.best_epoch << ")\n";
  return 0;
}

int cmd_evaluate(const Config& cfg, const std::string& checkpoint, const std::string& data_dir,
                 const std::string& out) {
  const auto m = harness::load_model(checkpoint);
  const auto exp = cfg.experiment();
  const auto data = dataset_for(data_dir, cfg);
  const auto split = harness::make_split(data.kpis.dates(), exp.split);
  harness::Workspace ws(data, m.graph);
  const auto r = harness::evaluate(m, ws, split.test_dates, data.name);
  json report = {{"command", "evaluate"},
                 {"model_version", m.model_version},
                 {"split", split_json(split)},
                 {"test", harness::to_json(r.report)}};
  if (!out.empty()) {
    ensure_dir(out);
    write_outputs(out, report, r.rows, nullptr);
  }
  emit(report);
  std::cerr << "test MAPE " << fmt(r.report.mape) << "% over " << r.report.n_scored << " samples\n";
  return 0;
}

int cmd_generalize(const Config& cfg, const std::string& data_a, const std::string& data_b, const std::string& model,
                   const std::string& kpi, const std::string& out, std::optional<int> epochs) {
  auto exp = cfg.experiment();
  if (epochs) exp.gnn.max_epochs = *epochs;
  const auto kind = harness::parse_model_kind(model);
  const auto k = parse_kpi_kind(kpi);
  const auto a = dataset_for(data_a, cfg, "scenario");
  const auto b = dataset_for(data_b, cfg, "scenario_b");
  const auto r = harness::run_generalization(a, b, kind, k, exp);
  json report = {{"command", "generalize"},
                 {"model", model},
                 {"kpi", kpi},
                 {"seed", exp.seed},
                 {"region_a", harness::to_json(r.region_a.report)},
                 {"region_b", harness::to_json(r.region_b.report)},
                 {"mape_gap", r.gap()}};
  if (!out.empty()) {
    ensure_dir(out);
    auto rows = r.region_a.rows;
    rows.insert(rows.end(), r.region_b.rows.begin(), r.region_b.rows.end());
    write_outputs(out, report, rows, nullptr);
  }
  emit(report);
  std::cerr << model << " " << kpi << ": MAPE A " << fmt(r.region_a.report.mape) << "%, B "
            << fmt(r.region_b.report.mape) << "%, gap " << fmt(r.gap()) << " pp\n";
  return 0;
}

int cmd_bench(const Config& cfg, const std::string& checkpoint, const std::string& data_dir, std::size_t candidates,
              std::size_t schemes) {
  const auto m = harness::load_model(checkpoint);
  const auto data = dataset_for(data_dir, cfg);
  const auto b = harness::bench_planning(m, data, candidates, schemes, cfg.seed());
  emit({{"command", "bench"}, {"bench", harness::to_json(b)}});
  std::cerr << b.n_predictions << " predictions, mean " << fmt(b.mean_ms) << " ms, total " << fmt(b.total_s) << " s\n";
  return 0;
}

std::unique_ptr<service::Planner> make_planner(const Config& cfg, const std::vector<std::string>& checkpoints,
                                               const std::string& data_dir) {
  if (checkpoints.size() != 3)
    throw UsageError("--checkpoints needs three files: prb_util, ul_throughput, dl_throughput");
  std::array<harness::TrainedModel, 3> models;
  for (const auto& path : checkpoints) {
    auto m = harness::load_model(path);
    models[static_cast<std::size_t>(m.kpi)] = std::move(m);
  }
  return std::make_unique<service::Planner>(dataset_for(data_dir, cfg), std::move(models));
}

struct PredictFlags {
  std::string request_file;
  std::optional<double> lat, lon, azimuth;
  bool omni = false;
  std::string manufacturer, antenna_model, date;
};

int cmd_predict(const Config& cfg, const std::vector<std::string>& checkpoints, const std::string& data_dir,
                const PredictFlags& f) {
  json body = f.request_file.empty() ? json::object() : read_json_file(f.request_file);
  if (f.lat) body["lat"] = *f.lat;
  if (f.lon) body["lon"] = *f.lon;
  if (f.azimuth) body["azimuth_deg"] = *f.azimuth;
  if (f.omni) body["is_omni"] = true;
  if (!f.manufacturer.empty()) body["manufacturer"] = f.manufacturer;
  if (!f.antenna_model.empty()) body["antenna_model"] = f.antenna_model;
  if (!f.date.empty()) body["date"] = f.date;
  const auto planner = make_planner(cfg, checkpoints, data_dir);
  const auto resp = service::predict_json(*planner, body);
  std::cout << resp.dump() << '\n';
  std::cerr << "prb " << fmt(resp["prb_util_pct"].get<double>()) << "%, ul " << fmt(resp["ul_thr_mbps"].get<double>())
            << " Mbps, dl " << fmt(resp["dl_thr_mbps"].get<double>()) << " Mbps"
            << (resp["low_confidence"].get<bool>() ? " (low confidence)" : "") << '\n';
  return 0;
}

int cmd_serve(const Config& cfg, const std::vector<std::string>& checkpoints, const std::string& data_dir,
              const std::string& host, int port) {
  const auto planner = make_planner(cfg, checkpoints, data_dir);
  service::Server server(*planner);
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  const int bound = port == 0 ? server.bind_to_any_port(host) : port;
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  watcher.detach();
  std::cerr << "serving on " << host << ":" << bound << '\n';
  std::cout << json{{"command", "serve"}, {"host", host}, {"port", bound}}.dump() << std::endl;
  const bool ok = port == 0 ? server.listen_after_bind() : server.listen(host, port);
  if (!ok) throw Error(ErrorCode::Io, "cannot listen on " + host + ":" + std::to_string(port));
  std::cerr << "shut down\n";
  return 0;
}

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateCellId:
    case ErrorCode::InconsistentSitePosition:
    case ErrorCode::DuplicateRecord:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cellgraph: graph-based KPI prediction for candidate 5G cells"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the config seed");

  std::string out, data, data_b, model = "gnn", kpi = "dl_throughput", checkpoint, region = "a", host = "127.0.0.1";
  std::optional<int> epochs;
  std::size_t candidates = 8000, schemes = 10;
  int port = 8080;
  std::vector<std::string> checkpoints;
  PredictFlags pf;

  auto* gen = app.add_subcommand("generate", "write a synthetic scenario");
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--region", region, "a or b (scenario or scenario_b section)")->check(CLI::IsMember({"a", "b"}));

  auto* train = app.add_subcommand("train", "train one single-KPI model");
  train->add_option("--data", data, "directory with inventory.csv and kpi.csv (default: generate from config)");
  train->add_option("--model", model)->check(CLI::IsMember({"gnn", "mlr"}));
  train->add_option("--kpi", kpi)->check(CLI::IsMember({"prb_util", "ul_throughput", "dl_throughput"}));
  train->add_option("--out", out, "directory for checkpoint.json, report.json, samples.csv");
  train->add_option("--epochs", epochs, "override max_epochs");

  auto* eval = app.add_subcommand("evaluate", "score a checkpoint on the test dates");
  eval->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  eval->add_option("--data", data);
  eval->add_option("--out", out);

  auto* genz = app.add_subcommand("generalize", "train on region A, score on A and B");
  genz->add_option("--data-a", data);
  genz->add_option("--data-b", data_b);
  genz->add_option("--model", model)->check(CLI::IsMember({"gnn", "mlr"}));
  genz->add_option("--kpi", kpi)->check(CLI::IsMember({"prb_util", "ul_throughput", "dl_throughput"}));
  genz->add_option("--out", out);
  genz->add_option("--epochs", epochs);

  auto* bench = app.add_subcommand("bench", "time subgraph construction plus prediction");
  bench->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  bench->add_option("--data", data);
  bench->add_option("--candidates", candidates);
  bench->add_option("--schemes", schemes);

  auto* pred = app.add_subcommand("predict", "predict the three KPIs for one candidate");
  pred->add_option("--checkpoints", checkpoints, "three checkpoints, one per KPI")->required();
  pred->add_option("--data", data);
  pred->add_option("--request", pf.request_file, "WhatIfRequest JSON file")->check(CLI::ExistingFile);
  pred->add_option("--lat", pf.lat);
  pred->add_option("--lon", pf.lon);
  pred->add_option("--azimuth", pf.azimuth);
  pred->add_flag("--omni", pf.omni);
  pred->add_option("--manufacturer", pf.manufacturer);
  pred->add_option("--antenna-model", pf.antenna_model);
  pred->add_option("--date", pf.date);

  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  serve->add_option("--checkpoints", checkpoints)->required();
  serve->add_option("--data", data);
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc != 0) std::cerr << app.help();
    return rc == 0 ? 0 : 1;
  }

  try {
    auto cfg = load_config(config_path);
    cfg.seed_override = seed;
    if (*gen) return cmd_generate(cfg, out, region);
    if (*train) return cmd_train(cfg, data, model, kpi, out, epochs);
    if (*eval) return cmd_evaluate(cfg, checkpoint, data, out);
    if (*genz) return cmd_generalize(cfg, data, data_b, model, kpi, out, epochs);
    if (*bench) return cmd_bench(cfg, checkpoint, data, candidates, schemes);
    if (*pred) return cmd_predict(cfg, checkpoints, data, pf);
    if (*serve) return cmd_serve(cfg, checkpoints, data, host, port);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 1;
  } catch (const service::RequestError& e) {
    std::cerr << "error: " << e.to_json().dump() << '\n';
    return e.status() == 400 ? 1 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what();
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    if (e.line()) std::cerr << " (line " << e.line() << ")";
    std::cerr << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(CELLGRAPH_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    char tmpl[] = "/tmp/cellgraph_cli_XXXXXX";
    dir_ = mkdtemp(tmpl);
    config_ = dir_ / "config.json";
    std::ofstream(config_) << json{
        {"seed", 3},
        {"scenario",
         {{"n_sites", 40}, {"region_bbox", {51.5, -0.125, 51.512, -0.105}}, {"date_range", {"2022-10-01", "2022-10-14"}}}},
        {"split", {{"train_days", 8}, {"val_fraction", 0.25}}},
        {"model", {{"graph", {{"k", 12}}}}},
        {"hyperparams", {{"hidden_dim", 8}, {"encoder_hidden", {8}}, {"message_hidden", {8}},
                         {"update_hidden", {8}}, {"readout_hidden", {8}}, {"max_epochs", 2}}}}
                                .dump(2);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string cfg() const { return "--config " + config_.string(); }

  fs::path dir_;
  fs::path config_;
};

}  // namespace

TEST_F(Cli, GenerateWritesFiles) {
  const auto r = run(cfg() + " generate --out " + (dir_ / "data").string());
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["command"], "generate");
  EXPECT_GT(j["cells_5g"].get<int>(), 0);
  for (const char* f : {"inventory.csv", "kpi.csv", "scenario.json"}) EXPECT_TRUE(fs::exists(dir_ / "data" / f)) << f;
  EXPECT_EQ(json::parse(slurp(dir_ / "data" / "scenario.json"))["n_sites"], 40);
}

TEST_F(Cli, TrainEvaluateIsByteDeterministic) {
  ASSERT_EQ(run(cfg() + " generate --out " + (dir_ / "data").string()).code, 0);
  for (const char* run_name : {"r1", "r2"}) {
    const auto out = dir_ / run_name;
    const auto t = run(cfg() + " train --data " + (dir_ / "data").string() + " --model gnn --kpi ul_throughput --out " +
                       out.string());
    ASSERT_EQ(t.code, 0);
    const auto e = run(cfg() + " evaluate --data " + (dir_ / "data").string() + " --checkpoint " +
                       (out / "checkpoint.json").string() + " --out " + (out / "eval").string());
    ASSERT_EQ(e.code, 0);
    EXPECT_TRUE(fs::exists(out / "timing.json"));
  }
  for (const char* f : {"checkpoint.json", "report.json", "samples.csv", "eval/report.json", "eval/samples.csv"})
    EXPECT_EQ(slurp(dir_ / "r1" / f), slurp(dir_ / "r2" / f)) << f;
  // evaluating the saved checkpoint reproduces the training-time test report
  const auto train_report = json::parse(slurp(dir_ / "r1" / "report.json"));
  const auto eval_report = json::parse(slurp(dir_ / "r1" / "eval" / "report.json"));
  EXPECT_EQ(train_report["test"], eval_report["test"]);
  EXPECT_EQ(slurp(dir_ / "r1" / "samples.csv"), slurp(dir_ / "r1" / "eval" / "samples.csv"));
}

TEST_F(Cli, PredictFromCheckpoints) {
  ASSERT_EQ(run(cfg() + " generate --out " + (dir_ / "data").string()).code, 0);
  std::string ckpts;
  for (const char* kpi : {"prb_util", "ul_throughput", "dl_throughput"}) {
    const auto out = dir_ / kpi;
    ASSERT_EQ(run(cfg() + " train --data " + (dir_ / "data").string() + " --model mlr --kpi " + kpi + " --out " +
                  out.string())
                  .code,
              0);
    ckpts += " " + (out / "checkpoint.json").string();
  }
  const std::string base = cfg() + " predict --data " + (dir_ / "data").string() + " --checkpoints" + ckpts;
  auto r = run(base + " --lat 51.506 --lon -0.115 --azimuth 90 --manufacturer Ericsson --antenna-model AIR6449");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j.contains("prb_util_pct"));
  EXPECT_EQ(j["neighbors"].size(), 12u);

  r = run(base + " --lat 95 --lon -0.115 --azimuth 90 --manufacturer Ericsson --antenna-model AIR6449");
  EXPECT_EQ(r.code, 1);
  r = run(base + " --lat 40 --lon -74 --azimuth 90 --manufacturer Ericsson --antenna-model AIR6449");
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("train --model svm").code, 1);
  std::ofstream(dir_ / "bad.json") << R"({"scenario": {"n_sites": 0}})";
  EXPECT_EQ(run("--config " + (dir_ / "bad.json").string() + " generate --out " + (dir_ / "x").string()).code, 1);
  std::ofstream(dir_ / "broken.json") << "{ not json";
  EXPECT_EQ(run("--config " + (dir_ / "broken.json").string() + " generate --out " + (dir_ / "x").string()).code, 1);
}

TEST_F(Cli, MalformedDataIsAValidationError) {
  fs::create_directories(dir_ / "bad");
  std::ofstream(dir_ / "bad" / "inventory.csv")
      << "cell_id,site_id,lat,lon,azimuth_deg,is_omni,technology,manufacturer,antenna_model\nC1,S1,95,0,0,0,4G,E,M\n";
  std::ofstream(dir_ / "bad" / "kpi.csv") << "cell_id,date,prb_util_pct,ul_thr_mbps,dl_thr_mbps\n";
  EXPECT_EQ(run(cfg() + " train --data " + (dir_ / "bad").string() + " --model mlr --kpi prb_util").code, 1);
}

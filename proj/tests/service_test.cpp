#include <gtest/gtest.h>

#include <future>
#include <thread>

#include "cellgraph/service.hpp"
#include "support.hpp"

using namespace cellgraph;
using namespace cellgraph::service;

namespace {

std::array<harness::TrainedModel, 3> train_all(const harness::Dataset& data) {
  harness::ExperimentConfig cfg;
  cfg.graph.k = 12;
  cfg.split = harness::SplitConfig{8, 0.25};
  const auto split = harness::make_split(data.kpis.dates(), cfg.split);
  harness::Workspace ws(data, cfg.graph);
  std::array<harness::TrainedModel, 3> out;
  for (auto k : kAllKpis) out[static_cast<std::size_t>(k)] = harness::train_model(ws, harness::ModelKind::Mlr, k, split, cfg);
  return out;
}

json request_at(double lat, double lon, double az = 90.0) {
  return {{"lat", lat}, {"lon", lon}, {"azimuth_deg", az}, {"manufacturer", "Ericsson"}, {"antenna_model", "AIR6449"}};
}

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto data = harness::make_dataset(synth::generate_scenario(fixtures::small_scenario()));
    auto models = train_all(data);
    planner_ = new Planner(std::move(data), std::move(models));
    server_ = new Server(*planner_);
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = new std::thread([] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }
  static void TearDownTestSuite() {
    server_->stop();
    thread_->join();
    delete thread_;
    delete server_;
    delete planner_;
  }

  static httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(30, 0);
    return c;
  }

  static std::pair<int, json> post(const json& body) {
    auto c = client();
    auto r = c.Post("/predict", body.dump(), "application/json");
    if (!r) return {0, json()};
    return {r->status, json::parse(r->body)};
  }

  static Planner* planner_;
  static Server* server_;
  static std::thread* thread_;
  static int port_;
};

Planner* ServiceTest::planner_ = nullptr;
Server* ServiceTest::server_ = nullptr;
std::thread* ServiceTest::thread_ = nullptr;
int ServiceTest::port_ = 0;

}  // namespace

TEST(ParseRequest, Valid) {
  const auto r = parse_request(request_at(51.5, -0.1, 360.0));
  EXPECT_EQ(r.azimuth_deg, 0.0);
  EXPECT_FALSE(r.is_omni);
  EXPECT_FALSE(r.date.has_value());
  auto j = request_at(51.5, -0.1);
  j.erase("azimuth_deg");
  j["is_omni"] = true;
  j["date"] = "2022-10-05";
  const auto o = parse_request(j);
  EXPECT_TRUE(o.is_omni);
  EXPECT_EQ(o.date->iso(), "2022-10-05");
}

TEST(ParseRequest, CollectsAllFieldErrors) {
  const json j{{"lat", 95}, {"lon", "x"}, {"manufacturer", ""}, {"date", "yesterday"}};
  try {
    parse_request(j);
    FAIL();
  } catch (const RequestError& e) {
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.code(), "ValidationError");
    std::set<std::string> fields;
    for (const auto& f : e.fields()) fields.insert(f.field);
    EXPECT_EQ(fields, (std::set<std::string>{"lat", "lon", "azimuth_deg", "manufacturer", "antenna_model", "date"}));
    EXPECT_EQ(e.to_json()["fields"].size(), 6u);
  }
  EXPECT_THROW(parse_request(json::array()), RequestError);
}

TEST(ParseBbox, Validation) {
  const auto [lo, hi] = parse_bbox("51.5,-0.2,51.6,-0.1");
  EXPECT_EQ(lo.lat, 51.5);
  EXPECT_EQ(hi.lon, -0.1);
  for (const char* bad : {"1,2,3", "a,b,c,d", "51.6,-0.2,51.5,-0.1", "-95,0,0,1", "0,0,1,200"})
    EXPECT_THROW(parse_bbox(bad), RequestError) << bad;
}

TEST_F(ServiceTest, Health) {
  auto c = client();
  auto r = c.Get("/health");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  const auto j = json::parse(r->body);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["model_version"], planner_->model_version());
  EXPECT_EQ(planner_->model_version(), "mlr-prb_util-s1+mlr-ul_throughput-s1+mlr-dl_throughput-s1");
}

TEST_F(ServiceTest, CellsInBbox) {
  auto c = client();
  auto r = c.Get("/cells?bbox=-90,-180,90,180");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  auto j = json::parse(r->body);
  EXPECT_EQ(j["count"], planner_->data().inventory.size());
  EXPECT_FALSE(j["truncated"]);
  const auto& first = j["cells"][0];
  for (const char* key : {"cell_id", "site_id", "lat", "lon", "azimuth_deg", "is_omni", "technology"})
    EXPECT_TRUE(first.contains(key)) << key;

  r = c.Get("/cells?bbox=10,10,10.1,10.1");
  ASSERT_TRUE(r);
  EXPECT_EQ(json::parse(r->body)["count"], 0);

  r = c.Get("/cells?bbox=51.6,-0.1,51.5,-0.2");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["fields"][0]["field"], "bbox");

  r = c.Get("/cells");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
}

TEST_F(ServiceTest, PredictHappyPath) {
  const auto [status, j] = post(request_at(51.506, -0.115));
  ASSERT_EQ(status, 200);
  for (const char* key : {"prb_util_pct", "ul_thr_mbps", "dl_thr_mbps"}) {
    ASSERT_TRUE(j.contains(key)) << key;
    EXPECT_GE(j[key].get<double>(), 0.0);
    EXPECT_TRUE(j["clipped"].contains(key));
  }
  EXPECT_LE(j["prb_util_pct"].get<double>(), 100.0);
  EXPECT_EQ(j["date"], planner_->latest_date().iso());
  EXPECT_EQ(j["model_version"], planner_->model_version());
  EXPECT_FALSE(j["low_confidence"]);
  ASSERT_EQ(j["neighbors"].size(), 12u);
  double prev = 0;
  bool any_linked = false;
  for (const auto& n : j["neighbors"]) {
    EXPECT_GE(n["d_m"].get<double>(), prev);
    prev = n["d_m"].get<double>();
    any_linked |= n["linked_to_target"].get<bool>();
    if (n["linked_to_target"]) {
      EXPECT_LE(n["d_m"].get<double>(), 500.0);
    }
  }
  EXPECT_TRUE(any_linked);
  // same answer as the in-process entry point
  EXPECT_EQ(j, predict_json(*planner_, request_at(51.506, -0.115)));
}

TEST_F(ServiceTest, PredictValidationErrors) {
  auto [status, j] = post(request_at(95.0, -0.1));
  EXPECT_EQ(status, 400);
  EXPECT_EQ(j["code"], "ValidationError");
  EXPECT_EQ(j["fields"][0]["field"], "lat");

  auto bad_date = request_at(51.506, -0.115);
  bad_date["date"] = "2030-01-01";
  std::tie(status, j) = post(bad_date);
  EXPECT_EQ(status, 400);
  EXPECT_EQ(j["fields"][0]["field"], "date");

  auto c = client();
  auto r = c.Post("/predict", "{not json", "application/json");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["code"], "InvalidRequest");
}

TEST_F(ServiceTest, FarCandidates) {
  // ~3 km away: still answered but flagged
  auto [status, j] = post(request_at(51.535, -0.115));
  EXPECT_EQ(status, 200);
  EXPECT_TRUE(j["low_confidence"]);
  std::size_t linked = 0;
  for (const auto& n : j["neighbors"]) linked += n["linked_to_target"].get<bool>();
  EXPECT_EQ(linked, 1u);
  // another continent
  std::tie(status, j) = post(request_at(40.0, -74.0));
  EXPECT_EQ(status, 422);
  EXPECT_EQ(j["code"], "NoFourGCells");
}

TEST_F(ServiceTest, ConcurrentRequestsAreIdempotent) {
  const auto expected = predict_json(*planner_, request_at(51.504, -0.11, 200.0));
  std::vector<std::future<std::pair<int, json>>> fs;
  for (int i = 0; i < 16; ++i)
    fs.push_back(std::async(std::launch::async, [] { return post(request_at(51.504, -0.11, 200.0)); }));
  for (auto& f : fs) {
    const auto [status, j] = f.get();
    EXPECT_EQ(status, 200);
    EXPECT_EQ(j, expected);
  }
}

TEST(PlannerSetup, RejectsMisorderedModels) {
  auto data = harness::make_dataset(synth::generate_scenario(fixtures::small_scenario()));
  auto models = train_all(data);
  std::swap(models[0], models[1]);
  EXPECT_THROW(Planner(std::move(data), std::move(models)), Error);
}

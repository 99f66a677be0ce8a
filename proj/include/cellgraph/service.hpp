#pragma once

// What-if planner and its HTTP front end.
//
//   GET  /health
//   GET  /cells?bbox=minlat,minlon,maxlat,maxlon
//   POST /predict        WhatIfRequest -> WhatIfResponse
//
// Errors are JSON objects {code, message, fields?}.

#include <array>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "cellgraph/data_model.hpp"
#include "cellgraph/error.hpp"
#include "cellgraph/graph_build.hpp"
#include "cellgraph/harness.hpp"

namespace cellgraph::service {

using nlohmann::json;

inline constexpr std::size_t kMaxCells = 10000;

struct FieldError {
  std::string field;
  std::string message;
};

/// A request-level failure with an HTTP status.
class RequestError : public std::runtime_error {
 public:
  RequestError(int status, std::string code, std::string message, std::vector<FieldError> fields = {})
      : std::runtime_error(message), status_(status), code_(std::move(code)), fields_(std::move(fields)) {}

  int status() const { return status_; }
  const std::string& code() const { return code_; }
  const std::vector<FieldError>& fields() const { return fields_; }

  json to_json() const {
    json j = {{"code", code_}, {"message", what()}};
    if (!fields_.empty()) {
      json f = json::array();
      for (const auto& e : fields_) f.push_back({{"field", e.field}, {"message", e.message}});
      j["fields"] = f;
    }
    return j;
  }

 private:
  int status_;
  std::string code_;
  std::vector<FieldError> fields_;
};

struct WhatIfRequest {
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> azimuth_deg;
  bool is_omni = false;
  std::string manufacturer;
  std::string antenna_model;
  std::optional<Date> date;
};

/// Validates a request body, collecting every field error before failing.
inline WhatIfRequest parse_request(const json& j) {
  if (!j.is_object()) throw RequestError(400, "InvalidRequest", "request body must be a JSON object");
  WhatIfRequest r;
  std::vector<FieldError> errs;
  auto number = [&](const char* key, double lo, double hi, bool required) -> std::optional<double> {
    if (!j.contains(key) || j.at(key).is_null()) {
      if (required) errs.push_back({key, "required"});
      return std::nullopt;
    }
    if (!j.at(key).is_number()) {
      errs.push_back({key, "must be a number"});
      return std::nullopt;
    }
    const double v = j.at(key).get<double>();
    if (!(v >= lo && v <= hi)) {
      errs.push_back({key, "out of range"});
      return std::nullopt;
    }
    return v;
  };
  auto text = [&](const char* key) {
    if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
      errs.push_back({key, "required non-empty string"});
      return std::string();
    }
    return j.at(key).get<std::string>();
  };
  if (auto v = number("lat", -90.0, 90.0, true)) r.lat = *v;
  if (auto v = number("lon", -180.0, 180.0, true)) r.lon = *v;
  if (j.contains("is_omni") && !j.at("is_omni").is_null()) {
    if (j.at("is_omni").is_boolean()) r.is_omni = j.at("is_omni").get<bool>();
    else errs.push_back({"is_omni", "must be a boolean"});
  }
  r.azimuth_deg = number("azimuth_deg", 0.0, 360.0, !r.is_omni);
  if (r.azimuth_deg && *r.azimuth_deg == 360.0) r.azimuth_deg = 0.0;
  r.manufacturer = text("manufacturer");
  r.antenna_model = text("antenna_model");
  if (j.contains("date") && !j.at("date").is_null()) {
    try {
      r.date = Date::parse(j.at("date").get<std::string>());
    } catch (const std::exception&) {
      errs.push_back({"date", "must be an ISO date YYYY-MM-DD"});
    }
  }
  if (!errs.empty()) throw RequestError(400, "ValidationError", "invalid request", std::move(errs));
  return r;
}

inline json to_json(const WhatIfRequest& r) {
  json j = {{"lat", r.lat}, {"lon", r.lon}, {"is_omni", r.is_omni}, {"manufacturer", r.manufacturer},
            {"antenna_model", r.antenna_model}};
  if (r.azimuth_deg) j["azimuth_deg"] = *r.azimuth_deg;
  if (r.date) j["date"] = r.date->iso();
  return j;
}

struct PlannerOptions {
  /// Candidates whose nearest 4G cell is farther than this are rejected with NoFourGCells.
  double max_neighbor_distance_m = 20000.0;
};

/// Immutable prediction snapshot: the 4G data plus one model per KPI.
class Planner {
 public:
  Planner(harness::Dataset data, std::array<harness::TrainedModel, 3> models, PlannerOptions opt = {})
      : data_(std::make_unique<harness::Dataset>(std::move(data))), models_(std::move(models)), opt_(opt) {
    for (auto k : kAllKpis)
      if (models_[static_cast<std::size_t>(k)].kpi != k)
        throw Error(ErrorCode::InvalidConfig, "model slot " + std::string(to_string(k)) + " holds a different KPI",
                    "checkpoint");
    index_ = std::make_unique<graph::SpatialIndex>(data_->inventory);
    const auto dates = data_->kpis.dates();
    if (dates.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no KPI records loaded", "kpis");
    first_date_ = dates.front();
    latest_date_ = dates.back();
    for (std::size_t i = 0; i < models_.size(); ++i) {
      if (!model_version_.empty()) model_version_ += "+";
      model_version_ += models_[i].model_version;
    }
  }

  const harness::Dataset& data() const { return *data_; }
  const std::string& model_version() const { return model_version_; }
  Date latest_date() const { return latest_date_; }

  json predict(const WhatIfRequest& req) const {
    const Date date = req.date.value_or(latest_date_);
    if (date < first_date_ || latest_date_ < date)
      throw RequestError(400, "ValidationError", "date outside the loaded KPI range",
                         {{"date", "no KPI data on " + date.iso()}});
    CellInventoryEntry cand;
    cand.cell_id = "candidate";
    cand.site_id = "candidate";
    cand.position = GeoPoint::make(req.lat, req.lon);
    cand.azimuth = req.is_omni ? Azimuth::omni() : Azimuth::degrees(*req.azimuth_deg);
    cand.technology = Technology::NR5G;
    cand.manufacturer = req.manufacturer;
    cand.antenna_model = req.antenna_model;

    const auto nearest = index_->nearest(cand.position, 1);
    if (nearest.empty() || nearest.front().distance_m > opt_.max_neighbor_distance_m)
      throw RequestError(422, "NoFourGCells", "no 4G cells near the candidate");

    json out;
    std::optional<graph::SubgraphTopology> topo;
    const harness::TrainedModel* built_for = nullptr;
    graph::PlanningSubgraph g;
    static constexpr std::array<const char*, 3> kKeys{"prb_util_pct", "ul_thr_mbps", "dl_thr_mbps"};
    json clipped;
    for (std::size_t i = 0; i < models_.size(); ++i) {
      const auto& m = models_[i];
      if (!topo || topo_cfg_differs(*built_for, m)) topo = graph::build_topology(*index_, cand, m.graph);
      if (!built_for || features_differ(*built_for, m))
        g = graph::attach_features(*topo, data_->inventory, date, data_->kpis, m.normalization, m.vocab, m.graph);
      built_for = &m;
      const auto p = m.predict(g);
      out[kKeys[i]] = p.value;
      clipped[kKeys[i]] = p.clipped;
    }
    out["clipped"] = clipped;
    out["low_confidence"] = topo->low_confidence;
    out["date"] = date.iso();
    out["model_version"] = model_version_;
    json neighbors = json::array();
    std::vector<bool> linked(topo->neighbors.size(), false);
    for (const auto& e : topo->edges)
      if (e.src == 0) linked[e.dst - 1] = true;
    for (std::size_t i = 0; i < topo->neighbors.size(); ++i) {
      const auto& cell = data_->inventory[topo->neighbors[i].cell];
      const auto geo = geometry::relative_angles(cand.position, cand.azimuth, cell.position, cell.azimuth);
      neighbors.push_back({{"cell_id", cell.cell_id},
                           {"d_m", topo->neighbors[i].distance_m},
                           {"alpha_deg", geo.alpha},
                           {"theta_deg", geo.theta},
                           {"rho_deg", geo.rho},
                           {"angles_valid", geo.angles_valid},
                           {"linked_to_target", static_cast<bool>(linked[i])}});
    }
    out["neighbors"] = neighbors;
    return out;
  }

  /// Cells inside an inclusive bbox, capped at kMaxCells.
  json cells(const GeoPoint& lo, const GeoPoint& hi) const {
    json list = json::array();
    bool truncated = false;
    for (const auto& c : data_->inventory) {
      if (c.position.lat < lo.lat || c.position.lat > hi.lat || c.position.lon < lo.lon || c.position.lon > hi.lon)
        continue;
      if (list.size() == kMaxCells) {
        truncated = true;
        break;
      }
      list.push_back({{"cell_id", c.cell_id},
                      {"site_id", c.site_id},
                      {"lat", c.position.lat},
                      {"lon", c.position.lon},
                      {"azimuth_deg", c.azimuth.is_omni ? json(nullptr) : json(c.azimuth.value)},
                      {"is_omni", c.azimuth.is_omni},
                      {"technology", to_string(c.technology)},
                      {"manufacturer", c.manufacturer},
                      {"antenna_model", c.antenna_model}});
    }
    return {{"cells", list}, {"count", list.size()}, {"truncated", truncated}};
  }

 private:
  static bool topo_cfg_differs(const harness::TrainedModel& a, const harness::TrainedModel& b) {
    return a.graph.k != b.graph.k || a.graph.target_radius_m != b.graph.target_radius_m;
  }
  static bool features_differ(const harness::TrainedModel& a, const harness::TrainedModel& b) {
    if (topo_cfg_differs(a, b) || a.graph.kpi_window_days != b.graph.kpi_window_days) return true;
    if (a.vocab.manufacturer.categories != b.vocab.manufacturer.categories ||
        a.vocab.antenna_model.categories != b.vocab.antenna_model.categories)
      return true;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& x = a.normalization.transforms[i];
      const auto& y = b.normalization.transforms[i];
      if (x.kind != y.kind || x.mean != y.mean || x.std != y.std || x.scale != y.scale) return true;
    }
    return false;
  }

  std::unique_ptr<harness::Dataset> data_;
  std::array<harness::TrainedModel, 3> models_;
  PlannerOptions opt_;
  std::unique_ptr<graph::SpatialIndex> index_;
  Date first_date_, latest_date_;
  std::string model_version_;
};

/// Parses "minlat,minlon,maxlat,maxlon".
inline std::pair<GeoPoint, GeoPoint> parse_bbox(const std::string& s) {
  std::vector<double> v;
  for (auto part : split_csv_line(s)) {
    const auto d = parse_double(trim(part));
    if (!d) throw RequestError(400, "ValidationError", "malformed bbox", {{"bbox", "expected 4 comma-separated numbers"}});
    v.push_back(*d);
  }
  if (v.size() != 4)
    throw RequestError(400, "ValidationError", "malformed bbox", {{"bbox", "expected 4 comma-separated numbers"}});
  if (!(v[0] >= -90 && v[2] <= 90 && v[1] >= -180 && v[3] <= 180))
    throw RequestError(400, "ValidationError", "bbox out of range", {{"bbox", "coordinates out of range"}});
  if (v[0] > v[2] || v[1] > v[3])
    throw RequestError(400, "ValidationError", "inverted bbox", {{"bbox", "min corner must not exceed max corner"}});
  return {GeoPoint{v[0], v[1]}, GeoPoint{v[2], v[3]}};
}

/// Single entry point shared by the HTTP handler and the CLI.
inline json predict_json(const Planner& p, const json& body) { return p.predict(parse_request(body)); }

class Server {
 public:
  explicit Server(const Planner& planner) : planner_(&planner) {
    svr_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"status", "ok"}, {"model_version", planner_->model_version()}});
    });
    svr_.Get("/cells", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        if (!req.has_param("bbox"))
          throw RequestError(400, "ValidationError", "missing bbox", {{"bbox", "required"}});
        const auto [lo, hi] = parse_bbox(req.get_param_value("bbox"));
        reply(res, 200, planner_->cells(lo, hi));
      });
    });
    svr_.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::exception&) {
          throw RequestError(400, "InvalidRequest", "request body is not valid JSON");
        }
        reply(res, 200, predict_json(*planner_, body));
      });
    });
  }

  bool listen(const std::string& host, int port) { return svr_.listen(host, port); }
  int bind_to_any_port(const std::string& host) { return svr_.bind_to_any_port(host); }
  bool listen_after_bind() { return svr_.listen_after_bind(); }
  void stop() { svr_.stop(); }
  void wait_until_ready() const { svr_.wait_until_ready(); }

 private:
  static void reply(httplib::Response& res, int status, const json& j) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  template <typename F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const RequestError& e) {
      reply(res, e.status(), e.to_json());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::ParseError) {
        RequestError re(400, "ValidationError", e.what(),
                        e.field().empty() ? std::vector<FieldError>{} : std::vector<FieldError>{{e.field(), e.what()}});
        reply(res, 400, re.to_json());
      } else if (e.code() == ErrorCode::NoFourGCells || e.code() == ErrorCode::EmptyInventory) {
        reply(res, 422, RequestError(422, "NoFourGCells", e.what()).to_json());
      } else {
        internal(res, e.what());
      }
    } catch (const std::exception& e) {
      internal(res, e.what());
    }
  }

  void internal(httplib::Response& res, const char* detail) {
    char id[32];
    std::snprintf(id, sizeof id, "err-%06llu", static_cast<unsigned long long>(++errors_));
    std::cerr << "internal error " << id << ": " << detail << '\n';
    reply(res, 500, {{"code", "InternalError"}, {"message", "internal error"}, {"error_id", id}});
  }

  const Planner* planner_;
  httplib::Server svr_;
  std::atomic<std::uint64_t> errors_{0};
};

}  // namespace cellgraph::service

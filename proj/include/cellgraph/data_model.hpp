#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cellgraph/error.hpp"
#include "cellgraph/geometry.hpp"

namespace cellgraph {

using geometry::Azimuth;
using geometry::GeoPoint;

// ---------------------------------------------------------------------------
// Text helpers

/// Shortest round-trip decimal representation of a double.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// ---------------------------------------------------------------------------
// Calendar day

/// A calendar day, stored as days since 1970-01-01.
struct Date {
  int days = 0;

  static Date from_ymd(int y, unsigned m, unsigned d) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw Error(ErrorCode::ParseError, "invalid calendar date", "date");
    return Date{static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count())};
  }

  /// Parses ISO-8601 `YYYY-MM-DD`.
  static Date parse(std::string_view s) {
    s = trim(s);
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
      throw Error(ErrorCode::ParseError, "date must be YYYY-MM-DD", "date");
    auto num = [&](std::size_t pos, std::size_t len) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
      if (ec != std::errc{} || ptr != s.data() + pos + len)
        throw Error(ErrorCode::ParseError, "date must be YYYY-MM-DD", "date");
      return v;
    };
    return from_ymd(num(0, 4), static_cast<unsigned>(num(5, 2)), static_cast<unsigned>(num(8, 2)));
  }

  std::string iso() const {
    const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
  }

  /// 0 = Monday ... 6 = Sunday.
  int weekday() const {
    return static_cast<int>(std::chrono::weekday{std::chrono::sys_days{std::chrono::days{days}}}.iso_encoding()) - 1;
  }
  bool is_weekend() const { return weekday() >= 5; }

  Date operator+(int n) const { return Date{days + n}; }
  friend auto operator<=>(const Date&, const Date&) = default;
};

// ---------------------------------------------------------------------------
// Schemas

enum class Technology { LTE4G, NR5G };

inline std::string_view to_string(Technology t) { return t == Technology::LTE4G ? "4G" : "5G"; }

struct CellInventoryEntry {
  std::string cell_id;
  std::string site_id;
  GeoPoint position;
  Azimuth azimuth;
  Technology technology = Technology::LTE4G;
  std::string manufacturer;
  std::string antenna_model;
};

using Inventory = std::vector<CellInventoryEntry>;

enum class KpiKind { PrbUtil = 0, UlThroughput = 1, DlThroughput = 2 };
inline constexpr std::array<KpiKind, 3> kAllKpis{KpiKind::PrbUtil, KpiKind::UlThroughput, KpiKind::DlThroughput};

inline std::string_view to_string(KpiKind k) {
  switch (k) {
    case KpiKind::PrbUtil: return "prb_util";
    case KpiKind::UlThroughput: return "ul_throughput";
    case KpiKind::DlThroughput: return "dl_throughput";
  }
  return "?";
}

inline KpiKind parse_kpi_kind(std::string_view s) {
  for (auto k : kAllKpis)
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown kpi '" + std::string(s) + "'", "kpi");
}

struct KpiRecord {
  std::string cell_id;
  Date date;
  double prb_util = 0.0;       ///< percent, [0, 100]
  double ul_throughput = 0.0;  ///< Mbit/s
  double dl_throughput = 0.0;  ///< Mbit/s

  double value(KpiKind k) const {
    switch (k) {
      case KpiKind::PrbUtil: return prb_util;
      case KpiKind::UlThroughput: return ul_throughput;
      case KpiKind::DlThroughput: return dl_throughput;
    }
    return 0.0;
  }
};

inline void validate(const KpiRecord& r) {
  if (!(r.prb_util >= 0.0 && r.prb_util <= 100.0))
    throw Error(ErrorCode::ParseError, "prb_util_pct outside [0, 100]", "prb_util_pct");
  if (!(r.ul_throughput >= 0.0) || !std::isfinite(r.ul_throughput))
    throw Error(ErrorCode::ParseError, "ul_thr_mbps must be >= 0", "ul_thr_mbps");
  if (!(r.dl_throughput >= 0.0) || !std::isfinite(r.dl_throughput))
    throw Error(ErrorCode::ParseError, "dl_thr_mbps must be >= 0", "dl_thr_mbps");
}

/// KPI records keyed by (cell_id, date); iteration order is deterministic.
class KpiTable {
 public:
  void insert(KpiRecord r) {
    auto& per_cell = by_cell_[r.cell_id];
    const Date d = r.date;
    if (!per_cell.emplace(d, std::move(r)).second)
      throw Error(ErrorCode::DuplicateRecord, "duplicate record for (" + std::string(per_cell.at(d).cell_id) + ", " +
                                                  d.iso() + ")");
    ++size_;
  }

  const KpiRecord* find(std::string_view cell_id, Date date) const {
    auto it = by_cell_.find(cell_id);
    if (it == by_cell_.end()) return nullptr;
    auto jt = it->second.find(date);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [cell, per_cell] : by_cell_)
      for (const auto& [date, rec] : per_cell) f(rec);
  }

  /// Sorted set of every date present.
  std::vector<Date> dates() const {
    std::set<Date> s;
    for_each([&](const KpiRecord& r) { s.insert(r.date); });
    return {s.begin(), s.end()};
  }

 private:
  std::map<std::string, std::map<Date, KpiRecord>, std::less<>> by_cell_;
  std::size_t size_ = 0;
};

/// Daily KPIs for `cell_id` at `date`, or the mean over the trailing
/// `window_days` window (records present only) when window_days > 1.
inline std::optional<KpiRecord> node_kpis(const KpiTable& table, std::string_view cell_id, Date date,
                                          int window_days = 1) {
  if (window_days <= 1) {
    const auto* r = table.find(cell_id, date);
    return r ? std::optional<KpiRecord>(*r) : std::nullopt;
  }
  KpiRecord acc;
  acc.cell_id = std::string(cell_id);
  acc.date = date;
  int n = 0;
  for (int off = 0; off < window_days; ++off) {
    if (const auto* r = table.find(cell_id, date + (-off))) {
      acc.prb_util += r->prb_util;
      acc.ul_throughput += r->ul_throughput;
      acc.dl_throughput += r->dl_throughput;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  acc.prb_util /= n;
  acc.ul_throughput /= n;
  acc.dl_throughput /= n;
  return acc;
}

// ---------------------------------------------------------------------------
// CSV ingestion

inline constexpr std::string_view kInventoryHeader =
    "cell_id,site_id,lat,lon,azimuth_deg,is_omni,technology,manufacturer,antenna_model";
inline constexpr std::string_view kKpiHeader = "cell_id,date,prb_util_pct,ul_thr_mbps,dl_thr_mbps";

inline void check_site_consistency(const Inventory& inv) {
  std::map<std::string, const CellInventoryEntry*> first_at_site;
  std::set<std::string> ids;
  for (const auto& c : inv) {
    if (!ids.insert(c.cell_id).second)
      throw Error(ErrorCode::DuplicateCellId, "duplicate cell_id '" + c.cell_id + "'", "cell_id");
    auto [it, inserted] = first_at_site.emplace(c.site_id, &c);
    if (!inserted && geometry::geodesic_distance(it->second->position, c.position) >= geometry::kCoLocationM)
      throw Error(ErrorCode::InconsistentSitePosition,
                  "site '" + c.site_id + "' has cells at different positions ('" + it->second->cell_id + "', '" +
                      c.cell_id + "')",
                  "site_id");
  }
}

inline Inventory parse_inventory(std::istream& in) {
  Inventory inv;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || trim(line) != kInventoryHeader)
    throw Error(ErrorCode::ParseError, "expected header '" + std::string(kInventoryHeader) + "'", "header", 1);
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(ErrorCode::ParseError, "expected 9 columns", "row", lineno);
    auto num = [&](std::size_t i, const char* name) {
      auto v = parse_double(f[i]);
      if (!v) throw Error(ErrorCode::ParseError, std::string("non-numeric ") + name, name, lineno);
      return *v;
    };
    CellInventoryEntry c;
    c.cell_id = std::string(trim(f[0]));
    c.site_id = std::string(trim(f[1]));
    if (c.cell_id.empty()) throw Error(ErrorCode::ParseError, "empty cell_id", "cell_id", lineno);
    if (c.site_id.empty()) throw Error(ErrorCode::ParseError, "empty site_id", "site_id", lineno);
    const double lat = num(2, "lat");
    const double lon = num(3, "lon");
    if (lat < -90.0 || lat > 90.0) throw Error(ErrorCode::ParseError, "lat outside [-90, 90]", "lat", lineno);
    if (lon < -180.0 || lon > 180.0) throw Error(ErrorCode::ParseError, "lon outside [-180, 180]", "lon", lineno);
    c.position = GeoPoint::make(lat, lon);
    const auto omni = trim(f[5]);
    if (omni != "0" && omni != "1") throw Error(ErrorCode::ParseError, "is_omni must be 0 or 1", "is_omni", lineno);
    if (omni == "1") {
      c.azimuth = Azimuth::omni();
    } else {
      const double az = num(4, "azimuth_deg");
      if (az < 0.0 || az > 360.0)
        throw Error(ErrorCode::ParseError, "azimuth_deg outside [0, 360]", "azimuth_deg", lineno);
      c.azimuth = Azimuth::degrees(az);
    }
    const auto tech = trim(f[6]);
    if (tech == "4G")
      c.technology = Technology::LTE4G;
    else if (tech == "5G")
      c.technology = Technology::NR5G;
    else
      throw Error(ErrorCode::ParseError, "technology must be 4G or 5G", "technology", lineno);
    c.manufacturer = std::string(trim(f[7]));
    c.antenna_model = std::string(trim(f[8]));
    inv.push_back(std::move(c));
  }
  check_site_consistency(inv);
  return inv;
}

inline Inventory load_inventory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return parse_inventory(in);
}

inline KpiTable parse_kpis(std::istream& in) {
  KpiTable table;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || trim(line) != kKpiHeader)
    throw Error(ErrorCode::ParseError, "expected header '" + std::string(kKpiHeader) + "'", "header", 1);
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw Error(ErrorCode::ParseError, "expected 5 columns", "row", lineno);
    KpiRecord r;
    r.cell_id = std::string(trim(f[0]));
    if (r.cell_id.empty()) throw Error(ErrorCode::ParseError, "empty cell_id", "cell_id", lineno);
    try {
      r.date = Date::parse(f[1]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "bad date", "date", lineno);
    }
    const char* names[] = {"prb_util_pct", "ul_thr_mbps", "dl_thr_mbps"};
    double* slots[] = {&r.prb_util, &r.ul_throughput, &r.dl_throughput};
    for (int i = 0; i < 3; ++i) {
      auto v = parse_double(f[2 + i]);
      if (!v) throw Error(ErrorCode::ParseError, std::string("non-numeric ") + names[i], names[i], lineno);
      *slots[i] = *v;
    }
    try {
      validate(r);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, e.what(), e.field(), lineno);
    }
    table.insert(std::move(r));
  }
  return table;
}

inline KpiTable load_kpis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return parse_kpis(in);
}

inline void write_inventory(std::ostream& out, const Inventory& inv) {
  out << kInventoryHeader << '\n';
  for (const auto& c : inv) {
    out << c.cell_id << ',' << c.site_id << ',' << format_double(c.position.lat) << ','
        << format_double(c.position.lon) << ',' << (c.azimuth.is_omni ? "" : format_double(c.azimuth.value)) << ','
        << (c.azimuth.is_omni ? 1 : 0) << ',' << to_string(c.technology) << ',' << c.manufacturer << ','
        << c.antenna_model << '\n';
  }
}

inline void write_kpis(std::ostream& out, const KpiTable& table) {
  out << kKpiHeader << '\n';
  table.for_each([&](const KpiRecord& r) {
    out << r.cell_id << ',' << r.date.iso() << ',' << format_double(r.prb_util) << ','
        << format_double(r.ul_throughput) << ',' << format_double(r.dl_throughput) << '\n';
  });
}

// ---------------------------------------------------------------------------
// Normalization

struct FeatureTransform {
  enum class Kind { ZScore, Log1pZScore, UnitInterval };
  Kind kind = Kind::ZScore;
  double mean = 0.0;
  double std = 1.0;
  double scale = 1.0;  ///< UnitInterval only

  double apply(double x) const {
    switch (kind) {
      case Kind::ZScore: return (x - mean) / std;
      case Kind::Log1pZScore: return (std::log1p(x) - mean) / std;
      case Kind::UnitInterval: return x * scale;
    }
    return x;
  }

  double invert(double z) const {
    switch (kind) {
      case Kind::ZScore: return z * std + mean;
      case Kind::Log1pZScore: return std::expm1(z * std + mean);
      case Kind::UnitInterval: return z / scale;
    }
    return z;
  }
};

inline constexpr double kStdFloor = 1e-6;

/// One transform per KPI, indexed by KpiKind.
struct NormalizationSpec {
  std::array<FeatureTransform, 3> transforms;
  std::string fitted_on;

  const FeatureTransform& operator[](KpiKind k) const { return transforms[static_cast<int>(k)]; }
  double apply(KpiKind k, double x) const { return (*this)[k].apply(x); }
  double invert(KpiKind k, double z) const { return (*this)[k].invert(z); }
};

/// PRB utilization is scaled to [0, 1]; throughputs get log1p then z-score
/// with statistics computed over `training_dates` only.
inline NormalizationSpec fit_normalization(const KpiTable& records, const std::set<Date>& training_dates,
                                           std::string fitted_on = {}) {
  std::array<double, 2> sum{}, sumsq{};
  std::size_t n = 0;
  records.for_each([&](const KpiRecord& r) {
    if (!training_dates.contains(r.date)) return;
    const double lu = std::log1p(r.ul_throughput);
    const double ld = std::log1p(r.dl_throughput);
    sum[0] += lu;
    sum[1] += ld;
    sumsq[0] += lu * lu;
    sumsq[1] += ld * ld;
    ++n;
  });
  if (n == 0) throw Error(ErrorCode::EmptyTrainingSet, "no KPI records fall on training dates");
  // second pass for a numerically stable variance
  std::array<double, 2> mean{sum[0] / n, sum[1] / n};
  std::array<double, 2> ss{};
  records.for_each([&](const KpiRecord& r) {
    if (!training_dates.contains(r.date)) return;
    const double du = std::log1p(r.ul_throughput) - mean[0];
    const double dd = std::log1p(r.dl_throughput) - mean[1];
    ss[0] += du * du;
    ss[1] += dd * dd;
  });
  NormalizationSpec spec;
  spec.fitted_on = std::move(fitted_on);
  spec.transforms[0] = {FeatureTransform::Kind::UnitInterval, 0.0, 1.0, 1.0 / 100.0};
  for (int i = 0; i < 2; ++i) {
    const double sd = std::max(kStdFloor, std::sqrt(ss[i] / n));
    spec.transforms[1 + i] = {FeatureTransform::Kind::Log1pZScore, mean[i], sd, 1.0};
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Categorical vocabularies and node encoding

/// Sorted category list; index size() is the reserved "unknown" bucket.
struct Vocabulary {
  std::vector<std::string> categories;

  std::size_t width() const { return categories.size() + 1; }
  std::size_t index_of(std::string_view v) const {
    auto it = std::lower_bound(categories.begin(), categories.end(), v);
    if (it != categories.end() && *it == v) return static_cast<std::size_t>(it - categories.begin());
    return categories.size();
  }
};

struct NodeVocab {
  Vocabulary manufacturer;
  Vocabulary antenna_model;
};

inline NodeVocab fit_vocab(const Inventory& inv) {
  std::set<std::string> m, a;
  for (const auto& c : inv) {
    m.insert(c.manufacturer);
    a.insert(c.antenna_model);
  }
  return NodeVocab{{{m.begin(), m.end()}}, {{a.begin(), a.end()}}};
}

/// Node feature layout:
///   [0..2] normalized prb, ul, dl   [3] kpi_present   [4] is_target
///   then one-hot manufacturer (with unknown), one-hot antenna model (with unknown)
namespace node_layout {
inline constexpr std::size_t kKpiBegin = 0;
inline constexpr std::size_t kKpiPresent = 3;
inline constexpr std::size_t kIsTarget = 4;
inline constexpr std::size_t kCategoricalBegin = 5;
}  // namespace node_layout

inline std::size_t node_dim(const NodeVocab& vocab) {
  return node_layout::kCategoricalBegin + vocab.manufacturer.width() + vocab.antenna_model.width();
}

/// Encodes one node. Target (5G) cells never carry KPI values.
inline std::vector<double> encode_node(const CellInventoryEntry& entry, const KpiRecord* kpis,
                                       const NormalizationSpec& spec, const NodeVocab& vocab, bool is_target) {
  using namespace node_layout;
  std::vector<double> f(node_dim(vocab), 0.0);
  if (is_target) {
    f[kIsTarget] = 1.0;
  } else if (kpis) {
    for (auto k : kAllKpis) f[kKpiBegin + static_cast<std::size_t>(k)] = spec.apply(k, kpis->value(k));
    f[kKpiPresent] = 1.0;
  }
  f[kCategoricalBegin + vocab.manufacturer.index_of(entry.manufacturer)] = 1.0;
  f[kCategoricalBegin + vocab.manufacturer.width() + vocab.antenna_model.index_of(entry.antenna_model)] = 1.0;
  return f;
}

inline std::vector<double> encode_node(const CellInventoryEntry& entry, const KpiRecord* kpis,
                                       const NormalizationSpec& spec, const NodeVocab& vocab) {
  return encode_node(entry, kpis, spec, vocab, entry.technology == Technology::NR5G);
}

}  // namespace cellgraph

#pragma once

// Spherical geodesy and the relative-orientation features attached to graph
// edges: site distance d and the three folded angles alpha, theta, rho.

#include <cmath>
#include <numbers>
#include <string>

#include "cellgraph/error.hpp"

namespace cellgraph::geometry {

inline constexpr double kEarthRadiusM = 6371008.8;
/// Sites closer than this are treated as co-located; bearings are undefined.
inline constexpr double kCoLocationM = 0.5;

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps any angle into [0, 360).
inline double wrap360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

/// Minimal absolute angular difference equivalent of `deg`, in [0, 180].
inline double fold(double deg) { return std::abs(std::remainder(deg, 360.0)); }

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  /// Validates latitude and normalizes longitude into [-180, 180).
  static GeoPoint make(double lat, double lon) {
    if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0)
      throw Error(ErrorCode::InvalidArgument, "latitude out of range [-90, 90]", "lat");
    if (!std::isfinite(lon))
      throw Error(ErrorCode::InvalidArgument, "longitude not finite", "lon");
    double l = std::fmod(lon + 180.0, 360.0);
    if (l < 0.0) l += 360.0;
    return GeoPoint{lat, l - 180.0};
  }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct Azimuth {
  double value = 0.0;  ///< degrees clockwise from true North, [0, 360)
  bool is_omni = false;

  static Azimuth omni() { return Azimuth{0.0, true}; }
  static Azimuth degrees(double deg) {
    if (!std::isfinite(deg))
      throw Error(ErrorCode::InvalidArgument, "azimuth not finite", "azimuth_deg");
    return Azimuth{wrap360(deg), false};
  }

  friend bool operator==(const Azimuth&, const Azimuth&) = default;
};

struct EdgeGeometry {
  double d = 0.0;      ///< meters
  double alpha = 0.0;  ///< degrees, [0, 180]
  double theta = 0.0;  ///< degrees, [0, 180]
  double rho = 0.0;    ///< degrees, [0, 180]
  bool angles_valid = false;

  friend bool operator==(const EdgeGeometry&, const EdgeGeometry&) = default;
};

/// Haversine great-circle distance in meters.
inline double geodesic_distance(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double sdphi = std::sin((phi2 - phi1) / 2.0);
  const double sdlam = std::sin(deg2rad(b.lon - a.lon) / 2.0);
  const double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdlam * sdlam;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace detail {

inline double bearing_unchecked(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dlam = deg2rad(b.lon - a.lon);
  const double y = std::sin(dlam) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlam);
  return wrap360(rad2deg(std::atan2(y, x)));
}

}  // namespace detail

/// Great-circle initial bearing at `a` toward `b`, clockwise from North.
inline double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  if (geodesic_distance(a, b) < kCoLocationM)
    throw Error(ErrorCode::CoLocatedSites, "bearing undefined for co-located sites");
  return detail::bearing_unchecked(a, b);
}

/// Edge features between cell A (at `a`, pointing `az_a`) and cell B. Angles
/// are masked to zero with angles_valid=false when either antenna is omni or
/// the sites are co-located.
inline EdgeGeometry relative_angles(const GeoPoint& a, const Azimuth& az_a, const GeoPoint& b,
                                    const Azimuth& az_b) {
  EdgeGeometry g;
  g.d = geodesic_distance(a, b);
  if (az_a.is_omni || az_b.is_omni || g.d < kCoLocationM) return g;
  g.alpha = fold(az_a.value - detail::bearing_unchecked(a, b));
  g.theta = fold(az_b.value - detail::bearing_unchecked(b, a));
  g.rho = fold(az_a.value - az_b.value);
  g.angles_valid = true;
  return g;
}

}  // namespace cellgraph::geometry

#include "georl/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace georl {

namespace {
double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
}  // namespace

double haversine_km(const LatLon& a, const LatLon& b) {
  double lat1 = deg2rad(a.lat);
  double lat2 = deg2rad(b.lat);
  double d_lat = deg2rad(b.lat - a.lat);
  double d_lon = deg2rad(b.lon - a.lon);
  double s_lat = std::sin(d_lat / 2.0);
  double s_lon = std::sin(d_lon / 2.0);
  double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  // rounding can push h a hair past 1 for antipodal points
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

}  // namespace georl

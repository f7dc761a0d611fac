#pragma once

#include "georl/types.hpp"

namespace georl {

/// IUGG mean Earth radius, km.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Great-circle distance in km between two (lat, lon) points, haversine form.
double haversine_km(const LatLon& a, const LatLon& b);

}  // namespace georl

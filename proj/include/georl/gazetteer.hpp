#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "georl/completion.hpp"
#include "georl/types.hpp"

namespace georl {

/// Offline (country, city) -> coordinate table with per-country fallback
/// centroids. Read-only after load; one entry per key.
class Gazetteer {
 public:
  /// Loads a UTF-8 TSV: country<TAB>city<TAB>lat<TAB>lon per row. A row with
  /// an empty city column defines the country's fallback centroid. Keys are
  /// normalized on load. Throws SchemaError (line-numbered) on malformed or
  /// duplicate rows, IoError if unreadable.
  static Gazetteer load(const std::string& path);

  void add_city(const std::string& country, const std::string& city, LatLon coord);
  void add_country_fallback(const std::string& country, LatLon coord);

  /// Exact (country, city) lookup, then country centroid, then nothing.
  std::optional<LatLon> resolve(const std::string& country, const std::string& city) const;
  std::optional<LatLon> resolve(const ParsedCompletion& pred) const;

  std::size_t city_count() const { return entries_.size(); }
  std::size_t country_count() const { return country_fallback_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, LatLon> entries_;
  std::map<std::string, LatLon> country_fallback_;
};

}  // namespace georl

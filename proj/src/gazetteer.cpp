#include "georl/gazetteer.hpp"

#include <fstream>
#include <vector>

#include "georl/errors.hpp"
#include "georl/text.hpp"

namespace georl {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

double parse_coord(const std::string& field, double lo, double hi, bool lo_open) {
  std::size_t consumed = 0;
  double value = std::stod(field, &consumed);
  if (consumed != field.size()) throw std::invalid_argument("trailing characters");
  if (value > hi || (lo_open ? value <= lo : value < lo))
    throw std::out_of_range("coordinate out of range");
  return value;
}

}  // namespace

Gazetteer Gazetteer::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open gazetteer file: " + path);
  Gazetteer gaz;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 4)
      throw SchemaError(line_no, "expected country<TAB>city<TAB>lat<TAB>lon");
    LatLon coord;
    try {
      coord.lat = parse_coord(fields[2], -90.0, 90.0, /*lo_open=*/false);
      coord.lon = parse_coord(fields[3], -180.0, 180.0, /*lo_open=*/true);
    } catch (const std::exception&) {
      throw SchemaError(line_no, "bad coordinate \"" + fields[2] + "\", \"" + fields[3] + "\"");
    }
    std::string country;
    try {
      country = normalize_place(fields[0]);
    } catch (const EmptyAfterNormalization&) {
      throw SchemaError(line_no, "country is empty after normalization");
    }
    bool city_empty = fields[1].find_first_not_of(" \t") == std::string::npos;
    if (city_empty) {
      if (!gaz.country_fallback_.emplace(country, coord).second)
        throw SchemaError(line_no, "duplicate country fallback for \"" + country + "\"");
    } else {
      std::string city;
      try {
        city = normalize_place(fields[1]);
      } catch (const EmptyAfterNormalization&) {
        throw SchemaError(line_no, "city is empty after normalization");
      }
      if (!gaz.entries_.emplace(std::make_pair(country, city), coord).second)
        throw SchemaError(line_no, "duplicate entry for (" + country + ", " + city + ")");
    }
  }
  return gaz;
}

void Gazetteer::add_city(const std::string& country, const std::string& city, LatLon coord) {
  entries_[{normalize_place(country), normalize_place(city)}] = coord;
}

void Gazetteer::add_country_fallback(const std::string& country, LatLon coord) {
  country_fallback_[normalize_place(country)] = coord;
}

std::optional<LatLon> Gazetteer::resolve(const std::string& country, const std::string& city) const {
  auto hit = entries_.find({country, city});
  if (hit != entries_.end()) return hit->second;
  auto fallback = country_fallback_.find(country);
  if (fallback != country_fallback_.end()) return fallback->second;
  return std::nullopt;
}

std::optional<LatLon> Gazetteer::resolve(const ParsedCompletion& pred) const {
  return resolve(pred.country, pred.city);
}

}  // namespace georl

#include "georl/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "georl/errors.hpp"
#include "georl/text.hpp"

namespace georl {

using nlohmann::json;

std::string to_string(Scene scene) {
  switch (scene) {
    case Scene::indoor: return "indoor";
    case Scene::natural: return "natural";
    case Scene::urban: return "urban";
    case Scene::unknown: return "unknown";
  }
  return "unknown";
}

std::optional<Scene> scene_from_string(const std::string& name) {
  if (name == "indoor") return Scene::indoor;
  if (name == "natural") return Scene::natural;
  if (name == "urban") return Scene::urban;
  if (name == "unknown") return Scene::unknown;
  return std::nullopt;
}

namespace {

const json& require(const json& obj, const char* key) {
  if (!obj.is_object()) throw std::runtime_error("expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw std::runtime_error(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_string()) throw std::runtime_error(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

double require_number(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_number()) throw std::runtime_error(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

bool require_bool(const json& obj, const char* key) {
  const json& v = require(obj, key);
  if (!v.is_boolean()) throw std::runtime_error(std::string("field \"") + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string normalized_name(const json& obj, const char* key) {
  std::string raw = require_string(obj, key);
  try {
    return normalize_place(raw);
  } catch (const EmptyAfterNormalization&) {
    throw std::runtime_error(std::string("field \"") + key + "\" is empty after normalization");
  }
}

void check_lat_lon(double lat, double lon) {
  if (lat < -90.0 || lat > 90.0) throw std::runtime_error("lat out of range [-90, 90]");
  if (lon <= -180.0 || lon > 180.0) throw std::runtime_error("lon out of range (-180, 180]");
}

GeoLabel parse_geo_label(const json& obj, bool coord_required) {
  GeoLabel g;
  g.country = normalized_name(obj, "country");
  g.city = normalized_name(obj, "city");
  const json& lat = require(obj, "lat");
  const json& lon = require(obj, "lon");
  if (lat.is_null() != lon.is_null())
    throw std::runtime_error("lat and lon must both be present or both be null");
  if (lat.is_null()) {
    if (coord_required) throw std::runtime_error("lat/lon are required here");
    return g;
  }
  if (!lat.is_number() || !lon.is_number())
    throw std::runtime_error("lat/lon must be numbers or null");
  LatLon c{lat.get<double>(), lon.get<double>()};
  check_lat_lon(c.lat, c.lon);
  g.coord = c;
  return g;
}

VisualElementSet parse_segmentation(const json& arr) {
  if (!arr.is_array()) throw std::runtime_error("field \"segmentation\" must be an array of strings");
  VisualElementSet set;
  for (const json& v : arr) {
    if (!v.is_string()) throw std::runtime_error("segmentation elements must be strings");
    try {
      set.elements.insert(normalize_place(v.get<std::string>()));
    } catch (const EmptyAfterNormalization&) {
      throw std::runtime_error("segmentation element is empty after normalization");
    }
  }
  return set;
}

std::vector<Entity> parse_entities(const json& arr) {
  if (!arr.is_array()) throw std::runtime_error("field \"entities\" must be an array");
  std::vector<Entity> entities;
  entities.reserve(arr.size());
  for (const json& e : arr) {
    Entity ent;
    try {
      ent.text = normalize_place(require_string(e, "text"));
    } catch (const EmptyAfterNormalization&) {
      throw std::runtime_error("entity text is empty after normalization");
    }
    ent.type = require_string(e, "type");
    entities.push_back(std::move(ent));
  }
  return entities;
}

ModelAnnotation parse_annotation(const json& obj) {
  ModelAnnotation a;
  a.model_id = require_string(obj, "model_id");
  if (a.model_id.empty()) throw std::runtime_error("model_id must be non-empty");
  a.localizable = require_bool(obj, "localizable");
  a.localizability_score = require_number(obj, "localizability_score");
  if (a.localizability_score < 0.0 || a.localizability_score > 1.0)
    throw std::runtime_error("localizability_score out of range [0, 1]");
  a.predicted = parse_geo_label(require(obj, "predicted"), /*coord_required=*/false);
  const json& trace = require(obj, "trace");
  a.trace.text = require_string(trace, "text");
  a.trace.entities = parse_entities(require(trace, "entities"));
  return a;
}

Sample parse_sample(const json& obj) {
  Sample s;
  s.id = require_string(obj, "id");
  if (s.id.empty()) throw std::runtime_error("id must be non-empty");
  s.image_path = require_string(obj, "image_path");
  s.truth = parse_geo_label(require(obj, "truth"), /*coord_required=*/true);
  std::string scene = require_string(obj, "scene");
  auto parsed = scene_from_string(scene);
  if (!parsed) throw std::runtime_error("unknown scene class \"" + scene + "\"");
  s.scene = *parsed;
  s.segmentation = parse_segmentation(require(obj, "segmentation"));
  s.label_localizable = require_bool(obj, "label_localizable");
  const json& anns = require(obj, "annotations");
  if (!anns.is_array()) throw std::runtime_error("field \"annotations\" must be an array");
  for (const json& a : anns) s.annotations.push_back(parse_annotation(a));
  return s;
}

json geo_label_to_json(const GeoLabel& g) {
  json j;
  j["country"] = g.country;
  j["city"] = g.city;
  j["lat"] = g.coord ? json(g.coord->lat) : json(nullptr);
  j["lon"] = g.coord ? json(g.coord->lon) : json(nullptr);
  return j;
}

json sample_to_json(const Sample& s) {
  json j;
  j["id"] = s.id;
  j["image_path"] = s.image_path;
  j["truth"] = geo_label_to_json(s.truth);
  j["scene"] = to_string(s.scene);
  j["segmentation"] = json::array();
  for (const auto& e : s.segmentation.elements) j["segmentation"].push_back(e);
  j["label_localizable"] = s.label_localizable;
  j["annotations"] = json::array();
  for (const auto& a : s.annotations) {
    json ja;
    ja["model_id"] = a.model_id;
    ja["localizable"] = a.localizable;
    ja["localizability_score"] = a.localizability_score;
    ja["predicted"] = geo_label_to_json(a.predicted);
    json entities = json::array();
    for (const auto& e : a.trace.entities) entities.push_back({{"text", e.text}, {"type", e.type}});
    ja["trace"] = {{"text", a.trace.text}, {"entities", std::move(entities)}};
    j["annotations"].push_back(std::move(ja));
  }
  return j;
}

}  // namespace

std::vector<Sample> read_corpus(std::istream& in) {
  std::vector<Sample> corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(line_no, e.what());
    }
    Sample s;
    try {
      s = parse_sample(obj);
    } catch (const std::exception& e) {
      throw SchemaError(line_no, e.what());
    }
    if (!seen.insert(s.id).second) throw DuplicateId(s.id);
    corpus.push_back(std::move(s));
  }
  return corpus;
}

std::vector<Sample> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file: " + path);
  return read_corpus(in);
}

std::string sample_to_json_line(const Sample& sample) { return sample_to_json(sample).dump(); }

void write_corpus(const std::vector<Sample>& corpus, std::ostream& out) {
  for (const auto& s : corpus) out << sample_to_json_line(s) << '\n';
}

void save_corpus(const std::vector<Sample>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file: " + path);
  write_corpus(corpus, out);
  if (!out.flush()) throw IoError("write failed: " + path);
}

}  // namespace georl

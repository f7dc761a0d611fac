#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace georl {

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

/// Ground-truth or predicted place. Country and city hold normalized strings;
/// coordinates are optional but always paired.
struct GeoLabel {
  std::string country;
  std::string city;
  std::optional<LatLon> coord;
};

/// One named thing extracted from a reasoning trace ("stadium", "minaret", ...).
struct Entity {
  std::string text;  // normalized
  std::string type;  // free category tag, e.g. ARCH, SIGN
};

/// Set of normalized visual element names: segmentation categories plus
/// text-extracted elements. Deduplicated; may be empty.
struct VisualElementSet {
  std::set<std::string> elements;
};

struct ReasoningTrace {
  std::string text;  // raw
  std::vector<Entity> entities;
};

/// What one upstream model said about a sample.
struct ModelAnnotation {
  std::string model_id;
  bool localizable = false;
  double localizability_score = 0.0;  // in [0, 1]
  GeoLabel predicted;
  ReasoningTrace trace;
};

enum class Scene { indoor, natural, urban, unknown };

std::string to_string(Scene scene);
std::optional<Scene> scene_from_string(const std::string& name);

/// One image record: identity, ground truth (with coordinates), scene class,
/// visual element set, per-model annotations, and the curated localizability label.
struct Sample {
  std::string id;
  std::string image_path;
  GeoLabel truth;  // coord always present
  Scene scene = Scene::unknown;
  VisualElementSet segmentation;
  std::vector<ModelAnnotation> annotations;
  bool label_localizable = false;
};

}  // namespace georl

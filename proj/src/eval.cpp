#include "georl/eval.hpp"

#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "georl/errors.hpp"
#include "georl/geodesy.hpp"

namespace georl {

std::vector<double> threshold_accuracy(const std::vector<double>& distances_km,
                                       const std::vector<double>& thresholds_km) {
  for (std::size_t i = 1; i < thresholds_km.size(); ++i) {
    if (thresholds_km[i] <= thresholds_km[i - 1])
      throw std::invalid_argument("thresholds must be strictly increasing");
  }
  if (distances_km.empty()) throw EmptyInput("no distances to score");
  std::vector<double> fractions(thresholds_km.size(), 0.0);
  for (std::size_t t = 0; t < thresholds_km.size(); ++t) {
    std::size_t hits = 0;
    for (double d : distances_km) {
      if (d <= thresholds_km[t]) ++hits;
    }
    fractions[t] = static_cast<double>(hits) / static_cast<double>(distances_km.size());
  }
  return fractions;
}

namespace {

void bucket_add(EvalBucket& bucket, double distance_km) {
  ++bucket.n_evaluated;
  for (std::size_t t = 0; t < kThresholdsKm.size(); ++t) {
    if (distance_km <= kThresholdsKm[t]) ++bucket.hits[t];
  }
}

void bucket_finalize(EvalBucket& bucket) {
  if (bucket.n_evaluated == 0) return;
  for (std::size_t t = 0; t < kThresholdsKm.size(); ++t)
    bucket.accuracy[t] = static_cast<double>(bucket.hits[t]) / static_cast<double>(bucket.n_evaluated);
}

nlohmann::json bucket_to_json(const EvalBucket& bucket) {
  nlohmann::json acc;
  for (std::size_t t = 0; t < kThresholdsKm.size(); ++t) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", kThresholdsKm[t]);
    acc[key] = bucket.accuracy[t];
  }
  return {{"accuracy", acc},
          {"n_evaluated", bucket.n_evaluated},
          {"n_unresolvable", bucket.n_unresolvable}};
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::json j = bucket_to_json(overall);
  nlohmann::json scenes;
  for (const auto& [scene, bucket] : per_scene) scenes[to_string(scene)] = bucket_to_json(bucket);
  j["per_scene"] = scenes;
  return j.dump();
}

EvalReport evaluate(const std::vector<Sample>& samples,
                    const std::map<std::string, ParsedCompletion>& predictions,
                    const Gazetteer& gazetteer) {
  std::unordered_map<std::string, const Sample*> by_id;
  by_id.reserve(samples.size());
  for (const auto& s : samples) by_id.emplace(s.id, &s);

  EvalReport report;
  report.per_scene[Scene::indoor] = {};
  report.per_scene[Scene::natural] = {};
  report.per_scene[Scene::urban] = {};

  for (const auto& [id, pred] : predictions) {
    auto found = by_id.find(id);
    if (found == by_id.end()) throw UnknownPredictionId(id);
    const Sample& sample = *found->second;
    auto coord = gazetteer.resolve(pred);
    EvalBucket* scene_bucket = sample.scene == Scene::unknown ? nullptr : &report.per_scene[sample.scene];
    if (!coord) {
      ++report.overall.n_unresolvable;
      if (scene_bucket) ++scene_bucket->n_unresolvable;
      continue;
    }
    double d = haversine_km(*coord, *sample.truth.coord);
    bucket_add(report.overall, d);
    if (scene_bucket) bucket_add(*scene_bucket, d);
  }
  bucket_finalize(report.overall);
  for (auto& [scene, bucket] : report.per_scene) bucket_finalize(bucket);
  return report;
}

}  // namespace georl

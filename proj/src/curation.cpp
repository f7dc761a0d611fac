#include "georl/curation.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "georl/errors.hpp"
#include "georl/geodesy.hpp"
#include "georl/rewards.hpp"
#include "georl/text.hpp"

namespace georl {

std::string to_string(DropReason reason) {
  switch (reason) {
    case DropReason::localizability: return "localizability";
    case DropReason::distance: return "distance";
    case DropReason::consensus: return "consensus";
    case DropReason::grounding: return "grounding";
  }
  return "unknown";
}

std::string PipelineStats::to_json() const {
  nlohmann::json j{{"input_count", input_count},
                   {"dropped_localizability", dropped_localizability},
                   {"dropped_distance", dropped_distance},
                   {"dropped_consensus", dropped_consensus},
                   {"dropped_grounding", dropped_grounding},
                   {"retained_count", retained_count}};
  return j.dump();
}

std::string DatasetStats::to_json() const {
  nlohmann::json j{{"n_samples", n_samples},   {"n_countries", n_countries},
                   {"n_cities", n_cities},     {"n_indoor", n_indoor},
                   {"n_natural", n_natural},   {"n_urban", n_urban}};
  return j.dump();
}

std::optional<DropReason> localizability_gate(const Sample& sample, const CurationConfig& cfg) {
  if (sample.annotations.empty()) throw NoAnnotations(sample.id);
  double max_score = 0.0;
  for (const auto& a : sample.annotations) {
    if (!a.localizable) return DropReason::localizability;
    max_score = std::max(max_score, a.localizability_score);
  }
  if (max_score < cfg.loc_score_min) return DropReason::localizability;
  return std::nullopt;
}

std::optional<DropReason> distance_gate(const ModelAnnotation& annotation, const GeoLabel& truth,
                                        const CurationConfig& cfg, const Gazetteer* gazetteer) {
  std::optional<LatLon> predicted = annotation.predicted.coord;
  if (!predicted && gazetteer)
    predicted = gazetteer->resolve(annotation.predicted.country, annotation.predicted.city);
  if (!predicted)
    throw Unresolvable("prediction by \"" + annotation.model_id + "\" has no coordinate and (" +
                       annotation.predicted.country + ", " + annotation.predicted.city +
                       ") is not in the gazetteer");
  if (!truth.coord) throw Unresolvable("truth label has no coordinate");
  if (haversine_km(*predicted, *truth.coord) > cfg.distance_gate_km) return DropReason::distance;
  return std::nullopt;
}

namespace {

std::set<std::string> entity_tokens(const ReasoningTrace& trace) {
  std::set<std::string> tokens;
  for (const auto& e : trace.entities) {
    for (auto& t : tokenize(e.text)) tokens.insert(std::move(t));
  }
  return tokens;
}

}  // namespace

std::optional<DropReason> cross_model_consensus(const ModelAnnotation& a, const ModelAnnotation& b,
                                                const CurationConfig& cfg) {
  if (a.predicted.country != b.predicted.country) return DropReason::consensus;
  if (cfg.require_city_consensus && a.predicted.city != b.predicted.city)
    return DropReason::consensus;
  if (token_jaccard(entity_tokens(a.trace), entity_tokens(b.trace)) < cfg.consensus_jaccard_min)
    return DropReason::consensus;
  return std::nullopt;
}

std::optional<DropReason> grounding_gate(const ReasoningTrace& trace,
                                         const VisualElementSet& segmentation,
                                         const CurationConfig& cfg) {
  if (visual_grounding_reward(trace.entities, segmentation) < cfg.grounding_min)
    return DropReason::grounding;
  return std::nullopt;
}

namespace {

// The first two annotations by model_id mirror the two reasoning models that
// produced the distilled traces; any further annotations only feed the
// localizability max-score.
std::vector<const ModelAnnotation*> primary_pair(const Sample& sample) {
  std::vector<const ModelAnnotation*> anns;
  anns.reserve(sample.annotations.size());
  for (const auto& a : sample.annotations) anns.push_back(&a);
  std::sort(anns.begin(), anns.end(),
            [](const ModelAnnotation* x, const ModelAnnotation* y) { return x->model_id < y->model_id; });
  if (anns.size() > 2) anns.resize(2);
  return anns;
}

std::optional<DropReason> first_failing_gate(const Sample& sample, const CurationConfig& cfg,
                                             const Gazetteer* gazetteer) {
  if (auto drop = localizability_gate(sample, cfg)) return drop;

  auto pair = primary_pair(sample);
  for (const auto* ann : pair) {
    try {
      if (auto drop = distance_gate(*ann, sample.truth, cfg, gazetteer)) return drop;
    } catch (const Unresolvable&) {
      return DropReason::distance;
    }
  }
  // Consensus needs both reasoning models; a lone annotation cannot be verified.
  if (pair.size() < 2) return DropReason::consensus;
  if (auto drop = cross_model_consensus(*pair[0], *pair[1], cfg)) return drop;

  for (const auto* ann : pair) {
    if (auto drop = grounding_gate(ann->trace, sample.segmentation, cfg)) return drop;
  }
  return std::nullopt;
}

}  // namespace

CurationResult run_pipeline(const std::vector<Sample>& corpus, const CurationConfig& cfg,
                            const Gazetteer* gazetteer) {
  CurationResult result;
  result.stats.input_count = corpus.size();
  for (const auto& sample : corpus) {
    auto drop = first_failing_gate(sample, cfg, gazetteer);
    if (!drop) {
      result.retained.push_back(sample);
      continue;
    }
    switch (*drop) {
      case DropReason::localizability: ++result.stats.dropped_localizability; break;
      case DropReason::distance: ++result.stats.dropped_distance; break;
      case DropReason::consensus: ++result.stats.dropped_consensus; break;
      case DropReason::grounding: ++result.stats.dropped_grounding; break;
    }
  }
  result.stats.retained_count = result.retained.size();
  return result;
}

DatasetStats dataset_stats(const std::vector<Sample>& dataset) {
  DatasetStats stats;
  stats.n_samples = dataset.size();
  std::set<std::string> countries;
  std::set<std::string> cities;
  for (const auto& s : dataset) {
    countries.insert(s.truth.country);
    cities.insert(s.truth.city);
    switch (s.scene) {
      case Scene::indoor: ++stats.n_indoor; break;
      case Scene::natural: ++stats.n_natural; break;
      case Scene::urban: ++stats.n_urban; break;
      case Scene::unknown: break;
    }
  }
  stats.n_countries = countries.size();
  stats.n_cities = cities.size();
  return stats;
}

}  // namespace georl

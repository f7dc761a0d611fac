#pragma once

#include <optional>
#include <string>
#include <vector>

#include "georl/gazetteer.hpp"
#include "georl/types.hpp"

namespace georl {

struct CurationConfig {
  double loc_score_min = 0.5;
  double distance_gate_km = 25.0;
  double consensus_jaccard_min = 0.3;
  double grounding_min = 0.5;
  bool require_city_consensus = false;
};

enum class DropReason { localizability, distance, consensus, grounding };

std::string to_string(DropReason reason);

/// Per-stage drop attribution. input = retained + sum of drops.
struct PipelineStats {
  std::size_t input_count = 0;
  std::size_t dropped_localizability = 0;
  std::size_t dropped_distance = 0;
  std::size_t dropped_consensus = 0;
  std::size_t dropped_grounding = 0;
  std::size_t retained_count = 0;

  std::string to_json() const;
};

struct DatasetStats {
  std::size_t n_samples = 0;
  std::size_t n_countries = 0;
  std::size_t n_cities = 0;
  std::size_t n_indoor = 0;
  std::size_t n_natural = 0;
  std::size_t n_urban = 0;

  std::string to_json() const;
};

/// Drop when any model flagged the sample non-localizable or when the best
/// score across annotations stays below loc_score_min. Throws NoAnnotations.
std::optional<DropReason> localizability_gate(const Sample& sample, const CurationConfig& cfg);

/// Keep iff the predicted coordinate lies within distance_gate_km of truth.
/// Predictions without coordinates resolve through the gazetteer (may be
/// null); throws Unresolvable when no coordinate can be obtained.
std::optional<DropReason> distance_gate(const ModelAnnotation& annotation, const GeoLabel& truth,
                                        const CurationConfig& cfg, const Gazetteer* gazetteer);

/// Keep iff the two annotations agree on location (country, and city when
/// required) and their entity-token sets overlap at consensus_jaccard_min.
std::optional<DropReason> cross_model_consensus(const ModelAnnotation& a, const ModelAnnotation& b,
                                                const CurationConfig& cfg);

/// Keep iff the trace's visual grounding score reaches grounding_min.
std::optional<DropReason> grounding_gate(const ReasoningTrace& trace,
                                         const VisualElementSet& segmentation,
                                         const CurationConfig& cfg);

struct CurationResult {
  std::vector<Sample> retained;
  PipelineStats stats;
};

/// Applies the gates in order localizability -> distance -> consensus ->
/// grounding; distance and grounding run over both primary annotations (the
/// first two by model_id) and both must pass. A sample is retained iff every
/// gate passes; stats attribute each drop to its first failing stage, and
/// output order equals input order.
CurationResult run_pipeline(const std::vector<Sample>& corpus, const CurationConfig& cfg,
                            const Gazetteer* gazetteer);

DatasetStats dataset_stats(const std::vector<Sample>& dataset);

}  // namespace georl

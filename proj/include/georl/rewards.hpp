#pragma once

#include <map>
#include <string>
#include <vector>

#include "georl/types.hpp"

namespace georl {

/// Mixing weights for the composite reward plus the city-correctness weight
/// of the tiered geo reward. All in [0, 1].
struct RewardWeights {
  double lambda_loc = 0.2;
  double lambda_vis = 0.5;
  double lambda_geo = 1.0;
  double alpha = 0.5;
};

/// Localizability scoring backend. The fixture kind replays scores produced
/// offline by an external model; the heuristic kind is a logistic stand-in
/// driven by entity grounding counts.
struct LocalizabilityScorer {
  enum class Kind { fixture, heuristic };
  Kind kind = Kind::heuristic;
  std::map<std::string, double> fixture_table;  // sample id -> score in [0, 1]
  double w0 = -1.0;
  double w1 = 0.8;
  double w2 = 0.2;

  static LocalizabilityScorer fixture(std::map<std::string, double> table);
  static LocalizabilityScorer heuristic(double w0, double w1, double w2);

  /// Loads a fixture table from JSONL rows {"id": str, "score": num}.
  static LocalizabilityScorer load_fixture(const std::string& path);
};

/// 1 iff the entity text approximately matches any visual element: exact
/// equality, whole-token containment either way, or token-set Jaccard >= 0.5.
int soft_match(const Entity& entity, const VisualElementSet& visual);

/// Fraction of entities with a soft match in the visual set; 0 for an empty
/// entity list (no extractable entities means no grounding to reward).
double visual_grounding_reward(const std::vector<Entity>& entities, const VisualElementSet& visual);

/// Tiered reward: 0 when countries differ, 1 - alpha when only the country
/// matches, 1 when country and city both match.
double geo_accuracy_reward(const GeoLabel& pred, const GeoLabel& truth, double alpha);

/// Fixture kind returns the stored score verbatim (UnknownSampleId on a miss).
/// Heuristic kind returns logistic(w0 + w1 * grounded - w2 * ungrounded) where
/// grounded/ungrounded count the trace entities by soft-match outcome.
double localizability_reward(const std::string& sample_id, const ReasoningTrace& trace,
                             const VisualElementSet& visual, const LocalizabilityScorer& scorer);

/// lambda_loc * r_loc + lambda_vis * r_vis + lambda_geo * r_geo.
double composite_reward(double r_loc, double r_vis, double r_geo, const RewardWeights& weights);

}  // namespace georl

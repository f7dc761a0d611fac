#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "georl/completion.hpp"
#include "georl/gazetteer.hpp"
#include "georl/types.hpp"

namespace georl {

/// Distance tiers in km: street, city, region, country, continent.
inline constexpr std::array<double, 5> kThresholdsKm = {1.0, 25.0, 200.0, 750.0, 2500.0};

/// Fraction of distances within each threshold. Thresholds must be strictly
/// increasing. Throws EmptyInput when no distances are given.
std::vector<double> threshold_accuracy(const std::vector<double>& distances_km,
                                       const std::vector<double>& thresholds_km);

struct EvalBucket {
  std::size_t n_evaluated = 0;
  std::size_t n_unresolvable = 0;
  std::array<std::size_t, 5> hits{};  // per threshold tier
  std::array<double, 5> accuracy{};   // hits / n_evaluated; 0 when nothing evaluated
};

/// Threshold accuracies overall plus per-scene breakdowns. Unknown-scene
/// samples count toward the overall numbers only.
struct EvalReport {
  EvalBucket overall;
  std::map<Scene, EvalBucket> per_scene;  // indoor / natural / urban

  std::string to_json() const;
};

/// Resolves each prediction through the gazetteer, measures the great-circle
/// distance to the sample's truth coordinate, and aggregates tier accuracies.
/// Unresolvable predictions are counted but excluded from denominators.
/// Throws UnknownPredictionId when a prediction has no matching sample.
EvalReport evaluate(const std::vector<Sample>& samples,
                    const std::map<std::string, ParsedCompletion>& predictions,
                    const Gazetteer& gazetteer);

}  // namespace georl

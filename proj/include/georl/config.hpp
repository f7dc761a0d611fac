#pragma once

#include <string>

#include "georl/curation.hpp"
#include "georl/grpo.hpp"
#include "georl/rewards.hpp"

namespace georl {

struct AppPaths {
  std::string gazetteer;
  std::string fixture_scores;
  std::string log_dir = ".";
};

/// Heuristic localizability scorer weights; used when no fixture score file
/// is configured.
struct ScorerConfig {
  double w0 = -1.0;
  double w1 = 0.8;
  double w2 = 0.2;
};

struct AppConfig {
  RewardWeights weights;
  GrpoConfig grpo;  // grpo.weights mirrors `weights` after load
  CurationConfig curation;
  ScorerConfig scorer;
  AppPaths paths;
};

/// Documented defaults; what an absent config file means.
AppConfig default_config();

/// Reads a flat JSON object whose keys are dotted paths grouped by section,
/// e.g. {"weights.lambda_geo": 1.0, "grpo.k": 8, "paths.gazetteer": "g.tsv"}.
/// Absent keys keep their defaults; unknown keys and out-of-range values
/// raise ConfigError.
AppConfig load_config(const std::string& path);
AppConfig parse_config(const std::string& json_text);

}  // namespace georl

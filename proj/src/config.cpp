#include "georl/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "georl/errors.hpp"

namespace georl {

using nlohmann::json;

AppConfig default_config() { return AppConfig{}; }

namespace {

double as_number(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError("\"" + key + "\" must be a number");
  return v.get<double>();
}

double in_range(const std::string& key, const json& v, double lo, double hi) {
  double x = as_number(key, v);
  if (x < lo || x > hi) {
    std::ostringstream msg;
    msg << "\"" << key << "\" out of range [" << lo << ", " << hi << "]";
    throw ConfigError(msg.str());
  }
  return x;
}

double positive(const std::string& key, const json& v) {
  double x = as_number(key, v);
  if (x <= 0.0) throw ConfigError("\"" + key + "\" must be > 0");
  return x;
}

double non_negative(const std::string& key, const json& v) {
  double x = as_number(key, v);
  if (x < 0.0) throw ConfigError("\"" + key + "\" must be >= 0");
  return x;
}

std::uint64_t as_count(const std::string& key, const json& v) {
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<std::int64_t>() < 0))
    throw ConfigError("\"" + key + "\" must be a non-negative integer");
  return v.get<std::uint64_t>();
}

bool as_bool(const std::string& key, const json& v) {
  if (!v.is_boolean()) throw ConfigError("\"" + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
  if (!v.is_string()) throw ConfigError("\"" + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  AppConfig cfg = default_config();
  using Setter = std::function<void(const std::string&, const json&)>;
  const std::map<std::string, Setter> setters = {
      {"weights.lambda_loc", [&](const std::string& k, const json& v) { cfg.weights.lambda_loc = in_range(k, v, 0, 1); }},
      {"weights.lambda_vis", [&](const std::string& k, const json& v) { cfg.weights.lambda_vis = in_range(k, v, 0, 1); }},
      {"weights.lambda_geo", [&](const std::string& k, const json& v) { cfg.weights.lambda_geo = in_range(k, v, 0, 1); }},
      {"weights.alpha", [&](const std::string& k, const json& v) { cfg.weights.alpha = in_range(k, v, 0, 1); }},
      {"grpo.k",
       [&](const std::string& k, const json& v) {
         cfg.grpo.k = static_cast<std::size_t>(as_count(k, v));
         if (cfg.grpo.k < 2) throw ConfigError("\"grpo.k\" must be at least 2");
       }},
      {"grpo.epsilon_clip", [&](const std::string& k, const json& v) { cfg.grpo.epsilon_clip = positive(k, v); }},
      {"grpo.beta_kl", [&](const std::string& k, const json& v) { cfg.grpo.beta_kl = non_negative(k, v); }},
      {"grpo.learning_rate", [&](const std::string& k, const json& v) { cfg.grpo.learning_rate = positive(k, v); }},
      {"grpo.steps", [&](const std::string& k, const json& v) { cfg.grpo.steps = static_cast<std::size_t>(as_count(k, v)); }},
      {"grpo.seed", [&](const std::string& k, const json& v) { cfg.grpo.seed = as_count(k, v); }},
      {"grpo.sigma_floor", [&](const std::string& k, const json& v) { cfg.grpo.sigma_floor = positive(k, v); }},
      {"grpo.ref_mode",
       [&](const std::string& k, const json& v) {
         std::string mode = as_string(k, v);
         if (mode == "initial") cfg.grpo.ref_mode = RefMode::initial;
         else if (mode == "previous") cfg.grpo.ref_mode = RefMode::previous;
         else throw ConfigError("\"" + k + "\" must be \"initial\" or \"previous\"");
       }},
      {"curation.loc_score_min", [&](const std::string& k, const json& v) { cfg.curation.loc_score_min = in_range(k, v, 0, 1); }},
      {"curation.distance_gate_km", [&](const std::string& k, const json& v) { cfg.curation.distance_gate_km = positive(k, v); }},
      {"curation.consensus_jaccard_min", [&](const std::string& k, const json& v) { cfg.curation.consensus_jaccard_min = in_range(k, v, 0, 1); }},
      {"curation.grounding_min", [&](const std::string& k, const json& v) { cfg.curation.grounding_min = in_range(k, v, 0, 1); }},
      {"curation.require_city_consensus", [&](const std::string& k, const json& v) { cfg.curation.require_city_consensus = as_bool(k, v); }},
      {"scorer.w0", [&](const std::string& k, const json& v) { cfg.scorer.w0 = as_number(k, v); }},
      {"scorer.w1", [&](const std::string& k, const json& v) { cfg.scorer.w1 = as_number(k, v); }},
      {"scorer.w2", [&](const std::string& k, const json& v) { cfg.scorer.w2 = as_number(k, v); }},
      {"paths.gazetteer", [&](const std::string& k, const json& v) { cfg.paths.gazetteer = as_string(k, v); }},
      {"paths.fixture_scores", [&](const std::string& k, const json& v) { cfg.paths.fixture_scores = as_string(k, v); }},
      {"paths.log_dir", [&](const std::string& k, const json& v) { cfg.paths.log_dir = as_string(k, v); }},
  };

  for (const auto& [key, value] : doc.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown key \"" + key + "\"");
    it->second(key, value);
  }
  cfg.grpo.weights = cfg.weights;
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace georl

#include "georl/rewards.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "georl/errors.hpp"
#include "georl/text.hpp"

namespace georl {

LocalizabilityScorer LocalizabilityScorer::fixture(std::map<std::string, double> table) {
  LocalizabilityScorer s;
  s.kind = Kind::fixture;
  s.fixture_table = std::move(table);
  return s;
}

LocalizabilityScorer LocalizabilityScorer::heuristic(double w0, double w1, double w2) {
  LocalizabilityScorer s;
  s.kind = Kind::heuristic;
  s.w0 = w0;
  s.w1 = w1;
  s.w2 = w2;
  return s;
}

LocalizabilityScorer LocalizabilityScorer::load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fixture score file: " + path);
  std::map<std::string, double> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(line_no, e.what());
    }
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("score") || !obj["score"].is_number())
      throw SchemaError(line_no, "expected {\"id\": str, \"score\": num}");
    double score = obj["score"].get<double>();
    if (score < 0.0 || score > 1.0) throw SchemaError(line_no, "score out of range [0, 1]");
    table[obj["id"].get<std::string>()] = score;
  }
  return fixture(std::move(table));
}

namespace {

// Whole-token containment: the shorter string's token sequence appears as a
// contiguous run inside the other's.
bool token_subsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t start = 0; start + needle.size() <= hay.size(); ++start) {
    bool all = true;
    for (std::size_t i = 0; i < needle.size(); ++i) {
      if (hay[start + i] != needle[i]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool strings_soft_match(const std::string& a, const std::string& b) {
  if (a == b) return true;
  auto ta = tokenize(a);
  auto tb = tokenize(b);
  if (token_subsequence(ta, tb) || token_subsequence(tb, ta)) return true;
  std::set<std::string> sa(ta.begin(), ta.end());
  std::set<std::string> sb(tb.begin(), tb.end());
  return token_jaccard(sa, sb) >= 0.5;
}

}  // namespace

int soft_match(const Entity& entity, const VisualElementSet& visual) {
  for (const auto& v : visual.elements) {
    if (strings_soft_match(entity.text, v)) return 1;
  }
  return 0;
}

double visual_grounding_reward(const std::vector<Entity>& entities, const VisualElementSet& visual) {
  if (entities.empty()) return 0.0;
  int matched = 0;
  for (const auto& e : entities) matched += soft_match(e, visual);
  return static_cast<double>(matched) / static_cast<double>(entities.size());
}

double geo_accuracy_reward(const GeoLabel& pred, const GeoLabel& truth, double alpha) {
  if (pred.country != truth.country) return 0.0;
  return pred.city == truth.city ? 1.0 : 1.0 - alpha;
}

double localizability_reward(const std::string& sample_id, const ReasoningTrace& trace,
                             const VisualElementSet& visual, const LocalizabilityScorer& scorer) {
  if (scorer.kind == LocalizabilityScorer::Kind::fixture) {
    auto it = scorer.fixture_table.find(sample_id);
    if (it == scorer.fixture_table.end()) throw UnknownSampleId(sample_id);
    return it->second;
  }
  int grounded = 0;
  for (const auto& e : trace.entities) grounded += soft_match(e, visual);
  int ungrounded = static_cast<int>(trace.entities.size()) - grounded;
  double z = scorer.w0 + scorer.w1 * grounded - scorer.w2 * ungrounded;
  return 1.0 / (1.0 + std::exp(-z));
}

double composite_reward(double r_loc, double r_vis, double r_geo, const RewardWeights& weights) {
  return weights.lambda_loc * r_loc + weights.lambda_vis * r_vis + weights.lambda_geo * r_geo;
}

}  // namespace georl

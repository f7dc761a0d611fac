#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "georl/config.hpp"
#include "georl/corpus.hpp"
#include "georl/curation.hpp"
#include "georl/errors.hpp"
#include "georl/eval.hpp"
#include "georl/gazetteer.hpp"
#include "georl/grpo.hpp"
#include "georl/rewards.hpp"
#include "georl/text.hpp"

namespace {

using namespace georl;
using nlohmann::json;

// 0 success, 1 I/O, 2 schema/validation, 3 runtime constraint violation.
int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return 1;
  if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const DuplicateId*>(&e) ||
      dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UnknownPredictionId*>(&e) ||
      dynamic_cast<const UnknownSampleId*>(&e) || dynamic_cast<const EmptyAfterNormalization*>(&e) ||
      dynamic_cast<const NoAnnotations*>(&e) || dynamic_cast<const MissingThinkBlock*>(&e) ||
      dynamic_cast<const MissingCountryLine*>(&e) || dynamic_cast<const MissingCityLine*>(&e))
    return 2;
  return 3;
}

struct CompletionRecord {
  std::string id;
  std::string raw;
  std::vector<Entity> entities;
};

// JSONL rows {"id": str, "completion": str, "entities": [{"text","type"}]?}.
std::vector<CompletionRecord> load_completions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open completions file: " + path);
  std::vector<CompletionRecord> records;
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
    try {
      if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get<std::string>().empty())
        throw std::runtime_error("missing or empty id");
      if (!obj.contains("completion") || !obj["completion"].is_string())
        throw std::runtime_error("missing completion string");
      CompletionRecord rec;
      rec.id = obj["id"].get<std::string>();
      rec.raw = obj["completion"].get<std::string>();
      if (obj.contains("entities")) {
        if (!obj["entities"].is_array()) throw std::runtime_error("entities must be an array");
        for (const auto& e : obj["entities"]) {
          if (!e.is_object() || !e.contains("text") || !e["text"].is_string())
            throw std::runtime_error("entity needs a string text field");
          rec.entities.push_back(
              {normalize_place(e["text"].get<std::string>()), e.value("type", std::string{})});
        }
      }
      records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw SchemaError(line_no, e.what());
    }
  }
  return records;
}

std::optional<Gazetteer> load_gazetteer_if_configured(const AppConfig& cfg) {
  if (cfg.paths.gazetteer.empty()) return std::nullopt;
  return Gazetteer::load(cfg.paths.gazetteer);
}

LocalizabilityScorer make_scorer(const AppConfig& cfg) {
  if (!cfg.paths.fixture_scores.empty())
    return LocalizabilityScorer::load_fixture(cfg.paths.fixture_scores);
  return LocalizabilityScorer::heuristic(cfg.scorer.w0, cfg.scorer.w1, cfg.scorer.w2);
}

int run_curate(const AppConfig& cfg, const std::string& input, const std::string& output) {
  auto corpus = load_corpus(input);
  auto gazetteer = load_gazetteer_if_configured(cfg);
  auto result = run_pipeline(corpus, cfg.curation, gazetteer ? &*gazetteer : nullptr);
  save_corpus(result.retained, output);

  json stats{{"pipeline", json::parse(result.stats.to_json())},
             {"dataset", json::parse(dataset_stats(result.retained).to_json())}};
  std::string stats_path = output + ".stats.json";
  std::ofstream out(stats_path, std::ios::binary);
  if (!out) throw IoError("cannot write stats file: " + stats_path);
  out << stats.dump() << '\n';
  if (!out.flush()) throw IoError("write failed: " + stats_path);
  return 0;
}

int run_reward(const AppConfig& cfg, const std::string& corpus_path, const std::string& completions_path) {
  auto corpus = load_corpus(corpus_path);
  std::map<std::string, const Sample*> by_id;
  for (const auto& s : corpus) by_id[s.id] = &s;

  auto completions = load_completions(completions_path);
  auto scorer = make_scorer(cfg);
  for (const auto& rec : completions) {
    auto found = by_id.find(rec.id);
    if (found == by_id.end()) throw UnknownPredictionId(rec.id);
    const Sample& sample = *found->second;
    ParsedCompletion parsed = parse_completion(rec.raw);
    ReasoningTrace trace{parsed.think, rec.entities};
    double r_loc = localizability_reward(rec.id, trace, sample.segmentation, scorer);
    double r_vis = visual_grounding_reward(rec.entities, sample.segmentation);
    GeoLabel pred{parsed.country, parsed.city, std::nullopt};
    double r_geo = geo_accuracy_reward(pred, sample.truth, cfg.weights.alpha);
    json row{{"id", rec.id},
             {"r_loc", r_loc},
             {"r_vis", r_vis},
             {"r_geo", r_geo},
             {"reward", composite_reward(r_loc, r_vis, r_geo, cfg.weights)}};
    std::cout << row.dump() << '\n';
  }
  return 0;
}

int run_train(const AppConfig& cfg, const std::string& prompts_path, const std::string& out_dir) {
  auto prompts = load_prompts(prompts_path, cfg.weights.alpha);
  auto result = train(prompts, cfg.grpo);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  auto write_file = [](const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out << body;
    if (!out.flush()) throw IoError("write failed: " + path);
  };
  write_file(out_dir + "/train_log.csv", result.log.to_csv());
  write_file(out_dir + "/policy.json", result.policy.to_json() + "\n");
  return 0;
}

int run_eval(const AppConfig& cfg, const std::string& corpus_path, const std::string& predictions_path) {
  if (cfg.paths.gazetteer.empty())
    throw ConfigError("eval needs \"paths.gazetteer\" to be configured");
  Gazetteer gazetteer = Gazetteer::load(cfg.paths.gazetteer);
  auto corpus = load_corpus(corpus_path);
  auto completions = load_completions(predictions_path);
  std::map<std::string, ParsedCompletion> predictions;
  for (const auto& rec : completions) {
    if (!predictions.emplace(rec.id, parse_completion(rec.raw)).second) throw DuplicateId(rec.id);
  }
  EvalReport report = evaluate(corpus, predictions, gazetteer);
  std::cout << report.to_json() << '\n';
  return 0;
}

int run_stats(const std::string& corpus_path) {
  auto corpus = load_corpus(corpus_path);
  std::cout << dataset_stats(corpus).to_json() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward shaping, GRPO training, data curation, and evaluation for "
               "reasoning-driven geo-localization experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string input;
  std::string output;
  std::string predictions;
  std::optional<std::uint64_t> seed_override;
  app.add_option("--config", config_path, "flat JSON config file");

  auto* curate = app.add_subcommand("curate", "filter a corpus through the verification gates");
  curate->add_option("--input", input, "corpus JSONL")->required();
  curate->add_option("--output", output, "curated corpus JSONL (stats sidecar alongside)")->required();

  auto* reward = app.add_subcommand("reward", "score completions against a corpus");
  reward->add_option("--input", input, "corpus JSONL")->required();
  reward->add_option("--predictions", predictions, "completions JSONL")->required();

  auto* train_cmd = app.add_subcommand("train", "run the toy-policy optimizer");
  train_cmd->add_option("--input", input, "prompts JSONL")->required();
  train_cmd->add_option("--output", output, "output directory for train_log.csv and policy.json");
  train_cmd->add_option("--seed", seed_override, "override the config seed");

  auto* eval_cmd = app.add_subcommand("eval", "threshold-accuracy report for predictions");
  eval_cmd->add_option("--input", input, "corpus JSONL")->required();
  eval_cmd->add_option("--predictions", predictions, "completions JSONL")->required();

  auto* stats_cmd = app.add_subcommand("stats", "dataset statistics for a corpus");
  stats_cmd->add_option("--input", input, "corpus JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    AppConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed_override) {
      cfg.grpo.seed = *seed_override;
    }
    if (curate->parsed()) return run_curate(cfg, input, output);
    if (reward->parsed()) return run_reward(cfg, input, predictions);
    if (train_cmd->parsed()) {
      std::string out_dir = output.empty() ? cfg.paths.log_dir : output;
      return run_train(cfg, input, out_dir);
    }
    if (eval_cmd->parsed()) return run_eval(cfg, input, predictions);
    if (stats_cmd->parsed()) return run_stats(input);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}

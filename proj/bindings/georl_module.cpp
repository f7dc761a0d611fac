#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "georl/completion.hpp"
#include "georl/config.hpp"
#include "georl/corpus.hpp"
#include "georl/curation.hpp"
#include "georl/errors.hpp"
#include "georl/eval.hpp"
#include "georl/gazetteer.hpp"
#include "georl/geodesy.hpp"
#include "georl/grpo.hpp"
#include "georl/rewards.hpp"
#include "georl/text.hpp"

namespace py = pybind11;
using namespace georl;

namespace {

VisualElementSet make_visual(const std::vector<std::string>& elements) {
  VisualElementSet v;
  for (const auto& e : elements) v.elements.insert(e);
  return v;
}

std::vector<Entity> make_entities(const std::vector<std::string>& texts) {
  std::vector<Entity> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back({t, ""});
  return out;
}

}  // namespace

PYBIND11_MODULE(_georl, m) {
  m.doc() = "Rewards, GRPO toy-policy training, curation, and evaluation for "
            "reasoning-driven geo-localization";

  py::register_exception<Error>(m, "Error");

  // text / parsing
  m.def("normalize_place", [](const std::string& raw) { return normalize_place(raw); },
        py::arg("raw"));

  py::class_<ParsedCompletion>(m, "ParsedCompletion")
      .def(py::init([](std::string think, std::string country, std::string city) {
             return ParsedCompletion{std::move(think), std::move(country), std::move(city)};
           }),
           py::arg("think"), py::arg("country"), py::arg("city"))
      .def_readwrite("think", &ParsedCompletion::think)
      .def_readwrite("country", &ParsedCompletion::country)
      .def_readwrite("city", &ParsedCompletion::city)
      .def("__repr__", [](const ParsedCompletion& p) {
        return "ParsedCompletion(country='" + p.country + "', city='" + p.city + "')";
      });

  m.def("parse_completion", [](const std::string& raw) { return parse_completion(raw); },
        py::arg("raw"));
  m.def("render_completion", &render_completion, py::arg("completion"));

  // rewards; string inputs must already be normalized (see normalize_place)
  py::class_<RewardWeights>(m, "RewardWeights")
      .def(py::init<>())
      .def(py::init([](double loc, double vis, double geo, double alpha) {
             return RewardWeights{loc, vis, geo, alpha};
           }),
           py::arg("lambda_loc") = 0.2, py::arg("lambda_vis") = 0.5, py::arg("lambda_geo") = 1.0,
           py::arg("alpha") = 0.5)
      .def_readwrite("lambda_loc", &RewardWeights::lambda_loc)
      .def_readwrite("lambda_vis", &RewardWeights::lambda_vis)
      .def_readwrite("lambda_geo", &RewardWeights::lambda_geo)
      .def_readwrite("alpha", &RewardWeights::alpha);

  m.def(
      "soft_match",
      [](const std::string& entity, const std::vector<std::string>& visual) {
        return soft_match(Entity{entity, ""}, make_visual(visual));
      },
      py::arg("entity"), py::arg("visual"));
  m.def(
      "visual_grounding_reward",
      [](const std::vector<std::string>& entities, const std::vector<std::string>& visual) {
        return visual_grounding_reward(make_entities(entities), make_visual(visual));
      },
      py::arg("entities"), py::arg("visual"));
  m.def(
      "geo_accuracy_reward",
      [](const std::string& pred_country, const std::string& pred_city,
         const std::string& truth_country, const std::string& truth_city, double alpha) {
        return geo_accuracy_reward(GeoLabel{pred_country, pred_city, std::nullopt},
                                   GeoLabel{truth_country, truth_city, std::nullopt}, alpha);
      },
      py::arg("pred_country"), py::arg("pred_city"), py::arg("truth_country"),
      py::arg("truth_city"), py::arg("alpha") = 0.5);
  m.def(
      "heuristic_localizability",
      [](const std::vector<std::string>& entities, const std::vector<std::string>& visual,
         double w0, double w1, double w2) {
        ReasoningTrace trace{"", make_entities(entities)};
        return localizability_reward("", trace, make_visual(visual),
                                     LocalizabilityScorer::heuristic(w0, w1, w2));
      },
      py::arg("entities"), py::arg("visual"), py::arg("w0") = -1.0, py::arg("w1") = 0.8,
      py::arg("w2") = 0.2);
  m.def(
      "composite_reward",
      [](double r_loc, double r_vis, double r_geo, const RewardWeights& w) {
        return composite_reward(r_loc, r_vis, r_geo, w);
      },
      py::arg("r_loc"), py::arg("r_vis"), py::arg("r_geo"), py::arg("weights") = RewardWeights{});

  // grpo
  m.def("group_advantages", &group_advantages, py::arg("rewards"), py::arg("sigma_floor") = 1e-8);
  m.def("likelihood_ratio", &likelihood_ratio, py::arg("logp_new"), py::arg("logp_old"));
  m.def("clipped_term", &clipped_term, py::arg("rho"), py::arg("advantage"), py::arg("epsilon"));
  m.def("categorical_kl", &categorical_kl, py::arg("p"), py::arg("q"));
  m.def("softmax", &softmax, py::arg("logits"));
  m.def("log_softmax", &log_softmax, py::arg("logits"));

  py::enum_<RefMode>(m, "RefMode")
      .value("initial", RefMode::initial)
      .value("previous", RefMode::previous);

  py::class_<GrpoConfig>(m, "GrpoConfig")
      .def(py::init<>())
      .def_readwrite("k", &GrpoConfig::k)
      .def_readwrite("epsilon_clip", &GrpoConfig::epsilon_clip)
      .def_readwrite("beta_kl", &GrpoConfig::beta_kl)
      .def_readwrite("learning_rate", &GrpoConfig::learning_rate)
      .def_readwrite("steps", &GrpoConfig::steps)
      .def_readwrite("seed", &GrpoConfig::seed)
      .def_readwrite("sigma_floor", &GrpoConfig::sigma_floor)
      .def_readwrite("weights", &GrpoConfig::weights)
      .def_readwrite("ref_mode", &GrpoConfig::ref_mode);

  py::class_<Candidate>(m, "Candidate")
      .def(py::init([](const std::string& completion, double r_loc, double r_vis, double r_geo) {
             return Candidate{parse_completion(completion), r_loc, r_vis, r_geo};
           }),
           py::arg("completion"), py::arg("r_loc") = 0.0, py::arg("r_vis") = 0.0,
           py::arg("r_geo") = 0.0)
      .def_readonly("completion", &Candidate::completion)
      .def_readwrite("r_loc", &Candidate::r_loc)
      .def_readwrite("r_vis", &Candidate::r_vis)
      .def_readwrite("r_geo", &Candidate::r_geo);

  py::class_<Prompt>(m, "Prompt")
      .def(py::init([](std::string id, std::vector<Candidate> candidates) {
             return Prompt{std::move(id), std::move(candidates), GeoLabel{}};
           }),
           py::arg("id"), py::arg("candidates"))
      .def_readonly("id", &Prompt::id)
      .def_readonly("candidates", &Prompt::candidates);

  py::class_<ToyPolicy>(m, "ToyPolicy")
      .def(py::init<>())
      .def_readwrite("logits", &ToyPolicy::logits)
      .def("probs", &ToyPolicy::probs, py::arg("prompt_id"))
      .def("to_json", &ToyPolicy::to_json);

  py::class_<TrainingLogRecord>(m, "TrainingLogRecord")
      .def_readonly("step", &TrainingLogRecord::step)
      .def_readonly("mean_r_loc", &TrainingLogRecord::mean_r_loc)
      .def_readonly("mean_r_vis", &TrainingLogRecord::mean_r_vis)
      .def_readonly("mean_r_geo", &TrainingLogRecord::mean_r_geo)
      .def_readonly("mean_reward", &TrainingLogRecord::mean_reward)
      .def_readonly("objective", &TrainingLogRecord::objective)
      .def_readonly("mean_kl", &TrainingLogRecord::mean_kl);

  py::class_<TrainingLog>(m, "TrainingLog")
      .def_readonly("records", &TrainingLog::records)
      .def("to_csv", &TrainingLog::to_csv);

  py::class_<TrainResult>(m, "TrainResult")
      .def_readonly("policy", &TrainResult::policy)
      .def_readonly("reference", &TrainResult::reference)
      .def_readonly("log", &TrainResult::log);

  m.def("train", &train, py::arg("prompts"), py::arg("config") = GrpoConfig{});
  m.def("load_prompts", &load_prompts, py::arg("path"), py::arg("alpha") = 0.5);

  // geodesy / eval
  m.def(
      "haversine_km",
      [](double lat1, double lon1, double lat2, double lon2) {
        return haversine_km({lat1, lon1}, {lat2, lon2});
      },
      py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"));
  m.def("threshold_accuracy", &threshold_accuracy, py::arg("distances_km"),
        py::arg("thresholds_km"));

  py::class_<Gazetteer>(m, "Gazetteer")
      .def(py::init<>())
      .def_static("load", &Gazetteer::load, py::arg("path"))
      .def("add_city", &Gazetteer::add_city, py::arg("country"), py::arg("city"), py::arg("coord"))
      .def("add_country_fallback", &Gazetteer::add_country_fallback, py::arg("country"),
           py::arg("coord"))
      .def(
          "resolve",
          [](const Gazetteer& g, const std::string& country, const std::string& city)
              -> std::optional<std::pair<double, double>> {
            auto hit = g.resolve(country, city);
            if (!hit) return std::nullopt;
            return std::make_pair(hit->lat, hit->lon);
          },
          py::arg("country"), py::arg("city"))
      .def_property_readonly("city_count", &Gazetteer::city_count)
      .def_property_readonly("country_count", &Gazetteer::country_count);

  py::class_<LatLon>(m, "LatLon")
      .def(py::init([](double lat, double lon) { return LatLon{lat, lon}; }), py::arg("lat"),
           py::arg("lon"))
      .def_readwrite("lat", &LatLon::lat)
      .def_readwrite("lon", &LatLon::lon);

  py::class_<GeoLabel>(m, "GeoLabel")
      .def_readonly("country", &GeoLabel::country)
      .def_readonly("city", &GeoLabel::city)
      .def_readonly("coord", &GeoLabel::coord);

  py::class_<Sample>(m, "Sample")
      .def_readonly("id", &Sample::id)
      .def_readonly("image_path", &Sample::image_path)
      .def_readonly("truth", &Sample::truth)
      .def_property_readonly("scene", [](const Sample& s) { return to_string(s.scene); })
      .def_property_readonly("segmentation",
                             [](const Sample& s) {
                               return std::vector<std::string>(s.segmentation.elements.begin(),
                                                               s.segmentation.elements.end());
                             })
      .def_readonly("label_localizable", &Sample::label_localizable);

  m.def("load_corpus", &load_corpus, py::arg("path"));
  m.def("save_corpus", &save_corpus, py::arg("corpus"), py::arg("path"));

  // curation
  py::class_<CurationConfig>(m, "CurationConfig")
      .def(py::init<>())
      .def_readwrite("loc_score_min", &CurationConfig::loc_score_min)
      .def_readwrite("distance_gate_km", &CurationConfig::distance_gate_km)
      .def_readwrite("consensus_jaccard_min", &CurationConfig::consensus_jaccard_min)
      .def_readwrite("grounding_min", &CurationConfig::grounding_min)
      .def_readwrite("require_city_consensus", &CurationConfig::require_city_consensus);

  py::class_<PipelineStats>(m, "PipelineStats")
      .def_readonly("input_count", &PipelineStats::input_count)
      .def_readonly("dropped_localizability", &PipelineStats::dropped_localizability)
      .def_readonly("dropped_distance", &PipelineStats::dropped_distance)
      .def_readonly("dropped_consensus", &PipelineStats::dropped_consensus)
      .def_readonly("dropped_grounding", &PipelineStats::dropped_grounding)
      .def_readonly("retained_count", &PipelineStats::retained_count)
      .def("to_json", &PipelineStats::to_json);

  py::class_<DatasetStats>(m, "DatasetStats")
      .def_readonly("n_samples", &DatasetStats::n_samples)
      .def_readonly("n_countries", &DatasetStats::n_countries)
      .def_readonly("n_cities", &DatasetStats::n_cities)
      .def_readonly("n_indoor", &DatasetStats::n_indoor)
      .def_readonly("n_natural", &DatasetStats::n_natural)
      .def_readonly("n_urban", &DatasetStats::n_urban)
      .def("to_json", &DatasetStats::to_json);

  m.def(
      "run_pipeline",
      [](const std::vector<Sample>& corpus, const CurationConfig& cfg, const Gazetteer* gaz) {
        auto result = run_pipeline(corpus, cfg, gaz);
        return std::make_pair(result.retained, result.stats);
      },
      py::arg("corpus"), py::arg("config") = CurationConfig{}, py::arg("gazetteer") = nullptr);
  m.def("dataset_stats", &dataset_stats, py::arg("dataset"));

  py::class_<EvalReport>(m, "EvalReport").def("to_json", &EvalReport::to_json);

  m.def(
      "evaluate",
      [](const std::vector<Sample>& samples,
         const std::map<std::string, ParsedCompletion>& predictions, const Gazetteer& gaz) {
        return evaluate(samples, predictions, gaz);
      },
      py::arg("samples"), py::arg("predictions"), py::arg("gazetteer"));
}

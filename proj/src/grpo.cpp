#include "georl/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "georl/errors.hpp"
#include "georl/text.hpp"

namespace georl {

ToyPolicy ToyPolicy::uniform(const std::vector<Prompt>& prompts) {
  ToyPolicy policy;
  for (const auto& p : prompts) policy.logits[p.id] = std::vector<double>(p.candidates.size(), 0.0);
  return policy;
}

const std::vector<double>& ToyPolicy::logits_for(const std::string& prompt_id) const {
  auto it = logits.find(prompt_id);
  if (it == logits.end()) throw UnknownPrompt(prompt_id);
  return it->second;
}

std::vector<double> ToyPolicy::probs(const std::string& prompt_id) const {
  return softmax(logits_for(prompt_id));
}

std::string ToyPolicy::to_json() const {
  nlohmann::json prompts;
  for (const auto& [id, l] : logits) {
    prompts[id] = {{"logits", l}, {"probs", softmax(l)}};
  }
  return nlohmann::json{{"prompts", prompts}}.dump();
}

std::vector<double> softmax(const std::vector<double>& logits) {
  std::vector<double> out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

std::vector<double> log_softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("empty logit vector");
  double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - max);
  double log_z = max + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - log_z;
  return out;
}

std::vector<double> group_advantages(const std::vector<double>& rewards, double sigma_floor) {
  const std::size_t k = rewards.size();
  if (k < 2) throw GroupTooSmall(k);
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  double sigma = std::sqrt(var / static_cast<double>(k));
  std::vector<double> advantages(k, 0.0);
  if (sigma < sigma_floor) return advantages;
  for (std::size_t j = 0; j < k; ++j) advantages[j] = (rewards[j] - mean) / sigma;
  return advantages;
}

double likelihood_ratio(double logp_new, double logp_old) { return std::exp(logp_new - logp_old); }

double clipped_term(double rho, double advantage, double epsilon) {
  double clipped_rho = std::clamp(rho, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(rho * advantage, clipped_rho * advantage);
}

double categorical_kl(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("distributions differ in length");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw SupportMismatch();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

GroupBatch sample_group(const ToyPolicy& policy, const ToyPolicy& ref_policy, const Prompt& prompt,
                        std::size_t k, const RewardWeights& weights, SplitMix64& rng) {
  if (k < 2) throw GroupTooSmall(k);
  const auto& logits = policy.logits_for(prompt.id);
  if (logits.size() != prompt.candidates.size())
    throw std::invalid_argument("policy logits do not match candidate count for " + prompt.id);
  const auto logp = log_softmax(logits);
  const auto probs = softmax(logits);
  const auto logp_ref = log_softmax(ref_policy.logits_for(prompt.id));

  GroupBatch batch;
  batch.prompt_id = prompt.id;
  batch.sampled_indices.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    double u = rng.next_double();
    double cum = 0.0;
    std::size_t idx = probs.size() - 1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) {
        idx = i;
        break;
      }
    }
    const Candidate& c = prompt.candidates[idx];
    batch.sampled_indices.push_back(idx);
    batch.r_loc.push_back(c.r_loc);
    batch.r_vis.push_back(c.r_vis);
    batch.r_geo.push_back(c.r_geo);
    batch.rewards.push_back(composite_reward(c.r_loc, c.r_vis, c.r_geo, weights));
    batch.logp_new.push_back(logp[idx]);
    batch.logp_old.push_back(logp[idx]);
    batch.logp_ref.push_back(logp_ref[idx]);
  }
  return batch;
}

double grpo_objective(const GroupBatch& batch, const ToyPolicy& policy,
                      const std::vector<double>& ref_probs, const GrpoConfig& config) {
  const auto logp = log_softmax(policy.logits_for(batch.prompt_id));
  const auto advantages = group_advantages(batch.rewards, config.sigma_floor);
  const std::size_t k = batch.sampled_indices.size();
  double surrogate = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double rho = likelihood_ratio(logp[batch.sampled_indices[j]], batch.logp_old[j]);
    surrogate += clipped_term(rho, advantages[j], config.epsilon_clip);
  }
  surrogate /= static_cast<double>(k);
  double kl = categorical_kl(softmax(policy.logits_for(batch.prompt_id)), ref_probs);
  return surrogate - config.beta_kl * kl;
}

std::vector<double> grpo_gradient(const GroupBatch& batch, const ToyPolicy& policy,
                                  const std::vector<double>& ref_probs, const GrpoConfig& config) {
  const auto& logits = policy.logits_for(batch.prompt_id);
  const auto logp = log_softmax(logits);
  const auto probs = softmax(logits);
  const auto advantages = group_advantages(batch.rewards, config.sigma_floor);
  const std::size_t k = batch.sampled_indices.size();
  const std::size_t n = logits.size();

  std::vector<double> grad(n, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    std::size_t idx = batch.sampled_indices[j];
    double rho = likelihood_ratio(logp[idx], batch.logp_old[j]);
    double unclipped = rho * advantages[j];
    double clipped = std::clamp(rho, 1.0 - config.epsilon_clip, 1.0 + config.epsilon_clip) * advantages[j];
    // min() selects the unclipped branch on ties, which is the one that
    // depends on the logits; a strictly smaller clipped branch is constant.
    if (unclipped > clipped) continue;
    // d/d_logit_c [rho_j A_j] = rho_j A_j (1[idx_j = c] - p_c)
    double coeff = unclipped / static_cast<double>(k);
    grad[idx] += coeff;
    for (std::size_t c = 0; c < n; ++c) grad[c] -= coeff * probs[c];
  }

  if (config.beta_kl != 0.0) {
    double kl = categorical_kl(probs, ref_probs);
    // d/d_logit_c KL(p || q) = p_c (ln(p_c / q_c) - KL)
    for (std::size_t c = 0; c < n; ++c) {
      if (probs[c] <= 0.0) continue;
      grad[c] -= config.beta_kl * probs[c] * (std::log(probs[c] / ref_probs[c]) - kl);
    }
  }
  return grad;
}

StepMetrics policy_step(ToyPolicy& policy, const std::vector<GroupBatch>& batches,
                        const ToyPolicy& ref_policy, const GrpoConfig& config) {
  for (const auto& batch : batches) {
    auto ref_probs = softmax(ref_policy.logits_for(batch.prompt_id));
    auto grad = grpo_gradient(batch, policy, ref_probs, config);
    auto it = policy.logits.find(batch.prompt_id);
    if (it == policy.logits.end()) throw UnknownPrompt(batch.prompt_id);
    for (std::size_t c = 0; c < grad.size(); ++c) it->second[c] += config.learning_rate * grad[c];
  }

  StepMetrics metrics;
  std::size_t n_samples = 0;
  for (const auto& batch : batches) {
    auto ref_probs = softmax(ref_policy.logits_for(batch.prompt_id));
    metrics.objective += grpo_objective(batch, policy, ref_probs, config);
    metrics.mean_kl += categorical_kl(softmax(policy.logits_for(batch.prompt_id)), ref_probs);
    for (std::size_t j = 0; j < batch.sampled_indices.size(); ++j) {
      metrics.mean_r_loc += batch.r_loc[j];
      metrics.mean_r_vis += batch.r_vis[j];
      metrics.mean_r_geo += batch.r_geo[j];
      metrics.mean_reward += batch.rewards[j];
      ++n_samples;
    }
  }
  if (!batches.empty()) {
    metrics.objective /= static_cast<double>(batches.size());
    metrics.mean_kl /= static_cast<double>(batches.size());
  }
  if (n_samples > 0) {
    metrics.mean_r_loc /= static_cast<double>(n_samples);
    metrics.mean_r_vis /= static_cast<double>(n_samples);
    metrics.mean_r_geo /= static_cast<double>(n_samples);
    metrics.mean_reward /= static_cast<double>(n_samples);
  }
  return metrics;
}

TrainResult train(const std::vector<Prompt>& prompts, const GrpoConfig& config) {
  if (prompts.empty()) throw EmptyInput("prompt list");
  for (const auto& p : prompts) {
    if (p.candidates.size() < 2) throw GroupTooSmall(p.candidates.size());
  }

  TrainResult result;
  result.policy = ToyPolicy::uniform(prompts);
  result.reference = result.policy;
  SplitMix64 rng(config.seed);

  for (std::size_t step = 1; step <= config.steps; ++step) {
    if (config.ref_mode == RefMode::previous) result.reference = result.policy;
    std::vector<GroupBatch> batches;
    batches.reserve(prompts.size());
    for (const auto& prompt : prompts)
      batches.push_back(sample_group(result.policy, result.reference, prompt, config.k,
                                     config.weights, rng));
    StepMetrics m = policy_step(result.policy, batches, result.reference, config);
    result.log.records.push_back({step, m.mean_r_loc, m.mean_r_vis, m.mean_r_geo, m.mean_reward,
                                  m.objective, m.mean_kl});
  }
  return result;
}

std::string TrainingLog::to_csv() const {
  std::string out = "step,mean_r_loc,mean_r_vis,mean_r_geo,mean_reward,objective,mean_kl\n";
  char buf[256];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%zu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", r.step,
                  r.mean_r_loc, r.mean_r_vis, r.mean_r_geo, r.mean_reward, r.objective, r.mean_kl);
    out += buf;
  }
  return out;
}

double gradient_check(const ToyPolicy& policy, const GroupBatch& batch,
                      const std::vector<double>& ref_probs, const GrpoConfig& config, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
  const auto logp = log_softmax(policy.logits_for(batch.prompt_id));
  for (std::size_t j = 0; j < batch.sampled_indices.size(); ++j) {
    double rho = likelihood_ratio(logp[batch.sampled_indices[j]], batch.logp_old[j]);
    if (std::abs(rho - (1.0 - config.epsilon_clip)) <= h ||
        std::abs(rho - (1.0 + config.epsilon_clip)) <= h)
      throw ClipBoundaryHit();
  }

  const auto analytic = grpo_gradient(batch, policy, ref_probs, config);
  double max_err = 0.0;
  for (std::size_t c = 0; c < analytic.size(); ++c) {
    ToyPolicy shifted = policy;
    shifted.logits[batch.prompt_id][c] += h;
    double f_plus = grpo_objective(batch, shifted, ref_probs, config);
    shifted.logits[batch.prompt_id][c] -= 2.0 * h;
    double f_minus = grpo_objective(batch, shifted, ref_probs, config);
    double fd = (f_plus - f_minus) / (2.0 * h);
    double err = std::abs(analytic[c] - fd) / std::max({1.0, std::abs(analytic[c]), std::abs(fd)});
    max_err = std::max(max_err, err);
  }
  return max_err;
}

namespace {

using nlohmann::json;

GeoLabel parse_prompt_truth(const json& obj) {
  GeoLabel g;
  if (!obj.is_object() || !obj.contains("country") || !obj["country"].is_string() ||
      !obj.contains("city") || !obj["city"].is_string())
    throw std::runtime_error("truth must carry string country and city");
  g.country = normalize_place(obj["country"].get<std::string>());
  g.city = normalize_place(obj["city"].get<std::string>());
  if (obj.contains("lat") && obj.contains("lon") && obj["lat"].is_number() && obj["lon"].is_number())
    g.coord = LatLon{obj["lat"].get<double>(), obj["lon"].get<double>()};
  return g;
}

std::vector<Entity> parse_prompt_entities(const json& arr) {
  std::vector<Entity> entities;
  if (!arr.is_array()) throw std::runtime_error("entities must be an array");
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("text") || !e["text"].is_string())
      throw std::runtime_error("entity needs a string text field");
    Entity ent;
    ent.text = normalize_place(e["text"].get<std::string>());
    ent.type = e.value("type", std::string{});
    entities.push_back(std::move(ent));
  }
  return entities;
}

}  // namespace

std::vector<Prompt> load_prompts(const std::string& path, double alpha) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open prompts file: " + path);
  std::vector<Prompt> prompts;
  std::unordered_set<std::string> seen;
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
      Prompt prompt;
      if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get<std::string>().empty())
        throw std::runtime_error("missing or empty id");
      prompt.id = obj["id"].get<std::string>();
      if (!obj.contains("truth")) throw std::runtime_error("missing truth");
      prompt.truth = parse_prompt_truth(obj["truth"]);

      VisualElementSet segmentation;
      if (obj.contains("segmentation")) {
        if (!obj["segmentation"].is_array())
          throw std::runtime_error("segmentation must be an array of strings");
        for (const auto& v : obj["segmentation"]) {
          if (!v.is_string()) throw std::runtime_error("segmentation elements must be strings");
          segmentation.elements.insert(normalize_place(v.get<std::string>()));
        }
      }

      if (!obj.contains("candidates") || !obj["candidates"].is_array() ||
          obj["candidates"].size() < 2)
        throw std::runtime_error("a prompt needs at least 2 candidates");
      for (const auto& jc : obj["candidates"]) {
        if (!jc.is_object() || !jc.contains("completion") || !jc["completion"].is_string())
          throw std::runtime_error("candidate needs a string completion field");
        Candidate cand;
        cand.completion = parse_completion(jc["completion"].get<std::string>());
        if (jc.contains("loc_score") && !jc["loc_score"].is_null()) {
          if (!jc["loc_score"].is_number()) throw std::runtime_error("loc_score must be a number or null");
          cand.r_loc = jc["loc_score"].get<double>();
          if (cand.r_loc < 0.0 || cand.r_loc > 1.0)
            throw std::runtime_error("loc_score out of range [0, 1]");
        }
        std::vector<Entity> entities;
        if (jc.contains("entities")) entities = parse_prompt_entities(jc["entities"]);
        cand.r_vis = visual_grounding_reward(entities, segmentation);
        GeoLabel pred{cand.completion.country, cand.completion.city, std::nullopt};
        cand.r_geo = geo_accuracy_reward(pred, prompt.truth, alpha);
        prompt.candidates.push_back(std::move(cand));
      }
      if (!seen.insert(prompt.id).second) throw DuplicateId(prompt.id);
      prompts.push_back(std::move(prompt));
    } catch (const DuplicateId&) {
      throw;
    } catch (const std::exception& e) {
      throw SchemaError(line_no, e.what());
    }
  }
  return prompts;
}

}  // namespace georl

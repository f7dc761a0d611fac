#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "georl/completion.hpp"
#include "georl/rewards.hpp"
#include "georl/rng.hpp"
#include "georl/types.hpp"

namespace georl {

/// One candidate completion with its precomputed reward components.
struct Candidate {
  ParsedCompletion completion;
  double r_loc = 0.0;
  double r_vis = 0.0;
  double r_geo = 0.0;
};

/// A prompt and its finite candidate pool. At least 2 candidates.
struct Prompt {
  std::string id;
  std::vector<Candidate> candidates;
  GeoLabel truth;
};

/// Per-prompt tabular categorical policy over the candidate pool.
struct ToyPolicy {
  std::map<std::string, std::vector<double>> logits;

  static ToyPolicy uniform(const std::vector<Prompt>& prompts);

  const std::vector<double>& logits_for(const std::string& prompt_id) const;
  std::vector<double> probs(const std::string& prompt_id) const;

  std::string to_json() const;
};

std::vector<double> softmax(const std::vector<double>& logits);
std::vector<double> log_softmax(const std::vector<double>& logits);

/// One sampled group for one prompt: k candidate draws with their rewards and
/// log-probabilities under the current, old, and reference policies. The
/// component vectors back the composite rewards for logging.
struct GroupBatch {
  std::string prompt_id;
  std::vector<std::size_t> sampled_indices;
  std::vector<double> rewards;
  std::vector<double> logp_new;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
  std::vector<double> r_loc;
  std::vector<double> r_vis;
  std::vector<double> r_geo;
};

enum class RefMode { initial, previous };

struct GrpoConfig {
  std::size_t k = 8;
  double epsilon_clip = 0.2;
  double beta_kl = 0.04;
  double learning_rate = 0.5;  // toy-policy scale; LVLM-scale runs use 1e-6
  std::size_t steps = 200;
  std::uint64_t seed = 0;
  double sigma_floor = 1e-8;
  RewardWeights weights;
  RefMode ref_mode = RefMode::initial;
};

struct TrainingLogRecord {
  std::size_t step = 0;
  double mean_r_loc = 0.0;
  double mean_r_vis = 0.0;
  double mean_r_geo = 0.0;
  double mean_reward = 0.0;
  double objective = 0.0;
  double mean_kl = 0.0;
};

struct TrainingLog {
  std::vector<TrainingLogRecord> records;

  /// Columns: step,mean_r_loc,mean_r_vis,mean_r_geo,mean_reward,objective,mean_kl
  std::string to_csv() const;
};

struct StepMetrics {
  double objective = 0.0;
  double mean_r_loc = 0.0;
  double mean_r_vis = 0.0;
  double mean_r_geo = 0.0;
  double mean_reward = 0.0;
  double mean_kl = 0.0;
};

struct TrainResult {
  ToyPolicy policy;
  ToyPolicy reference;
  TrainingLog log;
};

/// Group-normalized advantages: (r - mean) / population std. When the std
/// degenerates below sigma_floor every advantage is 0 (equal rewards carry no
/// ranking signal). Throws GroupTooSmall for groups under 2.
std::vector<double> group_advantages(const std::vector<double>& rewards, double sigma_floor);

/// exp(logp_new - logp_old).
double likelihood_ratio(double logp_new, double logp_old);

/// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
double clipped_term(double rho, double advantage, double epsilon);

/// Exact KL over a categorical support: sum p * ln(p / q), with 0 ln 0 = 0.
/// Throws SupportMismatch when p has mass where q is zero.
double categorical_kl(const std::vector<double>& p, const std::vector<double>& q);

/// Draws k candidate indices i.i.d. with replacement via inverse CDF over
/// softmax(logits), then fills rewards (composite of the stored components)
/// and log-probabilities. logp_old is taken from the sampling policy itself;
/// on-policy sampling makes the initial ratio exactly 1.
GroupBatch sample_group(const ToyPolicy& policy, const ToyPolicy& ref_policy, const Prompt& prompt,
                        std::size_t k, const RewardWeights& weights, SplitMix64& rng);

/// Clipped-surrogate objective for one group minus the KL penalty. logp_new
/// is recomputed from `policy`, so this is a function of the current logits;
/// logp_old stays frozen in the batch.
double grpo_objective(const GroupBatch& batch, const ToyPolicy& policy,
                      const std::vector<double>& ref_probs, const GrpoConfig& config);

/// Analytic gradient of grpo_objective with respect to the prompt's logits.
std::vector<double> grpo_gradient(const GroupBatch& batch, const ToyPolicy& policy,
                                  const std::vector<double>& ref_probs, const GrpoConfig& config);

/// One gradient-ascent step over all batches; returns metrics evaluated on
/// the updated policy.
StepMetrics policy_step(ToyPolicy& policy, const std::vector<GroupBatch>& batches,
                        const ToyPolicy& ref_policy, const GrpoConfig& config);

/// Full training loop: uniform init, reference frozen at initialization (or
/// re-snapshotted each step under RefMode::previous), one sampled group per
/// prompt per step. Deterministic given the config seed.
TrainResult train(const std::vector<Prompt>& prompts, const GrpoConfig& config);

/// Max relative error between the analytic gradient and central finite
/// differences with step h, over every logit of the batch's prompt. Relative
/// error uses a unit floor: |a - f| / max(1, |a|, |f|). Throws
/// ClipBoundaryHit when any likelihood ratio sits within h of 1 +- epsilon.
double gradient_check(const ToyPolicy& policy, const GroupBatch& batch,
                      const std::vector<double>& ref_probs, const GrpoConfig& config, double h);

/// Prompts from JSONL rows {"id", "truth", "candidates": [{"completion",
/// "loc_score", "entities"?}], "segmentation"?}. Geo rewards come from the
/// parsed completion against truth; grounding rewards from the candidate
/// entities against the prompt's segmentation set; loc_score is the
/// fixture-supplied localizability (null meaning no signal, scored 0).
std::vector<Prompt> load_prompts(const std::string& path, double alpha);

}  // namespace georl

// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria cover the reward tiers, group normalization,
// gradient correctness, toy-policy convergence, KL regularization, curation
// oracle equivalence, metric tiers, geodesy, grounding-reward properties,
// CLI determinism, and config fidelity.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "curation_oracle.hpp"
#include "georl/config.hpp"
#include "georl/curation.hpp"
#include "georl/eval.hpp"
#include "georl/geodesy.hpp"
#include "georl/grpo.hpp"
#include "georl/rewards.hpp"
#include "georl/rng.hpp"
#include "testutil.hpp"

using namespace georl;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

Prompt bandit_prompt(std::initializer_list<double> rewards) {
  Prompt p;
  p.id = "bandit";
  p.truth = {"atlantis", "poseidonia", std::nullopt};
  for (double r : rewards) {
    Candidate c;
    c.completion = {"", "atlantis", "poseidonia"};
    c.r_geo = r;
    p.candidates.push_back(c);
  }
  return p;
}

// ---------------------------------------------------------------------- C1
void geo_reward_tiers(Check& check) {
  const double alpha = 0.5;
  GeoLabel truth{"france", "paris", std::nullopt};
  GeoLabel both{"france", "paris", std::nullopt};
  GeoLabel country_only{"france", "lyon", std::nullopt};
  GeoLabel city_only{"japan", "paris", std::nullopt};
  GeoLabel neither{"japan", "kyoto", std::nullopt};
  check.expect(geo_accuracy_reward(both, truth, alpha) == 1.0, "full match must score 1.0");
  check.expect(geo_accuracy_reward(country_only, truth, alpha) == 0.5,
               "country-only match must score 1 - alpha");
  check.expect(geo_accuracy_reward(city_only, truth, alpha) == 0.0,
               "city match without country must score 0");
  check.expect(geo_accuracy_reward(neither, truth, alpha) == 0.0, "full mismatch must score 0");
}

// ---------------------------------------------------------------------- C2
void advantage_properties(Check& check) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t k = 2 + rng.next_u64() % 15;
    std::vector<double> rewards(k);
    for (auto& r : rewards) r = rng.next_double();
    auto adv = group_advantages(rewards, 1e-8);

    double mean = 0.0;
    for (double v : adv) mean += v;
    mean /= static_cast<double>(k);
    double var = 0.0;
    for (double v : adv) var += (v - mean) * (v - mean);
    double stddev = std::sqrt(var / static_cast<double>(k));
    if (stddev == 0.0) continue;  // degenerate group
    check.expect(std::abs(mean) < 1e-9, "advantage mean must vanish");
    check.expect(std::abs(stddev - 1.0) < 1e-9, "advantage std must be 1");

    double scale = 0.1 + 3.0 * rng.next_double();
    double shift = 10.0 * rng.next_double() - 5.0;
    std::vector<double> affine(k);
    for (std::size_t i = 0; i < k; ++i) affine[i] = scale * rewards[i] + shift;
    auto adv2 = group_advantages(affine, 1e-8);
    for (std::size_t i = 0; i < k; ++i)
      check.expect(std::abs(adv2[i] - adv[i]) < 1e-9, "affine invariance violated");
  }
}

// ---------------------------------------------------------------------- C3
void gradient_against_finite_differences(Check& check) {
  GrpoConfig cfg;
  SplitMix64 rng(3);
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    std::size_t n = 2 + rng.next_u64() % 5;
    std::size_t k = 2 + rng.next_u64() % 7;
    ToyPolicy policy;
    std::vector<double> old_logits(n), ref_logits(n);
    policy.logits["p"] = std::vector<double>(n);
    GroupBatch batch;
    bool near_boundary = true;
    while (near_boundary) {
      for (std::size_t i = 0; i < n; ++i) {
        policy.logits["p"][i] = 2.0 * rng.next_double() - 1.0;
        old_logits[i] = policy.logits["p"][i] + 0.3 * (2.0 * rng.next_double() - 1.0);
        ref_logits[i] = 2.0 * rng.next_double() - 1.0;
      }
      auto logp_new = log_softmax(policy.logits["p"]);
      auto logp_old = log_softmax(old_logits);
      batch = GroupBatch{};
      batch.prompt_id = "p";
      near_boundary = false;
      for (std::size_t j = 0; j < k; ++j) {
        std::size_t idx = rng.next_u64() % n;
        batch.sampled_indices.push_back(idx);
        batch.rewards.push_back(rng.next_double());
        batch.r_loc.push_back(0.0);
        batch.r_vis.push_back(0.0);
        batch.r_geo.push_back(batch.rewards.back());
        batch.logp_new.push_back(logp_new[idx]);
        batch.logp_old.push_back(logp_old[idx]);
        batch.logp_ref.push_back(0.0);
        double rho = likelihood_ratio(logp_new[idx], logp_old[idx]);
        if (std::abs(rho - 0.8) < 1e-3 || std::abs(rho - 1.2) < 1e-3) near_boundary = true;
      }
    }
    double err = gradient_check(policy, batch, softmax(ref_logits), cfg, 1e-5);
    worst = std::max(worst, err);
  }
  std::ostringstream msg;
  msg << "max relative gradient error " << worst << ", expected < 1e-5";
  check.expect(worst < 1e-5, msg.str());
}

// ---------------------------------------------------------------------- C4
void toy_convergence(Check& check) {
  GrpoConfig cfg;
  cfg.k = 8;
  cfg.epsilon_clip = 0.2;
  cfg.beta_kl = 0.0;
  cfg.learning_rate = 0.5;
  cfg.steps = 200;
  cfg.seed = 81;
  auto result = train({bandit_prompt({1.0, 0.5, 0.0})}, cfg);

  double p_best = result.policy.probs("bandit")[0];
  std::ostringstream msg;
  msg << "final best-candidate probability " << p_best << ", expected > 0.9";
  check.expect(p_best > 0.9, msg.str());

  // mean reward aggregated over the ten consecutive 20-step windows must not
  // decay; the run is deterministic for the pinned seed
  const auto& records = result.log.records;
  check.expect(records.size() == 200, "expected 200 log records");
  double previous_window = -1.0;
  for (std::size_t start = 0; start + 20 <= records.size(); start += 20) {
    double window = 0.0;
    for (std::size_t i = start; i < start + 20; ++i) window += records[i].mean_reward;
    window /= 20.0;
    check.expect(window >= previous_window - 1e-12,
                 "mean reward decayed across a 20-step window");
    previous_window = window;
  }
}

// ---------------------------------------------------------------------- C5
void kl_regularization(Check& check) {
  // Two arms tie for the best reward: the reward signal is indifferent
  // between them, so only the KL penalty restrains the sampling-noise drift
  // and its effect on the final divergence is first-order.
  GrpoConfig cfg;
  cfg.steps = 500;
  cfg.seed = 123;
  GrpoConfig free = cfg;
  free.beta_kl = 0.0;
  GrpoConfig tethered = cfg;
  tethered.beta_kl = 0.04;

  auto prompt = bandit_prompt({1.0, 1.0, 0.0});
  auto run_free = train({prompt}, free);
  auto run_tethered = train({prompt}, tethered);

  auto ref_probs = softmax(run_free.reference.logits_for("bandit"));
  double kl_free = categorical_kl(run_free.policy.probs("bandit"), ref_probs);
  double kl_tethered = categorical_kl(run_tethered.policy.probs("bandit"), ref_probs);
  std::ostringstream msg;
  msg << "KL with beta=0.04 (" << kl_tethered << ") must be below the beta=0 run (" << kl_free
      << ")";
  check.expect(kl_tethered < kl_free, msg.str());
  for (const auto& rec : run_tethered.log.records)
    check.expect(rec.mean_kl >= 0.0, "logged KL fell below zero");
  for (const auto& rec : run_free.log.records)
    check.expect(rec.mean_kl >= 0.0, "logged KL fell below zero");
}

// ---------------------------------------------------------------------- C6
void curation_oracle_equivalence(Check& check) {
  auto [corpus, gaz] = curation_oracle::synthetic_corpus(100, 2025);
  CurationConfig cfg;
  auto result = run_pipeline(corpus, cfg, &gaz);

  std::set<std::string> expected_ids;
  std::size_t drops = 0;
  for (const auto& s : corpus) {
    if (curation_oracle::verdict(s, cfg, gaz).keep)
      expected_ids.insert(s.id);
    else
      ++drops;
  }
  std::set<std::string> got_ids;
  for (const auto& s : result.retained) got_ids.insert(s.id);
  check.expect(got_ids == expected_ids, "retained set differs from the predicate oracle");
  check.expect(result.stats.retained_count == expected_ids.size(), "retained count mismatch");
  check.expect(result.stats.input_count ==
                   result.stats.retained_count + result.stats.dropped_localizability +
                       result.stats.dropped_distance + result.stats.dropped_consensus +
                       result.stats.dropped_grounding,
               "pipeline stats are not conserved");
  check.expect(drops + expected_ids.size() == corpus.size(), "oracle accounting broken");
}

// ---------------------------------------------------------------------- C7
void metric_tiers(Check& check) {
  const std::vector<double> tiers(kThresholdsKm.begin(), kThresholdsKm.end());
  const std::vector<double> fixture = {0.5, 0.9, 1.0, 24.0, 26.0, 199.0, 455.0, 751.0, 2500.0, 9000.0};
  auto fractions = threshold_accuracy(fixture, tiers);
  for (std::size_t t = 0; t < tiers.size(); ++t) {
    std::size_t hits = 0;
    for (double d : fixture) hits += d <= tiers[t];
    check.expect(fractions[t] == static_cast<double>(hits) / static_cast<double>(fixture.size()),
                 "fixture fraction mismatch at a tier");
  }

  SplitMix64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng.next_u64() % 50;
    std::vector<double> distances(n);
    for (auto& d : distances) d = rng.next_double() * 4000.0;
    auto acc = threshold_accuracy(distances, tiers);
    for (std::size_t t = 1; t < acc.size(); ++t)
      check.expect(acc[t] >= acc[t - 1], "accuracy must be monotone across tiers");
  }
}

// ---------------------------------------------------------------------- C8
void haversine_sanity(Check& check) {
  LatLon paris{48.8566, 2.3522};
  LatLon london{51.5074, -0.1278};
  double got = haversine_km(paris, london);
  double oracle = curation_oracle::distance_km(paris, london);  // law of cosines
  std::ostringstream msg;
  msg << "Paris-London " << got << " km vs oracle " << oracle << " km";
  check.expect(std::abs(got - oracle) / oracle < 0.005, msg.str());
  check.expect(std::abs(got - 343.5) / 343.5 < 0.005, msg.str());

  SplitMix64 rng(8);
  const double bound = 3.14159265358979323846 * kEarthRadiusKm + 1e-9;
  for (int t = 0; t < 10000; ++t) {
    LatLon a{rng.next_double() * 180.0 - 90.0, rng.next_double() * 360.0 - 179.999};
    LatLon b{rng.next_double() * 180.0 - 90.0, rng.next_double() * 360.0 - 179.999};
    check.expect(haversine_km(a, b) == haversine_km(b, a), "haversine must be symmetric");
    check.expect(haversine_km(a, a) == 0.0, "self-distance must be zero");
    check.expect(haversine_km(a, b) <= bound, "haversine exceeded pi * R");
  }
}

// ---------------------------------------------------------------------- C9
void grounding_reward_properties(Check& check) {
  SplitMix64 rng(9);
  const std::vector<std::string> vocab = {"sky",  "road",  "building", "tree",
                                          "sign", "tower", "bridge",   "water"};
  for (int trial = 0; trial < 10000; ++trial) {
    VisualElementSet visual;
    std::size_t nv = rng.next_u64() % 5;
    for (std::size_t i = 0; i < nv; ++i)
      visual.elements.insert(vocab[rng.next_u64() % vocab.size()]);
    std::vector<Entity> entities;
    std::size_t ne = rng.next_u64() % 6;
    for (std::size_t i = 0; i < ne; ++i)
      entities.push_back({vocab[rng.next_u64() % vocab.size()], ""});

    double r = visual_grounding_reward(entities, visual);
    check.expect(r >= 0.0 && r <= 1.0, "grounding reward escaped [0, 1]");

    auto with_unmatched = entities;
    with_unmatched.push_back({"zzz unmatched thing", ""});
    check.expect(visual_grounding_reward(with_unmatched, visual) <= r + 1e-12,
                 "an unmatched entity increased the reward");

    if (!visual.elements.empty()) {
      auto with_matched = entities;
      with_matched.push_back({*visual.elements.begin(), ""});
      check.expect(visual_grounding_reward(with_matched, visual) >= r - 1e-12,
                   "a matched entity decreased the reward");
    }
  }
}

// --------------------------------------------------------------------- C10
void cli_determinism(Check& check) {
  const char* cli = std::getenv("GEORL_CLI");
  if (!cli || !*cli) {
    check.expect(false, "GEORL_CLI is not set; cannot run the command-line tool");
    return;
  }
  testutil::TempDir dir("acceptance_cli");
  const std::string prompts = dir.file("prompts.jsonl");
  testutil::write_file(
      prompts,
      R"({"id":"bandit","truth":{"country":"Atlantis","city":"Poseidonia","lat":null,"lon":null},"candidates":[{"completion":"<think>statue</think>country: Atlantis\ncity: Poseidonia","loc_score":null},{"completion":"<think>statue</think>country: Atlantis\ncity: Heraklion","loc_score":null},{"completion":"<think>statue</think>country: Mu\ncity: Lemuria","loc_score":null}]}
)");
  const std::string config = dir.file("config.json");
  testutil::write_file(config, R"({"grpo.steps":200,"grpo.beta_kl":0.0,"grpo.seed":42})");

  auto invoke = [&](const std::string& out_dir) {
    std::string cmd = std::string(cli) + " train --input " + prompts + " --config " + config +
                      " --output " + dir.file(out_dir) + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  check.expect(invoke("a") == 0, "first cmd_train invocation failed");
  check.expect(invoke("b") == 0, "second cmd_train invocation failed");
  check.expect(testutil::read_file(dir.file("a/train_log.csv")) ==
                   testutil::read_file(dir.file("b/train_log.csv")),
               "training logs differ between identical runs");
  check.expect(testutil::read_file(dir.file("a/policy.json")) ==
                   testutil::read_file(dir.file("b/policy.json")),
               "policy files differ between identical runs");
  check.expect(!testutil::read_file(dir.file("a/train_log.csv")).empty(), "empty training log");
}

// --------------------------------------------------------------------- C11
void config_fidelity(Check& check) {
  auto cfg = default_config();
  check.expect(cfg.weights.lambda_loc == 0.2 && cfg.weights.lambda_vis == 0.5 &&
                   cfg.weights.lambda_geo == 1.0,
               "default reward weights must be (0.2, 0.5, 1.0)");
  auto parsed = parse_config("{}");
  check.expect(parsed.weights.lambda_loc == 0.2 && parsed.weights.lambda_vis == 0.5 &&
                   parsed.weights.lambda_geo == 1.0,
               "empty config must keep the default weights");
  check.expect(parsed.grpo.weights.lambda_geo == 1.0, "weights must flow into the grpo config");

#ifdef GEORL_README_PATH
  std::string readme = testutil::read_file(GEORL_README_PATH);
  check.expect(!readme.empty(), "README.md not found");
  for (const char* needle : {"1e-6", "16", "0.9", "0.95", "cosine"}) {
    check.expect(readme.find(needle) != std::string::npos,
                 std::string("README must record the full-scale reference default \"") + needle +
                     "\"");
  }
#endif
}

struct Criterion {
  const char* label;
  double budget_seconds;
  std::function<void(Check&)> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"C1 geo reward tiers (0 / 1-alpha / 1)", 1.0, geo_reward_tiers},
      {"C2 group advantage normalization and affine invariance", 5.0, advantage_properties},
      {"C3 analytic gradient vs central finite differences", 10.0, gradient_against_finite_differences},
      {"C4 toy-policy convergence on the bandit", 5.0, toy_convergence},
      {"C5 KL penalty keeps the policy near the reference", 10.0, kl_regularization},
      {"C6 curation pipeline matches the predicate oracle", 1.0, curation_oracle_equivalence},
      {"C7 threshold accuracy tiers and monotonicity", 5.0, metric_tiers},
      {"C8 haversine sanity and symmetry", 2.0, haversine_sanity},
      {"C9 grounding reward bounds and monotonicity", 5.0, grounding_reward_properties},
      {"C10 cmd_train determinism (byte-identical outputs)", 10.0, cli_determinism},
      {"C11 config fidelity (documented defaults)", 10.0, config_fidelity},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Check check;
    auto start = std::chrono::steady_clock::now();
    try {
      criterion.fn(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("unexpected exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= criterion.budget_seconds) {
      std::ostringstream msg;
      msg << "exceeded the " << criterion.budget_seconds << "s budget";
      check.expect(false, msg.str());
    }
    if (check.ok) {
      std::printf("[PASS] %s (%.2fs)\n", criterion.label, seconds);
    } else {
      std::printf("[FAIL] %s (%.2fs): %s\n", criterion.label, seconds, check.detail.c_str());
      ++failures;
    }
  }
  if (failures > 0) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

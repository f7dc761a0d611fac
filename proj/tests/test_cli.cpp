#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include <json.hpp>

#include "georl/corpus.hpp"
#include "testutil.hpp"

using nlohmann::json;
using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace {

std::string cli_path() {
  const char* env = std::getenv("GEORL_CLI");
  REQUIRE_MESSAGE(env != nullptr, "GEORL_CLI must point at the georl binary");
  return env;
}

struct RunResult {
  int exit_code;
  std::string out;
  std::string err;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
  const std::string out_path = dir.file("stdout.txt");
  const std::string err_path = dir.file("stderr.txt");
  std::string cmd = cli_path() + " " + args + " > " + out_path + " 2> " + err_path;
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, read_file(out_path), read_file(err_path)};
}

std::string write_corpus_fixture(const TempDir& dir, const std::string& name, int n) {
  std::vector<georl::Sample> corpus;
  for (int i = 0; i < n; ++i) corpus.push_back(testutil::make_sample("s" + std::to_string(i)));
  const std::string path = dir.file(name);
  georl::save_corpus(corpus, path);
  return path;
}

const char* kBanditPrompt =
    R"({"id":"bandit","truth":{"country":"Atlantis","city":"Poseidonia","lat":null,"lon":null},"candidates":[{"completion":"<think>statue</think>country: Atlantis\ncity: Poseidonia","loc_score":null},{"completion":"<think>statue</think>country: Atlantis\ncity: Heraklion","loc_score":null},{"completion":"<think>statue</think>country: Mu\ncity: Lemuria","loc_score":null}]}
)";

}  // namespace

TEST_CASE("cli stats prints dataset statistics") {
  TempDir dir("cli_stats");
  auto corpus = write_corpus_fixture(dir, "corpus.jsonl", 3);
  auto r = run_cli(dir, "stats --input " + corpus);
  CHECK(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["n_samples"] == 3);
  CHECK(doc["n_countries"] == 1);
}

TEST_CASE("cli curate writes the curated corpus plus a stats sidecar") {
  TempDir dir("cli_curate");
  auto corpus = write_corpus_fixture(dir, "corpus.jsonl", 4);
  auto out = dir.file("curated.jsonl");
  auto r = run_cli(dir, "curate --input " + corpus + " --output " + out);
  CHECK(r.exit_code == 0);
  CHECK(georl::load_corpus(out).size() == 4);
  auto stats = json::parse(read_file(out + ".stats.json"));
  CHECK(stats["pipeline"]["input_count"] == 4);
  CHECK(stats["pipeline"]["retained_count"] == 4);
  CHECK(stats["dataset"]["n_samples"] == 4);

  SUBCASE("rerunning with the same inputs reproduces the outputs byte for byte") {
    auto again = dir.file("curated_again.jsonl");
    REQUIRE(run_cli(dir, "curate --input " + corpus + " --output " + again).exit_code == 0);
    CHECK(read_file(out) == read_file(again));
    CHECK(read_file(out + ".stats.json") == read_file(again + ".stats.json"));
  }
}

TEST_CASE("cli curate reports the malformed line and exits 2") {
  TempDir dir("cli_curate_bad");
  std::string body;
  for (int i = 0; i < 6; ++i)
    body += georl::sample_to_json_line(testutil::make_sample("s" + std::to_string(i))) + "\n";
  body += "{broken\n";
  const std::string corpus = dir.file("corpus.jsonl");
  write_file(corpus, body);
  auto r = run_cli(dir, "curate --input " + corpus + " --output " + dir.file("out.jsonl"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line 7") != std::string::npos);
}

TEST_CASE("cli curate exits 1 when the output is unwritable") {
  TempDir dir("cli_curate_io");
  auto corpus = write_corpus_fixture(dir, "corpus.jsonl", 1);
  auto r = run_cli(dir, "curate --input " + corpus + " --output " + dir.file("no/such/dir/out.jsonl"));
  CHECK(r.exit_code == 1);
}

TEST_CASE("cli reward scores completions") {
  TempDir dir("cli_reward");
  auto corpus = write_corpus_fixture(dir, "corpus.jsonl", 2);
  const std::string completions = dir.file("completions.jsonl");
  write_file(completions,
             R"({"id":"s0","completion":"<think>roofline</think>country: Atlantis\ncity: Poseidonia","entities":[{"text":"stadium","type":"ARCH"}]}
{"id":"s1","completion":"<think>roofline</think>country: Mu\ncity: Lemuria"}
)");
  const std::string scores = dir.file("scores.jsonl");
  write_file(scores, R"({"id":"s0","score":1.0}
{"id":"s1","score":0.0}
)");
  const std::string config = dir.file("config.json");
  write_file(config, R"({"paths.fixture_scores":")" + scores + R"("})");

  auto r = run_cli(dir, "reward --input " + corpus + " --predictions " + completions +
                            " --config " + config);
  CHECK(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  auto row0 = json::parse(first);
  CHECK(row0["id"] == "s0");
  CHECK(row0["r_loc"] == 1.0);
  CHECK(row0["r_vis"] == 1.0);
  CHECK(row0["r_geo"] == 1.0);
  CHECK(row0["reward"] == doctest::Approx(1.7));
  auto row1 = json::parse(second);
  CHECK(row1["reward"] == 0.0);
}

TEST_CASE("cli reward exits 2 on an unknown completion id") {
  TempDir dir("cli_reward_bad");
  auto corpus = write_corpus_fixture(dir, "corpus.jsonl", 1);
  const std::string completions = dir.file("completions.jsonl");
  write_file(completions,
             R"({"id":"ghost","completion":"<think>t</think>country: Atlantis\ncity: Poseidonia"}
)");
  auto r = run_cli(dir, "reward --input " + corpus + " --predictions " + completions);
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli train runs the bandit to convergence, deterministically") {
  TempDir dir("cli_train");
  const std::string prompts = dir.file("prompts.jsonl");
  write_file(prompts, kBanditPrompt);
  const std::string config = dir.file("config.json");
  write_file(config, R"({"grpo.steps":200,"grpo.beta_kl":0.0,"grpo.seed":42})");

  auto r1 = run_cli(dir, "train --input " + prompts + " --config " + config + " --output " +
                             dir.file("run1"));
  REQUIRE(r1.exit_code == 0);
  auto csv = read_file(dir.file("run1/train_log.csv"));
  std::size_t rows = 0;
  for (char ch : csv) rows += ch == '\n';
  CHECK(rows == 201);  // header + 200 steps

  auto policy = json::parse(read_file(dir.file("run1/policy.json")));
  CHECK(policy["prompts"]["bandit"]["probs"][0].get<double>() > 0.9);

  auto r2 = run_cli(dir, "train --input " + prompts + " --config " + config + " --output " +
                             dir.file("run2"));
  REQUIRE(r2.exit_code == 0);
  CHECK(read_file(dir.file("run1/train_log.csv")) == read_file(dir.file("run2/train_log.csv")));
  CHECK(read_file(dir.file("run1/policy.json")) == read_file(dir.file("run2/policy.json")));

  SUBCASE("the seed flag changes the run") {
    auto r3 = run_cli(dir, "train --input " + prompts + " --config " + config + " --output " +
                               dir.file("run3") + " --seed 7");
    REQUIRE(r3.exit_code == 0);
    CHECK(read_file(dir.file("run1/train_log.csv")) != read_file(dir.file("run3/train_log.csv")));
  }
}

TEST_CASE("cli train with zero steps writes a header-only log") {
  TempDir dir("cli_train_zero");
  const std::string prompts = dir.file("prompts.jsonl");
  write_file(prompts, kBanditPrompt);
  const std::string config = dir.file("config.json");
  write_file(config, R"({"grpo.steps":0})");
  auto r = run_cli(dir, "train --input " + prompts + " --config " + config + " --output " +
                            dir.file("out"));
  CHECK(r.exit_code == 0);
  CHECK(read_file(dir.file("out/train_log.csv")) ==
        "step,mean_r_loc,mean_r_vis,mean_r_geo,mean_reward,objective,mean_kl\n");
}

TEST_CASE("cli eval resolves predictions against the gazetteer") {
  TempDir dir("cli_eval");
  auto corpus = write_corpus_fixture(dir, "corpus.jsonl", 2);
  const std::string gazetteer = dir.file("places.tsv");
  write_file(gazetteer, "Atlantis\tPoseidonia\t10.0\t20.0\n");
  const std::string predictions = dir.file("predictions.jsonl");
  write_file(predictions,
             R"({"id":"s0","completion":"<think>t</think>country: Atlantis\ncity: Poseidonia"}
{"id":"s1","completion":"<think>t</think>country: Atlantis\ncity: Poseidonia"}
)");
  const std::string config = dir.file("config.json");
  write_file(config, R"({"paths.gazetteer":")" + gazetteer + R"("})");

  auto r = run_cli(dir, "eval --input " + corpus + " --predictions " + predictions + " --config " +
                            config);
  CHECK(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["n_evaluated"] == 2);
  for (auto& [tier, acc] : doc["accuracy"].items()) CHECK(acc == 1.0);

  SUBCASE("missing gazetteer file exits 1") {
    write_file(config, R"({"paths.gazetteer":"nowhere.tsv"})");
    auto bad = run_cli(dir, "eval --input " + corpus + " --predictions " + predictions +
                                " --config " + config);
    CHECK(bad.exit_code == 1);
  }
  SUBCASE("unknown prediction id exits 2") {
    write_file(predictions,
               R"({"id":"ghost","completion":"<think>t</think>country: Atlantis\ncity: Poseidonia"}
)");
    auto bad = run_cli(dir, "eval --input " + corpus + " --predictions " + predictions +
                                " --config " + config);
    CHECK(bad.exit_code == 2);
  }
}

TEST_CASE("cli rejects usage errors with exit 2") {
  TempDir dir("cli_usage");
  auto r = run_cli(dir, "curate");  // missing required flags
  CHECK(r.exit_code == 2);
  auto unknown = run_cli(dir, "frobnicate");
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("cli train exits 3 when no groups can be built") {
  TempDir dir("cli_train_empty");
  const std::string prompts = dir.file("prompts.jsonl");
  write_file(prompts, "");
  auto r = run_cli(dir, "train --input " + prompts + " --output " + dir.file("out"));
  CHECK(r.exit_code == 3);
}

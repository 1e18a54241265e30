#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "afs/jsonl.hpp"
#include "afs/pipeline.hpp"

using namespace afs;
namespace fs = std::filesystem;

namespace {

const char* kDataDir = AFS_DATA_DIR;

ExperimentConfig mini_config(const fs::path& output_dir) {
  ExperimentConfig config =
      load_experiment_config(std::string(kDataDir) + "/config-mini.json");
  config.paths.output_dir = output_dir;
  return config;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("afs_pipe_" + tag);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int line_count(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  int count = 0;
  while (std::getline(in, line)) ++count;
  return count;
}

void check_identical_trees(const fs::path& lhs, const fs::path& rhs) {
  std::set<std::string> names;
  for (const auto& entry : fs::directory_iterator(lhs)) {
    names.insert(entry.path().filename().string());
  }
  std::set<std::string> other;
  for (const auto& entry : fs::directory_iterator(rhs)) {
    other.insert(entry.path().filename().string());
  }
  CHECK(names == other);
  for (const std::string& name : names) {
    CAPTURE(name);
    CHECK(slurp(lhs / name) == slurp(rhs / name));
  }
}

}  // namespace

TEST_CASE("run_experiment completes every stage on the mini corpus") {
  const fs::path out = fresh_dir("full");
  const ExperimentConfig config = mini_config(out);
  const ExperimentReport report = run_experiment(config);

  for (Stage stage : kAllStages) {
    CAPTURE(stage_name(stage));
    CHECK(stage_complete(config, stage));
  }

  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].feature_set == "N");
  CHECK(report.rows[1].feature_set == "U");
  CHECK(report.rows[2].feature_set == "N-L-R-D-U");
  for (const FeatureSetRow& row : report.rows) {
    CHECK(row.r > 0.0);
    CHECK(row.r <= 1.0);
    CHECK(row.mae > 0.0);
    CHECK(row.rms > 0.0);
  }
  CHECK(report.significance.size() == 3);  // 3 choose 2

  // Stage-by-stage shape checks.
  CHECK(line_count(out / "selected.jsonl") == 8);
  CHECK(line_count(out / "propositions.jsonl") == 25);
  CHECK(line_count(out / "pairs.jsonl") == 35);
  CHECK(line_count(out / "gold-afs.jsonl") == 35);
  CHECK(line_count(out / "features.jsonl") == 35);

  const Json filter_report = read_json_file(out / "filter-report.json");
  REQUIRE(filter_report.at("removed").size() == 1);
  CHECK(filter_report.at("removed")[0].at("worker_id") == "w07");
  CHECK(filter_report.at("aggregate_expert_correlation").get<double>() > 0.5);

  const Json order = read_json_file(out / "feature-order.json");
  CHECK(order.at("names").size() == 22);  // 3 + 9 + 6 + 3 + 1

  const std::string table = render_report_table(report);
  CHECK(table.find("Feature Set") != std::string::npos);
  CHECK(table.find("N-L-R-D-U") != std::string::npos);
}

TEST_CASE("run_experiment is byte-identical across runs") {
  const fs::path out_a = fresh_dir("det_a");
  const fs::path out_b = fresh_dir("det_b");
  run_experiment(mini_config(out_a));
  run_experiment(mini_config(out_b));
  check_identical_trees(out_a, out_b);
}

TEST_CASE("resume regenerates deleted downstream artifacts exactly") {
  const fs::path out = fresh_dir("resume");
  const ExperimentConfig config = mini_config(out);
  run_experiment(config);

  const fs::path reference = fresh_dir("resume_ref");
  fs::copy(out, reference, fs::copy_options::recursive);

  // Wipe everything the featurize stage and later produced.
  for (const char* name :
       {"feature-order.json", "features.jsonl", "model-N.json", "model-U.json",
        "model-N-L-R-D-U.json", "cv-N.json", "cv-U.json", "cv-N-L-R-D-U.json",
        "significance.json", "report.json", "report.txt"}) {
    fs::remove(out / name);
  }
  CHECK(!stage_complete(config, Stage::kFeaturize));
  CHECK(stage_complete(config, Stage::kPairs));

  run_experiment(config, /*resume=*/true);
  check_identical_trees(out, reference);
}

TEST_CASE("run_experiment honors a stop stage") {
  const fs::path out = fresh_dir("until");
  const ExperimentConfig config = mini_config(out);
  run_experiment(config, false, Stage::kPairs);
  CHECK(stage_complete(config, Stage::kPairs));
  CHECK(!fs::exists(out / "features.jsonl"));
  CHECK(!fs::exists(out / "report.json"));
}

TEST_CASE("offline featurize without a cache aborts with the stage name") {
  const fs::path out = fresh_dir("nocache");
  ExperimentConfig config = mini_config(out);
  config.paths.sts_cache = out / "missing-cache.tsv";  // empty cache
  try {
    run_experiment(config);
    FAIL("expected an offline cache miss");
  } catch (const MissingResourceError& e) {
    const std::string message = e.what();
    CHECK(message.find("stage featurize") != std::string::npos);
    CHECK(message.find("cache miss") != std::string::npos);
    CHECK(message.find("pair 'd01-scu1+") != std::string::npos);
  }
  // Upstream artifacts from completed stages are retained.
  CHECK(stage_complete(config, Stage::kPairs));
  CHECK(stage_complete(config, Stage::kIngestJudgments));
}

TEST_CASE("judgments on pairs the clustering never generated are an error") {
  const fs::path out = fresh_dir("badjudg");
  ExperimentConfig config = mini_config(out);

  // Clone the corpus, then corrupt one judgment's pair id.
  const fs::path corpus = fresh_dir("badjudg_corpus");
  fs::copy(config.paths.corpus_dir, corpus, fs::copy_options::recursive);
  {
    std::ofstream append(corpus / "judgments.jsonl", std::ios::app);
    append << R"({"pair_id":"ghost+pair","score":3,"worker_id":"w01"})" << "\n";
  }
  config.paths.corpus_dir = corpus;
  CHECK_THROWS_WITH_AS(run_experiment(config), doctest::Contains("ghost+pair"),
                       DataError);
  fs::remove_all(corpus);
}

TEST_CASE("experiment config validation") {
  SUBCASE("unknown stage name") {
    CHECK_THROWS_AS(stage_from_name("polish"), ConfigError);
    CHECK(stage_from_name("ingest-judgments") == Stage::kIngestJudgments);
  }
  SUBCASE("config file errors carry the path") {
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/afs.json"),
                    MissingResourceError);
  }
  SUBCASE("bad cluster cut mode") {
    const fs::path path = fs::temp_directory_path() / "afs_cfg_badcut.json";
    std::ofstream(path) << R"({
      "paths": {"corpus_dir": "x", "output_dir": "y"},
      "cluster_cut": {"mode": "kmeans", "value": 3},
      "feature_sets": ["N"]
    })";
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);
    fs::remove(path);
  }
  SUBCASE("bad feature set") {
    const fs::path path = fs::temp_directory_path() / "afs_cfg_badset.json";
    std::ofstream(path) << R"({
      "paths": {"corpus_dir": "x", "output_dir": "y"},
      "cluster_cut": {"mode": "n_clusters", "value": 3},
      "feature_sets": ["N-Q"]
    })";
    CHECK_THROWS_AS(load_experiment_config(path), ConfigError);
    fs::remove(path);
  }
}

TEST_CASE("two feature sets produce two reports and one t-test entry") {
  const fs::path out = fresh_dir("twosets");
  ExperimentConfig config = mini_config(out);
  config.feature_sets = {"N", "U"};
  const ExperimentReport report = run_experiment(config);
  REQUIRE(report.rows.size() == 2);
  REQUIRE(report.significance.size() == 1);
  CHECK(report.significance[0].set_a == "N");
  CHECK(report.significance[0].set_b == "U");
  CHECK(fs::exists(out / "cv-N.json"));
  CHECK(fs::exists(out / "cv-U.json"));
  CHECK(!fs::exists(out / "cv-N-L-R-D-U.json"));
}

TEST_CASE("pyramid report artifact mirrors the fixture") {
  const fs::path out = fresh_dir("pyrtxt");
  const ExperimentConfig config = mini_config(out);
  run_experiment(config, false, Stage::kPyramid);
  const std::string report = slurp(out / "pyramid-report.txt");
  CHECK(report.find("Pyramid for d01") != std::string::npos);
  CHECK(report.find("Pyramid for d08") != std::string::npos);
  CHECK(report.find("Pyramid for d09") == std::string::npos);  // not selected
  CHECK(report.find("Tier") != std::string::npos);
}

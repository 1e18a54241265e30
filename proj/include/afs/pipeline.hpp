#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "afs/annotation.hpp"
#include "afs/clustering.hpp"
#include "afs/corpus.hpp"
#include "afs/regression.hpp"
#include "afs/stats.hpp"

namespace afs {

// A full experiment: selection through model comparison. Loaded from a JSON
// config file; relative paths resolve against the config file's directory.
struct ExperimentConfig {
  struct Paths {
    std::filesystem::path corpus_dir;
    std::filesystem::path stopwords;
    std::filesystem::path tags;
    std::filesystem::path lexicon;    // may be empty when family L is unused
    std::filesystem::path wordspace;  // may be empty when family D is unused
    std::filesystem::path sts_cache;  // may be empty when family U is unused
    std::filesystem::path output_dir;
  };

  struct CvSettings {
    int k = 10;
    std::uint64_t seed = 1;
    double ridge = 1e-8;
  };

  struct StsSettings {
    std::string mode = "offline";  // offline | remote | constant
    std::string endpoint;
    int timeout_ms = 5000;
    double scale_divisor = 1.0;
    double constant = 0.5;
  };

  Paths paths;
  SelectionCriteria selection;
  int min_tier = 3;
  ClusterCut cluster_cut = ClusterCut::n_clusters(1);
  std::vector<std::string> feature_sets;  // e.g. {"N", "U", "N-L-R-D-U"}
  CvSettings cv;
  FilterPolicy filter_policy;
  StsSettings sts;
};

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Pipeline stages in execution order.
enum class Stage {
  kSelect,
  kPyramid,
  kPropositions,
  kCluster,
  kPairs,
  kIngestJudgments,
  kFeaturize,
  kTrain,
  kEvaluate,
  kCompare,
};

constexpr Stage kAllStages[] = {
    Stage::kSelect,  Stage::kPyramid,         Stage::kPropositions,
    Stage::kCluster, Stage::kPairs,           Stage::kIngestJudgments,
    Stage::kFeaturize, Stage::kTrain,         Stage::kEvaluate,
    Stage::kCompare,
};

const char* stage_name(Stage stage);
Stage stage_from_name(const std::string& name);

// True when every artifact the stage writes already exists.
bool stage_complete(const ExperimentConfig& config, Stage stage);

// Runs one stage, reading upstream artifacts from the output directory.
// Errors carry the stage name and the offending record.
void run_stage(const ExperimentConfig& config, Stage stage);

struct FeatureSetRow {
  std::string feature_set;
  double r = 0.0;
  double mae = 0.0;
  double rms = 0.0;
};

struct SignificanceEntry {
  std::string set_a;
  std::string set_b;
  TTestResult ttest;
};

struct ExperimentReport {
  std::vector<FeatureSetRow> rows;  // in config feature-set order
  std::vector<SignificanceEntry> significance;
  std::filesystem::path output_dir;
};

// Runs every stage up to `until` (default: the whole pipeline), skipping
// stages whose artifacts exist when resume is set, then assembles the final
// report. Deterministic given config and seed.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                bool resume = false,
                                Stage until = Stage::kCompare);

// Re-renders the report table from persisted evaluate/compare artifacts.
ExperimentReport load_report(const ExperimentConfig& config);

std::string render_report_table(const ExperimentReport& report);

}  // namespace afs

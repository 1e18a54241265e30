#include "afs/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "afs/errors.hpp"
#include "afs/hash.hpp"
#include "afs/jsonl.hpp"
#include "afs/pyramid.hpp"
#include "afs/sts.hpp"

namespace afs {
namespace {

namespace fs = std::filesystem;

std::string dump_line(const Json& record) { return record.dump() + "\n"; }

std::string double_repr(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, static_cast<std::size_t>(ptr - buf));
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

std::set<char> family_union(const ExperimentConfig& config) {
  std::set<char> families;
  for (const std::string& set : config.feature_sets) {
    for (char tag : parse_family_set(set)) families.insert(tag);
  }
  return families;
}

std::string canonical_set_name(const std::string& set) {
  return family_set_name(parse_family_set(set));
}

fs::path artifact(const ExperimentConfig& config, const std::string& name) {
  return config.paths.output_dir / name;
}

std::vector<fs::path> stage_artifacts(const ExperimentConfig& config, Stage stage) {
  switch (stage) {
    case Stage::kSelect:
      return {artifact(config, "selected.jsonl")};
    case Stage::kPyramid:
      return {artifact(config, "pyramids.json"),
              artifact(config, "pyramid-report.txt")};
    case Stage::kPropositions:
      return {artifact(config, "propositions.jsonl")};
    case Stage::kCluster:
      return {artifact(config, "clusters.json"),
              artifact(config, "cluster-report.txt")};
    case Stage::kPairs:
      return {artifact(config, "pairs.jsonl")};
    case Stage::kIngestJudgments:
      return {artifact(config, "gold-afs.jsonl"),
              artifact(config, "filter-report.json")};
    case Stage::kFeaturize:
      return {artifact(config, "feature-order.json"),
              artifact(config, "features.jsonl")};
    case Stage::kTrain: {
      std::vector<fs::path> files;
      for (const std::string& set : config.feature_sets) {
        files.push_back(artifact(config, "model-" + canonical_set_name(set) + ".json"));
      }
      return files;
    }
    case Stage::kEvaluate: {
      std::vector<fs::path> files;
      for (const std::string& set : config.feature_sets) {
        files.push_back(artifact(config, "cv-" + canonical_set_name(set) + ".json"));
      }
      return files;
    }
    case Stage::kCompare:
      return {artifact(config, "significance.json")};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Stage implementations
// ---------------------------------------------------------------------------

void run_select(const ExperimentConfig& config) {
  const Corpus corpus = load_corpus(config.paths.corpus_dir);
  const std::vector<Dialog> selected =
      select_dialogs(corpus.dialogs, config.selection);
  std::string out;
  for (const Dialog& dialog : selected) {
    Json turns = Json::array();
    for (const Turn& turn : dialog.turns) {
      turns.push_back({{"author_id", turn.author_id},
                       {"index", turn.index},
                       {"text", turn.text}});
    }
    out += dump_line({{"dialog_id", dialog.dialog_id},
                      {"thread_id", dialog.thread_id},
                      {"topic", dialog.topic},
                      {"turns", turns}});
  }
  write_file(artifact(config, "selected.jsonl"), out);
}

std::vector<std::string> selected_dialog_ids(const ExperimentConfig& config) {
  std::vector<std::string> ids;
  const fs::path path = artifact(config, "selected.jsonl");
  for_each_jsonl(path, [&](const Json& record, int lineno) {
    ids.push_back(json_string(record, "dialog_id",
                              path.string() + ":" + std::to_string(lineno)));
  });
  return ids;
}

void run_pyramid(const ExperimentConfig& config) {
  const Corpus corpus = load_corpus(config.paths.corpus_dir);
  Json pyramids = Json::array();
  std::ostringstream report;
  bool first = true;
  for (const std::string& dialog_id : selected_dialog_ids(config)) {
    const std::vector<ScuAnnotation> scus = corpus.scus_for(dialog_id);
    if (scus.empty()) continue;
    const int n_summaries = static_cast<int>(corpus.summaries_for(dialog_id).size());
    const Pyramid pyramid = build_pyramid(scus, n_summaries);
    Json entries = Json::array();
    for (const PyramidEntry& entry : pyramid.entries) {
      entries.push_back({{"scu_id", entry.scu.scu_id},
                         {"label", entry.scu.label},
                         {"used_by", entry.scu.used_by},
                         {"tier", entry.tier}});
    }
    pyramids.push_back({{"dialog_id", pyramid.dialog_id},
                        {"n_summaries", pyramid.n_summaries},
                        {"entries", entries}});
    if (!first) report << "\n";
    write_pyramid_report(report, pyramid);
    first = false;
  }
  write_file(artifact(config, "pyramids.json"), pyramids.dump(2) + "\n");
  write_file(artifact(config, "pyramid-report.txt"), report.str());
}

struct LabelRecord {
  std::string label_id;
  std::string dialog_id;
  int tier = 0;
  std::string text;
};

void run_propositions(const ExperimentConfig& config) {
  const Json pyramids = read_json_file(artifact(config, "pyramids.json"));
  std::string out;
  for (const Json& pyramid : pyramids) {
    for (const Json& entry : pyramid.at("entries")) {
      const int tier = entry.at("tier").get<int>();
      if (tier < config.min_tier) continue;
      out += dump_line({{"label_id", entry.at("scu_id")},
                        {"dialog_id", pyramid.at("dialog_id")},
                        {"scu_id", entry.at("scu_id")},
                        {"tier", tier},
                        {"text", entry.at("label")}});
    }
  }
  write_file(artifact(config, "propositions.jsonl"), out);
}

std::vector<LabelRecord> load_labels(const ExperimentConfig& config) {
  std::vector<LabelRecord> labels;
  const fs::path path = artifact(config, "propositions.jsonl");
  for_each_jsonl(path, [&](const Json& record, int lineno) {
    const std::string context = path.string() + ":" + std::to_string(lineno);
    labels.push_back(LabelRecord{json_string(record, "label_id", context),
                                 json_string(record, "dialog_id", context),
                                 json_int(record, "tier", context),
                                 json_string(record, "text", context)});
  });
  return labels;
}

void run_cluster(const ExperimentConfig& config) {
  const std::vector<LabelRecord> labels = load_labels(config);
  const LexiconTagger tagger = LexiconTagger::from_file(config.paths.tags);
  std::vector<TermVector> vectors;
  vectors.reserve(labels.size());
  for (const LabelRecord& label : labels) {
    vectors.push_back(vectorize_label(label.text, tagger));
  }
  const std::vector<std::vector<int>> clusters =
      agglomerate(vectors, config.cluster_cut);

  Json cluster_array = Json::array();
  std::ostringstream report;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    Json members = Json::array();
    report << "Cluster " << c << " (" << clusters[c].size() << " labels)\n";
    for (int index : clusters[c]) {
      members.push_back(labels[static_cast<std::size_t>(index)].label_id);
      report << "  " << labels[static_cast<std::size_t>(index)].text << "\n";
    }
    cluster_array.push_back({{"cluster_id", c}, {"members", members}});
  }
  const Json doc = {
      {"cut",
       {{"mode", config.cluster_cut.mode == ClusterCut::Mode::kNClusters
                     ? "n_clusters"
                     : "distance_threshold"},
        {"value", config.cluster_cut.value}}},
      {"clusters", cluster_array},
  };
  write_file(artifact(config, "clusters.json"), doc.dump(2) + "\n");
  write_file(artifact(config, "cluster-report.txt"), report.str());
}

void run_pairs(const ExperimentConfig& config) {
  const std::vector<LabelRecord> labels = load_labels(config);
  std::map<std::string, int> index_by_id;
  std::vector<std::string> ids;
  std::vector<std::string> texts;
  for (const LabelRecord& label : labels) {
    index_by_id[label.label_id] = static_cast<int>(ids.size());
    ids.push_back(label.label_id);
    texts.push_back(label.text);
  }
  const Json doc = read_json_file(artifact(config, "clusters.json"));
  std::vector<std::vector<int>> clusters;
  for (const Json& cluster : doc.at("clusters")) {
    std::vector<int> members;
    for (const Json& member : cluster.at("members")) {
      auto it = index_by_id.find(member.get<std::string>());
      if (it == index_by_id.end()) {
        throw DataError("clusters.json references unknown label_id '" +
                        member.get<std::string>() + "'");
      }
      members.push_back(it->second);
    }
    clusters.push_back(std::move(members));
  }
  std::string out;
  for (const PropositionPair& pair : within_cluster_pairs(clusters, ids, texts)) {
    out += dump_line({{"pair_id", pair.pair_id},
                      {"label_a", pair.label_a},
                      {"label_b", pair.label_b},
                      {"source_cluster", pair.source_cluster}});
  }
  write_file(artifact(config, "pairs.jsonl"), out);
}

struct PairRecord {
  std::string pair_id;
  std::string label_a;
  std::string label_b;
  int source_cluster = 0;
};

std::vector<PairRecord> load_pairs(const ExperimentConfig& config) {
  std::vector<PairRecord> pairs;
  const fs::path path = artifact(config, "pairs.jsonl");
  for_each_jsonl(path, [&](const Json& record, int lineno) {
    const std::string context = path.string() + ":" + std::to_string(lineno);
    pairs.push_back(PairRecord{json_string(record, "pair_id", context),
                               json_string(record, "label_a", context),
                               json_string(record, "label_b", context),
                               json_int(record, "source_cluster", context)});
  });
  return pairs;
}

void run_ingest_judgments(const ExperimentConfig& config) {
  const Corpus corpus = load_corpus(config.paths.corpus_dir);
  std::set<std::string> known_pairs;
  for (const PairRecord& pair : load_pairs(config)) {
    known_pairs.insert(pair.pair_id);
  }
  for (const AfsJudgment& judgment : corpus.judgments) {
    if (!known_pairs.count(judgment.pair_id)) {
      throw DataError("judgment by worker '" + judgment.worker_id +
                      "' references pair '" + judgment.pair_id +
                      "' that the cluster stage did not generate");
    }
  }

  GoldStandard expert;
  expert.source = GoldStandard::Source::kExpert;
  expert.scores = corpus.expert_gold;
  const FilterResult filtered =
      filter_workers(corpus.judgments, expert, config.filter_policy);

  std::vector<std::string> required;
  {
    std::set<std::string> judged;
    for (const AfsJudgment& j : corpus.judgments) judged.insert(j.pair_id);
    required.assign(judged.begin(), judged.end());
  }
  const std::map<std::string, double> aggregate =
      aggregate_afs(filtered.kept, required);

  std::string out;
  for (const auto& [pair_id, score] : aggregate) {
    out += dump_line({{"pair_id", pair_id}, {"score", score}});
  }
  write_file(artifact(config, "gold-afs.jsonl"), out);

  Json removed = Json::array();
  for (const RemovedWorker& worker : filtered.removed) {
    removed.push_back({{"worker_id", worker.worker_id},
                       {"judged_pairs", worker.judged_pairs},
                       {"correlation", worker.correlation.has_value()
                                           ? Json(*worker.correlation)
                                           : Json(nullptr)}});
  }
  Json expert_r = nullptr;
  {
    std::vector<double> lhs;
    std::vector<double> rhs;
    for (const auto& [pair_id, score] : aggregate) {
      auto it = expert.scores.find(pair_id);
      if (it != expert.scores.end()) {
        lhs.push_back(score);
        rhs.push_back(it->second);
      }
    }
    try {
      expert_r = pearson(lhs, rhs);
    } catch (const DataError&) {
      expert_r = nullptr;
    }
  }
  const Json report = {
      {"removed", removed},
      {"aggregate_expert_correlation", expert_r},
      {"kept_judgments", filtered.kept.size()},
      {"total_judgments", corpus.judgments.size()},
  };
  write_file(artifact(config, "filter-report.json"), report.dump(2) + "\n");
}

// Shared feature resources, loaded lazily per requested family.
struct LoadedResources {
  StopwordList stopwords;
  std::unique_ptr<CategoryLexicon> lexicon;
  std::unique_ptr<WordSpace> word_space;
  std::unique_ptr<LexiconTagger> tagger;
  std::unique_ptr<StsCache> cache;
  std::unique_ptr<StsProvider> provider;
  std::unique_ptr<StsScorer> scorer;
  FeatureResources view;
};

LoadedResources load_resources(const ExperimentConfig& config,
                               const std::set<char>& families) {
  LoadedResources loaded;
  if (families.count('N')) {
    if (config.paths.stopwords.empty()) {
      throw MissingResourceError("family N requires paths.stopwords");
    }
    loaded.stopwords = StopwordList::from_file(config.paths.stopwords);
    loaded.view.stopwords = &loaded.stopwords;
  }
  if (families.count('L')) {
    if (config.paths.lexicon.empty()) {
      throw MissingResourceError("family L requires paths.lexicon");
    }
    loaded.lexicon = std::make_unique<CategoryLexicon>(
        CategoryLexicon::from_file(config.paths.lexicon));
    loaded.view.lexicon = loaded.lexicon.get();
  }
  if (families.count('D')) {
    if (config.paths.wordspace.empty() || config.paths.tags.empty()) {
      throw MissingResourceError("family D requires paths.wordspace and paths.tags");
    }
    loaded.word_space =
        std::make_unique<WordSpace>(WordSpace::from_file(config.paths.wordspace));
    loaded.tagger = std::make_unique<LexiconTagger>(
        LexiconTagger::from_file(config.paths.tags));
    loaded.view.word_space = loaded.word_space.get();
    loaded.view.tagger = loaded.tagger.get();
  }
  if (families.count('U')) {
    if (!config.paths.sts_cache.empty()) {
      loaded.cache = std::make_unique<StsCache>(config.paths.sts_cache);
    }
    if (config.sts.mode == "offline") {
      if (loaded.cache == nullptr) {
        throw MissingResourceError(
            "family U in offline mode requires paths.sts_cache");
      }
    } else if (config.sts.mode == "constant") {
      loaded.provider = std::make_unique<ConstantStsProvider>(config.sts.constant);
    } else if (config.sts.mode == "remote") {
      HttpStsProvider::Options options;
      options.endpoint = config.sts.endpoint;
      options.timeout_ms = config.sts.timeout_ms;
      options.scale_divisor = config.sts.scale_divisor;
      loaded.provider = std::make_unique<HttpStsProvider>(options);
    } else {
      throw ConfigError("unknown sts.mode '" + config.sts.mode + "'");
    }
    loaded.scorer =
        std::make_unique<StsScorer>(loaded.cache.get(), loaded.provider.get());
    loaded.view.sts = loaded.scorer.get();
  }
  return loaded;
}

void run_featurize(const ExperimentConfig& config) {
  const std::vector<PairRecord> pairs = load_pairs(config);
  const std::set<char> families = family_union(config);
  LoadedResources resources = load_resources(config, families);

  std::string out;
  Json order_doc;
  bool have_order = false;
  for (const PairRecord& pair : pairs) {
    FeatureVector fv;
    try {
      fv = featurize(pair.label_a, pair.label_b, families, resources.view);
    } catch (StsCacheMissError& e) {
      throw StsCacheMissError("pair '" + pair.pair_id + "': " + e.what());
    } catch (DataError& e) {
      throw DataError("pair '" + pair.pair_id + "': " + e.what());
    }
    if (!have_order) {
      Json names = Json::array();
      Json family_tags = Json::array();
      for (std::size_t i = 0; i < fv.names.size(); ++i) {
        names.push_back(fv.names[i]);
        family_tags.push_back(std::string(1, fv.families[i]));
      }
      order_doc = Json{{"names", names}, {"families", family_tags}};
      have_order = true;
    }
    Json values = Json::array();
    for (Eigen::Index i = 0; i < fv.values.size(); ++i) {
      values.push_back(fv.values(i));
    }
    out += dump_line({{"pair_id", pair.pair_id}, {"values", values}});
  }
  if (!have_order) {
    throw DataError("featurize: no pairs to featurize");
  }
  write_file(artifact(config, "feature-order.json"), order_doc.dump(2) + "\n");
  write_file(artifact(config, "features.jsonl"), out);
}

struct FeatureTable {
  std::vector<std::string> names;
  std::vector<char> families;
  std::vector<std::string> pair_ids;
  Eigen::MatrixXd values;
};

FeatureTable load_feature_table(const ExperimentConfig& config) {
  FeatureTable table;
  const Json order = read_json_file(artifact(config, "feature-order.json"));
  for (const Json& name : order.at("names")) {
    table.names.push_back(name.get<std::string>());
  }
  for (const Json& family : order.at("families")) {
    table.families.push_back(family.get<std::string>().at(0));
  }
  std::vector<std::vector<double>> rows;
  const fs::path path = artifact(config, "features.jsonl");
  for_each_jsonl(path, [&](const Json& record, int lineno) {
    const std::string context = path.string() + ":" + std::to_string(lineno);
    table.pair_ids.push_back(json_string(record, "pair_id", context));
    auto values = record.find("values");
    if (values == record.end() || !values->is_array() ||
        values->size() != table.names.size()) {
      throw DataError(context + ": 'values' must list " +
                      std::to_string(table.names.size()) + " numbers");
    }
    rows.push_back(values->get<std::vector<double>>());
  });
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return table;
}

std::map<std::string, double> load_gold_afs(const ExperimentConfig& config) {
  std::map<std::string, double> gold;
  const fs::path path = artifact(config, "gold-afs.jsonl");
  for_each_jsonl(path, [&](const Json& record, int lineno) {
    const std::string context = path.string() + ":" + std::to_string(lineno);
    gold[json_string(record, "pair_id", context)] =
        json_double(record, "score", context);
  });
  return gold;
}

// Rows = featurized pairs with an aggregated gold score, columns = the
// requested families in featurize order.
Dataset dataset_for_set(const FeatureTable& table,
                        const std::map<std::string, double>& gold,
                        const std::set<char>& families) {
  std::vector<Eigen::Index> columns;
  Dataset data;
  for (std::size_t j = 0; j < table.names.size(); ++j) {
    if (families.count(table.families[j])) {
      columns.push_back(static_cast<Eigen::Index>(j));
      data.feature_order.push_back(table.names[j]);
    }
  }
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < table.pair_ids.size(); ++i) {
    if (gold.count(table.pair_ids[i])) {
      rows.push_back(static_cast<Eigen::Index>(i));
      data.row_ids.push_back(table.pair_ids[i]);
    }
  }
  data.features.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(columns.size()));
  data.gold.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          table.values(rows[i], columns[j]);
    }
    data.gold(static_cast<Eigen::Index>(i)) = gold.at(data.row_ids[i]);
  }
  return data;
}

std::string dataset_hash(const Dataset& data) {
  std::uint64_t h = fnv1a64("afs-dataset");
  for (std::size_t i = 0; i < data.row_ids.size(); ++i) {
    h = fnv1a64(data.row_ids[i], h);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      h = fnv1a64(double_repr(data.features(static_cast<Eigen::Index>(i), j)), h);
    }
    h = fnv1a64(double_repr(data.gold(static_cast<Eigen::Index>(i))), h);
  }
  return to_hex(h);
}

void run_train(const ExperimentConfig& config) {
  const FeatureTable table = load_feature_table(config);
  const std::map<std::string, double> gold = load_gold_afs(config);
  for (const std::string& set : config.feature_sets) {
    const Dataset data = dataset_for_set(table, gold, parse_family_set(set));
    const AfsModel model = fit_linear(data, config.cv.ridge);
    Json coefficients;
    for (std::size_t i = 0; i < model.feature_order.size(); ++i) {
      coefficients[model.feature_order[i]] =
          model.coefficients(static_cast<Eigen::Index>(i));
    }
    const Json doc = {
        {"feature_set", canonical_set_name(set)},
        {"feature_order", model.feature_order},
        {"coefficients", coefficients},
        {"intercept", model.intercept},
        {"ridge", model.ridge},
        {"rows", data.row_ids.size()},
        {"training_hash", dataset_hash(data)},
    };
    write_file(artifact(config, "model-" + canonical_set_name(set) + ".json"),
               doc.dump(2) + "\n");
  }
}

void run_evaluate(const ExperimentConfig& config) {
  const FeatureTable table = load_feature_table(config);
  const std::map<std::string, double> gold = load_gold_afs(config);
  for (const std::string& set : config.feature_sets) {
    const Dataset data = dataset_for_set(table, gold, parse_family_set(set));
    const CvReport report =
        cross_validate(data, config.cv.k, config.cv.seed, config.cv.ridge);
    Json folds = Json::array();
    for (const FoldMetrics& fold : report.per_fold) {
      folds.push_back({{"fold", fold.fold},
                       {"rows", fold.rows},
                       {"mae", fold.mae},
                       {"rms", fold.rms},
                       {"r", fold.r.has_value() ? Json(*fold.r) : Json(nullptr)}});
    }
    Json pooled = Json::array();
    for (const auto& [pair_id, predicted] : report.pooled_predictions) {
      pooled.push_back({{"pair_id", pair_id}, {"predicted", predicted}});
    }
    const Json doc = {
        {"feature_set", canonical_set_name(set)},
        {"k", report.k},
        {"seed", report.seed},
        {"ridge", config.cv.ridge},
        {"r", report.r},
        {"mae", report.mae},
        {"rms", report.rms},
        {"per_fold", folds},
        {"pooled_predictions", pooled},
    };
    write_file(artifact(config, "cv-" + canonical_set_name(set) + ".json"),
               doc.dump(2) + "\n");
  }
}

std::vector<double> absolute_errors_from_cv(const ExperimentConfig& config,
                                            const std::string& set,
                                            const std::map<std::string, double>& gold,
                                            std::vector<std::string>* pair_ids) {
  const Json doc =
      read_json_file(artifact(config, "cv-" + canonical_set_name(set) + ".json"));
  std::vector<double> errors;
  pair_ids->clear();
  for (const Json& row : doc.at("pooled_predictions")) {
    const std::string pair_id = row.at("pair_id").get<std::string>();
    auto it = gold.find(pair_id);
    if (it == gold.end()) {
      throw DataError("cv report for '" + set + "' references pair '" + pair_id +
                      "' with no gold score");
    }
    errors.push_back(std::abs(row.at("predicted").get<double>() - it->second));
    pair_ids->push_back(pair_id);
  }
  return errors;
}

void run_compare(const ExperimentConfig& config) {
  const std::map<std::string, double> gold = load_gold_afs(config);
  Json entries = Json::array();
  for (std::size_t i = 0; i < config.feature_sets.size(); ++i) {
    for (std::size_t j = i + 1; j < config.feature_sets.size(); ++j) {
      std::vector<std::string> ids_a;
      std::vector<std::string> ids_b;
      const std::vector<double> errors_a =
          absolute_errors_from_cv(config, config.feature_sets[i], gold, &ids_a);
      const std::vector<double> errors_b =
          absolute_errors_from_cv(config, config.feature_sets[j], gold, &ids_b);
      if (ids_a != ids_b) {
        throw DataError("cv reports for '" + config.feature_sets[i] + "' and '" +
                        config.feature_sets[j] + "' cover different rows");
      }
      const TTestResult ttest = paired_ttest(errors_a, errors_b);
      entries.push_back({
          {"set_a", canonical_set_name(config.feature_sets[i])},
          {"set_b", canonical_set_name(config.feature_sets[j])},
          {"t", std::isfinite(ttest.t) ? Json(ttest.t) : Json(nullptr)},
          {"p", ttest.p},
          {"df", ttest.df},
          {"degenerate_variance", ttest.degenerate_variance},
      });
    }
  }
  write_file(artifact(config, "significance.json"),
             Json(entries).dump(2) + "\n");
}

template <typename Fn>
void with_stage_context(Stage stage, Fn&& fn) {
  const std::string prefix = std::string("stage ") + stage_name(stage) + ": ";
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const DataError& e) {
    throw DataError(prefix + e.what());
  } catch (const MissingResourceError& e) {
    throw MissingResourceError(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

}  // namespace

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kSelect: return "select";
    case Stage::kPyramid: return "pyramid";
    case Stage::kPropositions: return "propositions";
    case Stage::kCluster: return "cluster";
    case Stage::kPairs: return "pairs";
    case Stage::kIngestJudgments: return "ingest-judgments";
    case Stage::kFeaturize: return "featurize";
    case Stage::kTrain: return "train";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kCompare: return "compare";
  }
  return "?";
}

Stage stage_from_name(const std::string& name) {
  for (Stage stage : kAllStages) {
    if (name == stage_name(stage)) return stage;
  }
  throw ConfigError("unknown stage '" + name + "'");
}

bool stage_complete(const ExperimentConfig& config, Stage stage) {
  for (const fs::path& path : stage_artifacts(config, stage)) {
    if (!fs::exists(path)) return false;
  }
  return true;
}

void run_stage(const ExperimentConfig& config, Stage stage) {
  with_stage_context(stage, [&] {
    fs::create_directories(config.paths.output_dir);
    switch (stage) {
      case Stage::kSelect: run_select(config); break;
      case Stage::kPyramid: run_pyramid(config); break;
      case Stage::kPropositions: run_propositions(config); break;
      case Stage::kCluster: run_cluster(config); break;
      case Stage::kPairs: run_pairs(config); break;
      case Stage::kIngestJudgments: run_ingest_judgments(config); break;
      case Stage::kFeaturize: run_featurize(config); break;
      case Stage::kTrain: run_train(config); break;
      case Stage::kEvaluate: run_evaluate(config); break;
      case Stage::kCompare: run_compare(config); break;
    }
  });
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  const Json doc = read_json_file(path);
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  ExperimentConfig config;
  try {
    const Json& paths = doc.at("paths");
    config.paths.corpus_dir = resolve(base, paths.at("corpus_dir").get<std::string>());
    config.paths.output_dir = resolve(base, paths.at("output_dir").get<std::string>());
    auto optional_path = [&](const char* key) {
      return paths.contains(key) && !paths.at(key).get<std::string>().empty()
                 ? resolve(base, paths.at(key).get<std::string>())
                 : fs::path();
    };
    config.paths.stopwords = optional_path("stopwords");
    config.paths.tags = optional_path("tags");
    config.paths.lexicon = optional_path("lexicon");
    config.paths.wordspace = optional_path("wordspace");
    config.paths.sts_cache = optional_path("sts_cache");

    if (doc.contains("selection")) {
      const Json& selection = doc.at("selection");
      if (selection.contains("min_turns_per_conversant")) {
        config.selection.min_turns_per_conversant =
            selection.at("min_turns_per_conversant").get<int>();
      }
      if (selection.contains("max_words_per_turn")) {
        config.selection.max_words_per_turn =
            selection.at("max_words_per_turn").get<int>();
      }
      if (selection.contains("one_dialog_per_author_pair")) {
        config.selection.one_dialog_per_author_pair =
            selection.at("one_dialog_per_author_pair").get<bool>();
      }
    }
    if (doc.contains("min_tier")) {
      config.min_tier = doc.at("min_tier").get<int>();
    }
    const Json& cut = doc.at("cluster_cut");
    const std::string mode = cut.at("mode").get<std::string>();
    if (mode == "n_clusters") {
      config.cluster_cut = ClusterCut::n_clusters(cut.at("value").get<int>());
    } else if (mode == "distance_threshold") {
      config.cluster_cut =
          ClusterCut::distance_threshold(cut.at("value").get<double>());
    } else {
      throw ConfigError("cluster_cut.mode must be 'n_clusters' or "
                        "'distance_threshold'");
    }
    config.feature_sets = doc.at("feature_sets").get<std::vector<std::string>>();
    if (config.feature_sets.empty()) {
      throw ConfigError("feature_sets must not be empty");
    }
    for (const std::string& set : config.feature_sets) {
      parse_family_set(set);  // validate early
    }
    if (doc.contains("cv")) {
      const Json& cv = doc.at("cv");
      if (cv.contains("k")) config.cv.k = cv.at("k").get<int>();
      if (cv.contains("seed")) config.cv.seed = cv.at("seed").get<std::uint64_t>();
      if (cv.contains("ridge")) config.cv.ridge = cv.at("ridge").get<double>();
    }
    if (doc.contains("filter_policy")) {
      const Json& policy = doc.at("filter_policy");
      if (policy.contains("min_hits")) {
        config.filter_policy.min_hits = policy.at("min_hits").get<int>();
      }
      if (policy.contains("hit_size")) {
        config.filter_policy.hit_size = policy.at("hit_size").get<int>();
      }
      if (policy.contains("correlation_floor")) {
        config.filter_policy.correlation_floor =
            policy.at("correlation_floor").get<double>();
      }
    }
    if (doc.contains("sts")) {
      const Json& sts = doc.at("sts");
      if (sts.contains("mode")) config.sts.mode = sts.at("mode").get<std::string>();
      if (sts.contains("endpoint")) {
        config.sts.endpoint = sts.at("endpoint").get<std::string>();
      }
      if (sts.contains("timeout_ms")) {
        config.sts.timeout_ms = sts.at("timeout_ms").get<int>();
      }
      if (sts.contains("scale_divisor")) {
        config.sts.scale_divisor = sts.at("scale_divisor").get<double>();
      }
      if (sts.contains("constant")) {
        config.sts.constant = sts.at("constant").get<double>();
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config;
}

ExperimentReport run_experiment(const ExperimentConfig& config, bool resume,
                                Stage until) {
  for (Stage stage : kAllStages) {
    if (!resume || !stage_complete(config, stage)) {
      run_stage(config, stage);
    }
    if (stage == until) break;
  }
  if (static_cast<int>(until) < static_cast<int>(Stage::kEvaluate)) {
    ExperimentReport report;
    report.output_dir = config.paths.output_dir;
    return report;
  }
  ExperimentReport report = load_report(config);
  if (static_cast<int>(until) >= static_cast<int>(Stage::kCompare)) {
    Json rows = Json::array();
    for (const FeatureSetRow& row : report.rows) {
      rows.push_back({{"feature_set", row.feature_set},
                      {"r", row.r},
                      {"mae", row.mae},
                      {"rms", row.rms}});
    }
    const Json doc = {{"rows", rows},
                      {"significance",
                       read_json_file(artifact(config, "significance.json"))}};
    write_file(artifact(config, "report.json"), doc.dump(2) + "\n");
    write_file(artifact(config, "report.txt"), render_report_table(report));
  }
  return report;
}

ExperimentReport load_report(const ExperimentConfig& config) {
  ExperimentReport report;
  report.output_dir = config.paths.output_dir;
  for (const std::string& set : config.feature_sets) {
    const Json doc =
        read_json_file(artifact(config, "cv-" + canonical_set_name(set) + ".json"));
    FeatureSetRow row;
    row.feature_set = canonical_set_name(set);
    row.r = doc.at("r").get<double>();
    row.mae = doc.at("mae").get<double>();
    row.rms = doc.at("rms").get<double>();
    report.rows.push_back(row);
  }
  const fs::path significance = artifact(config, "significance.json");
  if (fs::exists(significance)) {
    for (const Json& entry : read_json_file(significance)) {
      SignificanceEntry item;
      item.set_a = entry.at("set_a").get<std::string>();
      item.set_b = entry.at("set_b").get<std::string>();
      item.ttest.p = entry.at("p").get<double>();
      item.ttest.df = entry.at("df").get<int>();
      item.ttest.degenerate_variance = entry.at("degenerate_variance").get<bool>();
      item.ttest.t = entry.at("t").is_null()
                         ? std::numeric_limits<double>::infinity()
                         : entry.at("t").get<double>();
      report.significance.push_back(item);
    }
  }
  return report;
}

std::string render_report_table(const ExperimentReport& report) {
  std::ostringstream out;
  std::size_t width = 11;  // "Feature Set"
  for (const FeatureSetRow& row : report.rows) {
    width = std::max(width, row.feature_set.size());
  }
  out << std::left << std::setw(static_cast<int>(width)) << "Feature Set"
      << "      R    MAE    RMS\n";
  out << std::setprecision(3) << std::fixed;
  for (const FeatureSetRow& row : report.rows) {
    out << std::left << std::setw(static_cast<int>(width)) << row.feature_set
        << "  " << std::right << std::setw(5) << row.r << "  " << std::setw(5)
        << row.mae << "  " << std::setw(5) << row.rms << "\n";
  }
  if (!report.significance.empty()) {
    out << "\nPaired t-tests on absolute CV errors:\n";
    for (const SignificanceEntry& entry : report.significance) {
      out << "  " << entry.set_a << " vs " << entry.set_b << ": t=";
      if (std::isfinite(entry.ttest.t)) {
        out << entry.ttest.t;
      } else {
        out << (entry.ttest.t > 0 ? "+inf" : "-inf");
      }
      out << ", p=" << entry.ttest.p;
      if (entry.ttest.degenerate_variance) {
        out << " (degenerate variance)";
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace afs

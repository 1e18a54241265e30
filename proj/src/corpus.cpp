#include "afs/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "afs/errors.hpp"
#include "afs/jsonl.hpp"

namespace afs {

int whitespace_word_count(const std::string& text) {
  std::istringstream stream(text);
  std::string word;
  int count = 0;
  while (stream >> word) ++count;
  return count;
}

int Dialog::turns_by(const std::string& author_id) const {
  int count = 0;
  for (const Turn& turn : turns) {
    if (turn.author_id == author_id) ++count;
  }
  return count;
}

std::pair<std::string, std::string> Dialog::author_pair() const {
  std::set<std::string> authors;
  for (const Turn& turn : turns) authors.insert(turn.author_id);
  auto it = authors.begin();
  std::string first = *it;
  std::string second = authors.size() > 1 ? *std::next(it) : first;
  return {first, second};
}

const Dialog* Corpus::find_dialog(const std::string& dialog_id) const {
  for (const Dialog& dialog : dialogs) {
    if (dialog.dialog_id == dialog_id) return &dialog;
  }
  return nullptr;
}

std::vector<const Summary*> Corpus::summaries_for(const std::string& dialog_id) const {
  std::vector<const Summary*> out;
  for (const Summary& summary : summaries) {
    if (summary.dialog_id == dialog_id) out.push_back(&summary);
  }
  return out;
}

std::vector<ScuAnnotation> Corpus::scus_for(const std::string& dialog_id) const {
  std::vector<ScuAnnotation> out;
  for (const ScuAnnotation& scu : scus) {
    if (scu.dialog_id == dialog_id) out.push_back(scu);
  }
  return out;
}

namespace {

Dialog parse_dialog(const Json& record, const std::string& context) {
  Dialog dialog;
  dialog.dialog_id = json_string(record, "dialog_id", context);
  dialog.thread_id = json_string(record, "thread_id", context);
  dialog.topic = json_string(record, "topic", context);
  auto turns = record.find("turns");
  if (turns == record.end() || !turns->is_array()) {
    throw DataError(context + ": missing 'turns' array");
  }
  std::set<std::string> authors;
  for (const Json& item : *turns) {
    Turn turn;
    turn.author_id = json_string(item, "author_id", context);
    turn.index = json_int(item, "index", context);
    turn.text = json_string(item, "text", context);
    turn.word_count = whitespace_word_count(turn.text);
    authors.insert(turn.author_id);
    dialog.turns.push_back(std::move(turn));
  }
  for (std::size_t i = 0; i < dialog.turns.size(); ++i) {
    if (dialog.turns[i].index != static_cast<int>(i) + 1) {
      throw DataError(context + ": dialog '" + dialog.dialog_id +
                      "' turn indices are not contiguous from 1");
    }
  }
  if (!dialog.turns.empty() && authors.size() != 2) {
    throw DataError(context + ": dialog '" + dialog.dialog_id + "' has " +
                    std::to_string(authors.size()) +
                    " distinct authors, expected exactly 2");
  }
  return dialog;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir)) {
    throw MissingResourceError("corpus directory " + dir.string() + " does not exist");
  }
  const auto dialogs_path = dir / "dialogs.jsonl";
  if (!std::filesystem::exists(dialogs_path)) {
    throw MissingResourceError("missing required file " + dialogs_path.string());
  }

  Corpus corpus;
  std::set<std::string> dialog_ids;
  for_each_jsonl(dialogs_path, [&](const Json& record, int lineno) {
    const std::string context = dialogs_path.string() + ":" + std::to_string(lineno);
    Dialog dialog = parse_dialog(record, context);
    if (!dialog_ids.insert(dialog.dialog_id).second) {
      throw DataError(context + ": duplicate dialog_id '" + dialog.dialog_id + "'");
    }
    corpus.dialogs.push_back(std::move(dialog));
  });

  // writer_index uniqueness per dialog, and dialog references must resolve.
  std::map<std::string, std::set<int>> writers_by_dialog;
  const auto summaries_path = dir / "summaries.jsonl";
  if (std::filesystem::exists(summaries_path)) {
    std::set<std::string> summary_ids;
    for_each_jsonl(summaries_path, [&](const Json& record, int lineno) {
      const std::string context = summaries_path.string() + ":" + std::to_string(lineno);
      Summary summary;
      summary.summary_id = json_string(record, "summary_id", context);
      summary.dialog_id = json_string(record, "dialog_id", context);
      summary.writer_index = json_int(record, "writer_index", context);
      summary.text = json_string(record, "text", context);
      if (!summary_ids.insert(summary.summary_id).second) {
        throw DataError(context + ": duplicate summary_id '" + summary.summary_id + "'");
      }
      if (!dialog_ids.count(summary.dialog_id)) {
        throw DataError(context + ": summary '" + summary.summary_id +
                        "' references unknown dialog_id '" + summary.dialog_id + "'");
      }
      if (summary.writer_index < 1) {
        throw DataError(context + ": writer_index must be >= 1");
      }
      if (!writers_by_dialog[summary.dialog_id].insert(summary.writer_index).second) {
        throw DataError(context + ": duplicate writer_index " +
                        std::to_string(summary.writer_index) + " for dialog '" +
                        summary.dialog_id + "'");
      }
      corpus.summaries.push_back(std::move(summary));
    });
  }

  const auto scus_path = dir / "scus.jsonl";
  if (std::filesystem::exists(scus_path)) {
    std::set<std::string> scu_ids;
    for_each_jsonl(scus_path, [&](const Json& record, int lineno) {
      const std::string context = scus_path.string() + ":" + std::to_string(lineno);
      ScuAnnotation scu;
      scu.scu_id = json_string(record, "scu_id", context);
      scu.dialog_id = json_string(record, "dialog_id", context);
      scu.label = json_string(record, "label", context);
      auto used_by = record.find("used_by");
      if (used_by == record.end() || !used_by->is_array()) {
        throw DataError(context + ": missing 'used_by' array");
      }
      for (const Json& writer : *used_by) {
        if (!writer.is_number_integer()) {
          throw DataError(context + ": used_by entries must be integers");
        }
        scu.used_by.insert(writer.get<int>());
      }
      if (!scu_ids.insert(scu.scu_id).second) {
        throw DataError(context + ": duplicate scu_id '" + scu.scu_id + "'");
      }
      if (scu.label.empty()) {
        throw DataError(context + ": SCU '" + scu.scu_id + "' has an empty label");
      }
      if (!dialog_ids.count(scu.dialog_id)) {
        throw DataError(context + ": SCU '" + scu.scu_id +
                        "' references unknown dialog_id '" + scu.dialog_id + "'");
      }
      if (scu.used_by.empty()) {
        throw DataError(context + ": SCU '" + scu.scu_id + "' has empty used_by");
      }
      const std::set<int>& writers = writers_by_dialog[scu.dialog_id];
      for (int writer : scu.used_by) {
        if (!writers.count(writer)) {
          throw DataError(context + ": SCU '" + scu.scu_id +
                          "' references writer index " + std::to_string(writer) +
                          " with no summary for dialog '" + scu.dialog_id + "'");
        }
      }
      corpus.scus.push_back(std::move(scu));
    });
  }

  std::set<std::string> pair_ids;
  const auto pairs_path = dir / "pairs.jsonl";
  const bool have_pairs_file = std::filesystem::exists(pairs_path);
  if (have_pairs_file) {
    for_each_jsonl(pairs_path, [&](const Json& record, int lineno) {
      const std::string context = pairs_path.string() + ":" + std::to_string(lineno);
      PropositionPair pair;
      pair.pair_id = json_string(record, "pair_id", context);
      pair.label_a = json_string(record, "label_a", context);
      pair.label_b = json_string(record, "label_b", context);
      pair.source_cluster = json_int(record, "source_cluster", context);
      if (!pair_ids.insert(pair.pair_id).second) {
        throw DataError(context + ": duplicate pair_id '" + pair.pair_id + "'");
      }
      corpus.pairs.push_back(std::move(pair));
    });
  }

  const auto judgments_path = dir / "judgments.jsonl";
  if (std::filesystem::exists(judgments_path)) {
    for_each_jsonl(judgments_path, [&](const Json& record, int lineno) {
      const std::string context = judgments_path.string() + ":" + std::to_string(lineno);
      AfsJudgment judgment;
      judgment.worker_id = json_string(record, "worker_id", context);
      judgment.pair_id = json_string(record, "pair_id", context);
      judgment.score = json_int(record, "score", context);
      if (judgment.score < 0 || judgment.score > 5) {
        throw DataError(context + ": score must lie in 0..5");
      }
      // Pair references can only be checked against a pairs file; when pairs
      // are generated downstream the ingest stage re-validates them.
      if (have_pairs_file && !pair_ids.count(judgment.pair_id)) {
        throw DataError(context + ": judgment references unknown pair_id '" +
                        judgment.pair_id + "'");
      }
      corpus.judgments.push_back(std::move(judgment));
    });
  }

  const auto gold_path = dir / "gold.jsonl";
  if (std::filesystem::exists(gold_path)) {
    for_each_jsonl(gold_path, [&](const Json& record, int lineno) {
      const std::string context = gold_path.string() + ":" + std::to_string(lineno);
      const std::string pair_id = json_string(record, "pair_id", context);
      const double score = json_double(record, "score", context);
      if (score < 0.0 || score > 5.0) {
        throw DataError(context + ": score must lie in [0,5]");
      }
      if (have_pairs_file && !pair_ids.count(pair_id)) {
        throw DataError(context + ": gold score references unknown pair_id '" +
                        pair_id + "'");
      }
      if (!corpus.expert_gold.emplace(pair_id, score).second) {
        throw DataError(context + ": duplicate gold score for pair '" + pair_id + "'");
      }
    });
  }

  return corpus;
}

std::vector<Dialog> select_dialogs(const std::vector<Dialog>& dialogs,
                                   const SelectionCriteria& criteria) {
  if (criteria.min_turns_per_conversant < 1 || criteria.max_words_per_turn < 1) {
    throw ConfigError("selection criteria must be >= 1");
  }
  std::vector<Dialog> selected;
  std::set<std::tuple<std::string, std::string, std::string>> seen_pairs;
  for (const Dialog& dialog : dialogs) {
    if (dialog.turns.empty()) continue;

    bool words_ok = true;
    for (const Turn& turn : dialog.turns) {
      if (turn.word_count >= criteria.max_words_per_turn) {
        words_ok = false;
        break;
      }
    }
    if (!words_ok) continue;

    const auto [author_a, author_b] = dialog.author_pair();
    if (dialog.turns_by(author_a) < criteria.min_turns_per_conversant ||
        dialog.turns_by(author_b) < criteria.min_turns_per_conversant) {
      continue;
    }

    if (criteria.one_dialog_per_author_pair &&
        !seen_pairs.insert({dialog.thread_id, author_a, author_b}).second) {
      continue;
    }
    selected.push_back(dialog);
  }
  return selected;
}

}  // namespace afs

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "afs/annotation.hpp"
#include "afs/clustering.hpp"

namespace afs {

struct Turn {
  std::string author_id;
  int index = 0;  // 1-based position in the dialog
  std::string text;
  int word_count = 0;  // whitespace-delimited tokens, computed at load
};

struct Dialog {
  std::string dialog_id;
  std::string thread_id;
  std::string topic;
  std::vector<Turn> turns;  // exactly two distinct authors

  int turns_by(const std::string& author_id) const;
  std::pair<std::string, std::string> author_pair() const;  // sorted
};

struct Summary {
  std::string summary_id;
  std::string dialog_id;
  int writer_index = 0;  // 1..S, unique per dialog
  std::string text;
};

struct ScuAnnotation {
  std::string scu_id;
  std::string dialog_id;
  std::string label;        // the proposition text
  std::set<int> used_by;    // writer indices that contributed to this SCU
};

struct SelectionCriteria {
  int min_turns_per_conversant = 3;
  int max_words_per_turn = 250;
  bool one_dialog_per_author_pair = true;
};

// Fully cross-linked in-memory corpus. Immutable once loaded.
struct Corpus {
  std::vector<Dialog> dialogs;
  std::vector<Summary> summaries;
  std::vector<ScuAnnotation> scus;
  std::vector<PropositionPair> pairs;     // pairs.jsonl, optional
  std::vector<AfsJudgment> judgments;     // judgments.jsonl, optional
  std::map<std::string, double> expert_gold;  // gold.jsonl, optional

  const Dialog* find_dialog(const std::string& dialog_id) const;
  std::vector<const Summary*> summaries_for(const std::string& dialog_id) const;
  std::vector<ScuAnnotation> scus_for(const std::string& dialog_id) const;
};

// Reads dialogs.jsonl (required, may be empty) plus summaries.jsonl,
// scus.jsonl, pairs.jsonl, judgments.jsonl, and gold.jsonl when present,
// and verifies every cross-reference. Malformed records and dangling
// references raise DataError naming the file, line, and offending id.
Corpus load_corpus(const std::filesystem::path& dir);

// Keeps dialogs with at least min_turns_per_conversant turns per author and
// every turn strictly under max_words_per_turn words; optionally keeps only
// the first dialog per (thread, unordered author pair). Order preserving.
std::vector<Dialog> select_dialogs(const std::vector<Dialog>& dialogs,
                                   const SelectionCriteria& criteria);

int whitespace_word_count(const std::string& text);

}  // namespace afs

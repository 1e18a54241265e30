#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace afs {

struct Token {
  std::string surface;       // lowercased, no whitespace
  std::size_t position = 0;  // 0-based index in the token stream
};

// Coarse 4-way tag set; everything that is not a content word is OTHER.
enum class Pos { kNoun, kVerb, kAdj, kOther };

const char* pos_name(Pos pos);
Pos pos_from_name(std::string_view name);

struct TaggedToken {
  Token token;
  Pos pos = Pos::kOther;
};

// Lowercases and splits on anything that is not a letter, digit, or an
// apostrophe with letters/digits on both sides ("don't" stays one token).
// Bytes >= 0x80 are kept verbatim so multi-byte UTF-8 sequences survive.
std::vector<Token> tokenize(std::string_view text);

// Classic Porter suffix stripper, steps 1a through 5b. Words shorter than
// three characters or containing anything outside [a-z] come back unchanged.
// The input must be non-empty and lowercased.
std::string porter_stem(const std::string& word);

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<TaggedToken> tag(const std::vector<Token>& tokens) const = 0;
};

// Word -> coarse tag lookup backed by a TSV lexicon; unknown words are OTHER.
// Later duplicate entries in the file override earlier ones.
class LexiconTagger : public Tagger {
 public:
  explicit LexiconTagger(std::map<std::string, Pos> entries);
  static LexiconTagger from_file(const std::filesystem::path& path);

  std::vector<TaggedToken> tag(const std::vector<Token>& tokens) const override;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Pos> entries_;
};

// One TaggedToken per input token, order preserved.
inline std::vector<TaggedToken> pos_tag(const std::vector<Token>& tokens,
                                        const Tagger& tagger) {
  return tagger.tag(tokens);
}

class StopwordList {
 public:
  StopwordList() = default;
  explicit StopwordList(std::set<std::string> words) : words_(std::move(words)) {}
  static StopwordList from_file(const std::filesystem::path& path);

  bool contains(const std::string& word) const { return words_.count(word) > 0; }
  const std::set<std::string>& words() const { return words_; }

 private:
  std::set<std::string> words_;
};

// N-gram multiset: gram text (tokens joined by single spaces) -> multiplicity.
using NgramCounts = std::map<std::string, int>;

// Contiguous n-grams over the token sequence, n in {1,2,3}. Stop-word
// dropping applies to unigrams only; for n > 1 the flag is ignored.
NgramCounts extract_ngrams(const std::vector<Token>& tokens, int n,
                           bool apply_stemming, bool drop_stopwords,
                           const StopwordList* stopwords = nullptr);

int total_count(const NgramCounts& grams);

}  // namespace afs

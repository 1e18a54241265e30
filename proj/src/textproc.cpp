#include "afs/textproc.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "afs/errors.hpp"

namespace afs {

const char* pos_name(Pos pos) {
  switch (pos) {
    case Pos::kNoun: return "NOUN";
    case Pos::kVerb: return "VERB";
    case Pos::kAdj: return "ADJ";
    case Pos::kOther: return "OTHER";
  }
  return "OTHER";
}

Pos pos_from_name(std::string_view name) {
  if (name == "NOUN") return Pos::kNoun;
  if (name == "VERB") return Pos::kVerb;
  if (name == "ADJ") return Pos::kAdj;
  if (name == "OTHER") return Pos::kOther;
  throw DataError("unknown tag '" + std::string(name) + "'");
}

namespace {

// Token characters: ASCII letters/digits plus any byte >= 0x80, so that
// multi-byte UTF-8 sequences are never split.
bool is_token_char(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

char lower_ascii(unsigned char c) {
  return c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c);
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&]() {
    if (!current.empty()) {
      tokens.push_back(Token{current, tokens.size()});
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_token_char(c)) {
      current.push_back(lower_ascii(c));
    } else if (c == '\'' && !current.empty() && i + 1 < text.size() &&
               is_token_char(static_cast<unsigned char>(text[i + 1]))) {
      current.push_back('\'');  // internal apostrophe
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

LexiconTagger::LexiconTagger(std::map<std::string, Pos> entries)
    : entries_(std::move(entries)) {}

LexiconTagger LexiconTagger::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResourceError("cannot open tag lexicon " + path.string());
  }
  std::map<std::string, Pos> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected 'word<TAB>tag'");
    }
    std::string word = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);
    if (word.empty()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": empty word");
    }
    entries[word] = pos_from_name(tag);  // later lines override earlier ones
  }
  return LexiconTagger(std::move(entries));
}

std::vector<TaggedToken> LexiconTagger::tag(const std::vector<Token>& tokens) const {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) {
    auto it = entries_.find(t.surface);
    out.push_back(TaggedToken{t, it == entries_.end() ? Pos::kOther : it->second});
  }
  return out;
}

StopwordList StopwordList::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResourceError("cannot open stopword list " + path.string());
  }
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return StopwordList(std::move(words));
}

NgramCounts extract_ngrams(const std::vector<Token>& tokens, int n,
                           bool apply_stemming, bool drop_stopwords,
                           const StopwordList* stopwords) {
  if (n < 1 || n > 3) {
    throw DataError("extract_ngrams: n must be 1, 2, or 3");
  }
  if (drop_stopwords && n == 1 && stopwords == nullptr) {
    throw MissingResourceError("extract_ngrams: stop-word filtering requested "
                               "without a stopword list");
  }
  std::vector<std::string> surfaces;
  surfaces.reserve(tokens.size());
  for (const Token& t : tokens) {
    if (n == 1 && drop_stopwords && stopwords->contains(t.surface)) continue;
    surfaces.push_back(apply_stemming ? porter_stem(t.surface) : t.surface);
  }
  NgramCounts grams;
  if (surfaces.size() < static_cast<std::size_t>(n)) {
    return grams;
  }
  for (std::size_t i = 0; i + n <= surfaces.size(); ++i) {
    std::string gram = surfaces[i];
    for (int j = 1; j < n; ++j) {
      gram += ' ';
      gram += surfaces[i + j];
    }
    ++grams[gram];
  }
  return grams;
}

int total_count(const NgramCounts& grams) {
  int total = 0;
  for (const auto& [gram, count] : grams) total += count;
  return total;
}

}  // namespace afs

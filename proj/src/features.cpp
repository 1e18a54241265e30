#include "afs/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

#include "afs/errors.hpp"

namespace afs {

double FeatureVector::at(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return values(static_cast<Eigen::Index>(i));
  }
  throw DataError("feature vector has no feature named '" + name + "'");
}

std::set<char> parse_family_set(const std::string& spec) {
  std::set<char> families;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    char c = spec[i];
    if (c == '-') continue;
    if (c != 'N' && c != 'L' && c != 'R' && c != 'D' && c != 'U') {
      throw ConfigError("unknown feature family '" + std::string(1, c) +
                        "' in set '" + spec + "'");
    }
    if (!families.insert(c).second) {
      throw ConfigError("duplicate feature family in set '" + spec + "'");
    }
  }
  if (families.empty()) {
    throw ConfigError("empty feature set '" + spec + "'");
  }
  return families;
}

std::string family_set_name(const std::set<char>& families) {
  std::string name;
  for (char tag : kFamilyTags) {
    if (families.count(tag)) {
      if (!name.empty()) name += '-';
      name += tag;
    }
  }
  return name;
}

namespace {

std::vector<std::string> stemmed_surfaces(const std::string& text) {
  std::vector<std::string> out;
  for (const Token& token : tokenize(text)) {
    out.push_back(porter_stem(token.surface));
  }
  return out;
}

int clipped_overlap(const NgramCounts& a, const NgramCounts& b) {
  int overlap = 0;
  for (const auto& [gram, count] : a) {
    auto it = b.find(gram);
    if (it != b.end()) {
      overlap += std::min(count, it->second);
    }
  }
  return overlap;
}

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts grams;
  if (tokens.size() < static_cast<std::size_t>(n)) return grams;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (int j = 1; j < n; ++j) {
      gram += ' ';
      gram += tokens[i + static_cast<std::size_t>(j)];
    }
    ++grams[gram];
  }
  return grams;
}

// Skip-bigrams with gap at most `max_gap` token positions, plus unigrams.
NgramCounts count_skip_units(const std::vector<std::string>& tokens, int max_gap) {
  NgramCounts units;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    ++units[tokens[i]];
    for (std::size_t j = i + 1;
         j < tokens.size() && j - i <= static_cast<std::size_t>(max_gap); ++j) {
      ++units[tokens[i] + ' ' + tokens[j]];
    }
  }
  return units;
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                     : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

double balanced_f1(double overlap, double total_a, double total_b) {
  if (overlap <= 0.0 || total_a <= 0.0 || total_b <= 0.0) return 0.0;
  const double recall = overlap / total_a;
  const double precision = overlap / total_b;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace

NgramOverlapCounts ngram_overlap(const std::string& a, const std::string& b,
                                 const StopwordList& stopwords) {
  const std::vector<Token> tokens_a = tokenize(a);
  const std::vector<Token> tokens_b = tokenize(b);
  NgramOverlapCounts counts;
  counts.uni = clipped_overlap(
      extract_ngrams(tokens_a, 1, true, true, &stopwords),
      extract_ngrams(tokens_b, 1, true, true, &stopwords));
  counts.bi = clipped_overlap(extract_ngrams(tokens_a, 2, true, false),
                              extract_ngrams(tokens_b, 2, true, false));
  counts.tri = clipped_overlap(extract_ngrams(tokens_a, 3, true, false),
                               extract_ngrams(tokens_b, 3, true, false));
  return counts;
}

const char* rouge_variant_name(RougeVariant variant) {
  switch (variant) {
    case RougeVariant::kR1: return "r1";
    case RougeVariant::kR2: return "r2";
    case RougeVariant::kR3: return "r3";
    case RougeVariant::kR4: return "r4";
    case RougeVariant::kRL: return "rl";
    case RougeVariant::kRSU4: return "rsu4";
  }
  return "?";
}

double rouge_f(const std::string& a, const std::string& b, RougeVariant variant) {
  const std::vector<std::string> tokens_a = stemmed_surfaces(a);
  const std::vector<std::string> tokens_b = stemmed_surfaces(b);

  if (variant == RougeVariant::kRL) {
    const double lcs = static_cast<double>(lcs_length(tokens_a, tokens_b));
    return balanced_f1(lcs, static_cast<double>(tokens_a.size()),
                       static_cast<double>(tokens_b.size()));
  }
  if (variant == RougeVariant::kRSU4) {
    const NgramCounts units_a = count_skip_units(tokens_a, 4);
    const NgramCounts units_b = count_skip_units(tokens_b, 4);
    return balanced_f1(static_cast<double>(clipped_overlap(units_a, units_b)),
                       static_cast<double>(total_count(units_a)),
                       static_cast<double>(total_count(units_b)));
  }
  int n = 1;
  switch (variant) {
    case RougeVariant::kR1: n = 1; break;
    case RougeVariant::kR2: n = 2; break;
    case RougeVariant::kR3: n = 3; break;
    case RougeVariant::kR4: n = 4; break;
    default: break;
  }
  const NgramCounts grams_a = count_ngrams(tokens_a, n);
  const NgramCounts grams_b = count_ngrams(tokens_b, n);
  return balanced_f1(static_cast<double>(clipped_overlap(grams_a, grams_b)),
                     static_cast<double>(total_count(grams_a)),
                     static_cast<double>(total_count(grams_b)));
}

const std::vector<std::string>& CategoryLexicon::default_retained_categories() {
  static const std::vector<std::string> kRetained = {
      "Biological Processes", "Causation",        "Cognitive Processes",
      "Humans",               "Negative Emotion", "Positive Emotion",
      "Religion",             "Sexual",           "Social Processes",
  };
  return kRetained;
}

CategoryLexicon::CategoryLexicon(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  std::sort(categories_.begin(), categories_.end(),
            [](const Category& lhs, const Category& rhs) {
              return lhs.name < rhs.name;
            });
}

CategoryLexicon CategoryLexicon::from_file(const std::filesystem::path& path,
                                           const std::vector<std::string>& retained) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResourceError("cannot open category lexicon " + path.string());
  }
  const std::set<std::string> wanted(retained.begin(), retained.end());
  std::map<std::string, std::string> id_to_name;
  std::map<std::string, Category> by_name;

  std::string line;
  int lineno = 0;
  int percent_seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string context = path.string() + ":" + std::to_string(lineno);
    if (line == "%") {
      ++percent_seen;
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(context + ": expected a TAB-separated entry");
    }
    if (percent_seen == 1) {
      // Header: category id TAB category name.
      id_to_name[line.substr(0, tab)] = line.substr(tab + 1);
      continue;
    }
    if (percent_seen < 2) {
      throw DataError(context + ": pattern line before the '%' header");
    }
    // Pattern: word or prefix TAB comma-separated category ids.
    std::string pattern = line.substr(0, tab);
    if (pattern.empty() || pattern == "*") {
      throw DataError(context + ": invalid pattern '" + pattern + "'");
    }
    std::string ids = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= ids.size()) {
      auto comma = ids.find(',', start);
      const std::string id =
          ids.substr(start, comma == std::string::npos ? std::string::npos
                                                       : comma - start);
      auto named = id_to_name.find(id);
      if (named == id_to_name.end()) {
        throw DataError(context + ": unknown category id '" + id + "'");
      }
      if (wanted.count(named->second)) {
        Category& cat = by_name[named->second];
        cat.name = named->second;
        if (pattern.back() == '*') {
          cat.prefixes.push_back(pattern.substr(0, pattern.size() - 1));
        } else {
          cat.literals.push_back(pattern);
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  if (percent_seen < 2) {
    throw DataError(path.string() + ": missing '%'-delimited category header");
  }
  std::vector<Category> categories;
  for (const std::string& name : retained) {
    bool in_header = false;
    for (const auto& [id, header_name] : id_to_name) {
      if (header_name == name) {
        in_header = true;
        break;
      }
    }
    if (!in_header) {
      throw DataError(path.string() + ": retained category '" + name +
                      "' is not declared in the header");
    }
    auto it = by_name.find(name);
    categories.push_back(it == by_name.end() ? Category{name, {}, {}} : it->second);
  }
  return CategoryLexicon(std::move(categories));
}

bool CategoryLexicon::matches(const Category& category,
                              const std::string& token) const {
  for (const std::string& literal : category.literals) {
    if (token == literal) return true;
  }
  for (const std::string& prefix : category.prefixes) {
    if (token.size() >= prefix.size() &&
        token.compare(0, prefix.size(), prefix) == 0) {
      return true;
    }
  }
  return false;
}

std::map<std::string, int> lexicon_overlap(const std::string& a,
                                           const std::string& b,
                                           const CategoryLexicon& lexicon) {
  const std::vector<Token> tokens_a = tokenize(a);
  const std::vector<Token> tokens_b = tokenize(b);
  std::map<std::string, int> counts;
  for (const auto& category : lexicon.categories()) {
    // Patterns match the raw token; the stem is what enters the type set.
    std::set<std::string> types_a;
    for (const Token& t : tokens_a) {
      if (lexicon.matches(category, t.surface)) {
        types_a.insert(porter_stem(t.surface));
      }
    }
    int shared = 0;
    std::set<std::string> counted;
    for (const Token& t : tokens_b) {
      if (lexicon.matches(category, t.surface)) {
        const std::string stem = porter_stem(t.surface);
        if (types_a.count(stem) && counted.insert(stem).second) {
          ++shared;
        }
      }
    }
    counts[category.name] = shared;
  }
  return counts;
}

WordSpace::WordSpace(std::map<std::string, std::vector<Neighbor>> neighbors)
    : neighbors_(std::move(neighbors)) {
  for (auto& [word, list] : neighbors_) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Neighbor& lhs, const Neighbor& rhs) {
                       return lhs.similarity > rhs.similarity;
                     });
    for (const Neighbor& n : list) {
      if (n.word == word) {
        throw DataError("word space: '" + word + "' lists itself as a neighbor");
      }
    }
  }
}

WordSpace WordSpace::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw MissingResourceError("cannot open word space " + path.string());
  }
  std::map<std::string, std::vector<Neighbor>> neighbors;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string context = path.string() + ":" + std::to_string(lineno);
    auto tab1 = line.find('\t');
    auto tab2 = tab1 == std::string::npos ? std::string::npos
                                          : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw DataError(context + ": expected 'word<TAB>neighbor<TAB>similarity'");
    }
    double similarity = 0.0;
    try {
      similarity = std::stod(line.substr(tab2 + 1));
    } catch (const std::exception&) {
      throw DataError(context + ": non-numeric similarity");
    }
    if (similarity < 0.0 || similarity > 1.0) {
      throw DataError(context + ": similarity outside [0,1]");
    }
    neighbors[line.substr(0, tab1)].push_back(
        Neighbor{line.substr(tab1 + 1, tab2 - tab1 - 1), similarity});
  }
  return WordSpace(std::move(neighbors));
}

std::vector<WordSpace::Neighbor> WordSpace::top(const std::string& word,
                                                int k) const {
  auto it = neighbors_.find(word);
  if (it == neighbors_.end()) return {};
  const auto& list = it->second;
  const std::size_t take = std::min(list.size(), static_cast<std::size_t>(k));
  return {list.begin(), list.begin() + static_cast<std::ptrdiff_t>(take)};
}

namespace {

constexpr int kTopNeighbors = 5;

std::map<std::string, int> pos_class_counts(const std::vector<TaggedToken>& tagged,
                                            Pos pos, const WordSpace& word_space) {
  std::map<std::string, int> counts;
  for (const TaggedToken& t : tagged) {
    if (t.pos != pos) continue;
    ++counts[porter_stem(t.token.surface)];
    for (const WordSpace::Neighbor& n : word_space.top(t.token.surface, kTopNeighbors)) {
      ++counts[porter_stem(n.word)];
    }
  }
  return counts;
}

double count_cosine(const std::map<std::string, int>& u,
                    const std::map<std::string, int>& v) {
  if (u.empty() || v.empty()) return 0.0;
  double dot = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
  for (const auto& [term, count] : u) {
    norm_u += static_cast<double>(count) * count;
    auto it = v.find(term);
    if (it != v.end()) dot += static_cast<double>(count) * it->second;
  }
  for (const auto& [term, count] : v) {
    norm_v += static_cast<double>(count) * count;
  }
  // sqrt rounding can push the ratio an ulp past 1 for identical vectors.
  return std::clamp(dot / (std::sqrt(norm_u) * std::sqrt(norm_v)), 0.0, 1.0);
}

}  // namespace

PosCosines distributional_similarity(const std::string& a, const std::string& b,
                                     const WordSpace& word_space,
                                     const Tagger& tagger) {
  const std::vector<TaggedToken> tagged_a = pos_tag(tokenize(a), tagger);
  const std::vector<TaggedToken> tagged_b = pos_tag(tokenize(b), tagger);
  PosCosines cosines;
  cosines.noun = count_cosine(pos_class_counts(tagged_a, Pos::kNoun, word_space),
                              pos_class_counts(tagged_b, Pos::kNoun, word_space));
  cosines.verb = count_cosine(pos_class_counts(tagged_a, Pos::kVerb, word_space),
                              pos_class_counts(tagged_b, Pos::kVerb, word_space));
  cosines.adj = count_cosine(pos_class_counts(tagged_a, Pos::kAdj, word_space),
                             pos_class_counts(tagged_b, Pos::kAdj, word_space));
  return cosines;
}

double external_sts(const std::string& a, const std::string& b, StsScorer& scorer) {
  return scorer.score(a, b);
}

namespace {

std::string category_feature_name(const std::string& category) {
  std::string slug = "liwc.";
  for (char c : category) {
    slug += c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return slug;
}

}  // namespace

FeatureVector featurize(const std::string& a, const std::string& b,
                        const std::set<char>& families,
                        const FeatureResources& resources) {
  std::vector<std::string> names;
  std::vector<char> tags;
  std::vector<double> values;
  auto add = [&](char family, std::string name, double value) {
    if (!std::isfinite(value)) {
      throw DataError("featurize: non-finite value for feature '" + name + "'");
    }
    names.push_back(std::move(name));
    tags.push_back(family);
    values.push_back(value);
  };

  if (families.count('N')) {
    if (resources.stopwords == nullptr) {
      throw MissingResourceError("featurize: family N requires a stopword list");
    }
    const NgramOverlapCounts counts = ngram_overlap(a, b, *resources.stopwords);
    add('N', "ngram.uni", counts.uni);
    add('N', "ngram.bi", counts.bi);
    add('N', "ngram.tri", counts.tri);
  }
  if (families.count('L')) {
    if (resources.lexicon == nullptr) {
      throw MissingResourceError("featurize: family L requires a category lexicon");
    }
    const auto overlap = lexicon_overlap(a, b, *resources.lexicon);
    for (const auto& category : resources.lexicon->categories()) {
      add('L', category_feature_name(category.name),
          static_cast<double>(overlap.at(category.name)));
    }
  }
  if (families.count('R')) {
    for (RougeVariant variant : kAllRougeVariants) {
      add('R', std::string("rouge.") + rouge_variant_name(variant),
          rouge_f(a, b, variant));
    }
  }
  if (families.count('D')) {
    if (resources.word_space == nullptr || resources.tagger == nullptr) {
      throw MissingResourceError(
          "featurize: family D requires a word space and a tagger");
    }
    const PosCosines cosines =
        distributional_similarity(a, b, *resources.word_space, *resources.tagger);
    add('D', "disco.noun", cosines.noun);
    add('D', "disco.verb", cosines.verb);
    add('D', "disco.adj", cosines.adj);
  }
  if (families.count('U')) {
    if (resources.sts == nullptr) {
      throw MissingResourceError("featurize: family U requires an STS scorer");
    }
    add('U', "sts.score", external_sts(a, b, *resources.sts));
  }

  FeatureVector fv;
  fv.names = std::move(names);
  fv.families = std::move(tags);
  fv.values.resize(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    fv.values(static_cast<Eigen::Index>(i)) = values[i];
  }
  return fv;
}

}  // namespace afs

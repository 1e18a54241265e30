#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "afs/sts.hpp"
#include "afs/textproc.hpp"

namespace afs {

// A named, family-tagged feature vector for one text pair. Names are unique
// and each belongs to exactly one family in {N, L, R, D, U}.
struct FeatureVector {
  std::vector<std::string> names;
  std::vector<char> families;
  Eigen::VectorXd values;

  Eigen::Index size() const { return values.size(); }
  double at(const std::string& name) const;
};

// The five feature families.
//   N  stemmed n-gram overlap counts (stop words dropped for unigrams)
//   L  per-category shared lexicon types
//   R  ROUGE f-scores
//   D  distributional similarity cosines per POS class
//   U  external sentence-similarity score
constexpr char kFamilyTags[] = {'N', 'L', 'R', 'D', 'U'};

std::set<char> parse_family_set(const std::string& spec);  // e.g. "N-L-R-D-U"
std::string family_set_name(const std::set<char>& families);

struct NgramOverlapCounts {
  int uni = 0;
  int bi = 0;
  int tri = 0;
};

// Overlap = sum over gram types of min(multiplicity in a, multiplicity in b),
// over stemmed grams; stop words removed for unigrams only.
NgramOverlapCounts ngram_overlap(const std::string& a, const std::string& b,
                                 const StopwordList& stopwords);

enum class RougeVariant { kR1, kR2, kR3, kR4, kRL, kRSU4 };

constexpr RougeVariant kAllRougeVariants[] = {
    RougeVariant::kR1, RougeVariant::kR2,  RougeVariant::kR3,
    RougeVariant::kR4, RougeVariant::kRL,  RougeVariant::kRSU4,
};

const char* rouge_variant_name(RougeVariant variant);

// Balanced F1 of the variant's precision/recall over stemmed tokens.
// R1-R4 use clipped n-gram overlap, RL the longest common subsequence,
// RSU4 skip-bigrams with maximum gap 4 plus unigrams.
double rouge_f(const std::string& a, const std::string& b, RougeVariant variant);

// LIWC-style category lexicon: literal words and '*'-terminated prefixes.
class CategoryLexicon {
 public:
  struct Category {
    std::string name;
    std::vector<std::string> literals;
    std::vector<std::string> prefixes;  // stored without the trailing '*'
  };

  static const std::vector<std::string>& default_retained_categories();

  // Parses the "%"-delimited header of ids/names followed by pattern lines.
  // Categories outside `retained` are dropped; every retained category must
  // be listed in the file header.
  static CategoryLexicon from_file(const std::filesystem::path& path,
                                   const std::vector<std::string>& retained =
                                       default_retained_categories());
  explicit CategoryLexicon(std::vector<Category> categories);

  const std::vector<Category>& categories() const { return categories_; }
  // True if the raw (unstemmed) token matches any pattern of the category.
  bool matches(const Category& category, const std::string& token) const;

 private:
  std::vector<Category> categories_;  // sorted by name
};

// Per-category count of stemmed token types present in both texts.
std::map<std::string, int> lexicon_overlap(const std::string& a,
                                           const std::string& b,
                                           const CategoryLexicon& lexicon);

// Distributional neighbor table: word -> neighbors ranked by similarity.
class WordSpace {
 public:
  struct Neighbor {
    std::string word;
    double similarity = 0.0;
  };

  WordSpace() = default;
  explicit WordSpace(std::map<std::string, std::vector<Neighbor>> neighbors);
  static WordSpace from_file(const std::filesystem::path& path);

  // Up to k nearest neighbors, best first.
  std::vector<Neighbor> top(const std::string& word, int k) const;
  std::size_t size() const { return neighbors_.size(); }

 private:
  std::map<std::string, std::vector<Neighbor>> neighbors_;
};

struct PosCosines {
  double noun = 0.0;
  double verb = 0.0;
  double adj = 0.0;
};

// Per POS class, cosine of the two sides' stemmed count vectors over their
// words of that class expanded with each word's top-5 neighbors. A class
// with no members on either side scores 0.
PosCosines distributional_similarity(const std::string& a, const std::string& b,
                                     const WordSpace& word_space,
                                     const Tagger& tagger);

// Cache-through external similarity lookup; see StsScorer for the contract.
double external_sts(const std::string& a, const std::string& b, StsScorer& scorer);

// Everything featurize may need; only the resources for requested families
// have to be present.
struct FeatureResources {
  const StopwordList* stopwords = nullptr;       // N
  const CategoryLexicon* lexicon = nullptr;      // L
  const WordSpace* word_space = nullptr;         // D
  const Tagger* tagger = nullptr;                // D
  StsScorer* sts = nullptr;                      // U
};

// Concatenates the requested families in the fixed order N, L, R, D, U:
// 3 n-gram counts, one feature per retained lexicon category, 6 ROUGE
// variants, 3 POS cosines, 1 external similarity score.
FeatureVector featurize(const std::string& a, const std::string& b,
                        const std::set<char>& families,
                        const FeatureResources& resources);

}  // namespace afs

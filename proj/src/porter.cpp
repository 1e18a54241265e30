#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "afs/errors.hpp"
#include "afs/textproc.hpp"

// Classic Porter suffix stripper (steps 1a-5b). Within a step the longest
// matching suffix is selected first; if its measure condition fails, no
// other rule in that step fires.

namespace afs {
namespace {

bool is_cons(const std::string& w, std::size_t i) {
  switch (w[i]) {
    case 'a':
    case 'e':
    case 'i':
    case 'o':
    case 'u':
      return false;
    case 'y':
      return i == 0 ? true : !is_cons(w, i - 1);
    default:
      return true;
  }
}

// Number of vowel-consonant sequences in w[0..len).
int measure(const std::string& w, std::size_t len) {
  std::size_t i = 0;
  int m = 0;
  while (i < len && is_cons(w, i)) ++i;
  while (i < len) {
    while (i < len && !is_cons(w, i)) ++i;
    if (i >= len) break;
    ++m;
    while (i < len && is_cons(w, i)) ++i;
  }
  return m;
}

bool contains_vowel(const std::string& w, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) {
    if (!is_cons(w, i)) return true;
  }
  return false;
}

bool ends_double_cons(const std::string& w, std::size_t len) {
  return len >= 2 && w[len - 1] == w[len - 2] && is_cons(w, len - 1);
}

// *o: stem ends consonant-vowel-consonant where the final consonant is
// not w, x, or y.
bool ends_cvc(const std::string& w, std::size_t len) {
  if (len < 3) return false;
  if (!is_cons(w, len - 3) || is_cons(w, len - 2) || !is_cons(w, len - 1)) {
    return false;
  }
  char last = w[len - 1];
  return last != 'w' && last != 'x' && last != 'y';
}

bool ends_with(const std::string& w, std::string_view suffix) {
  return w.size() >= suffix.size() &&
         w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void replace_suffix(std::string& w, std::size_t suffix_len, std::string_view repl) {
  w.resize(w.size() - suffix_len);
  w.append(repl);
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Longest matching suffix, condition m(stem) > min_measure.
void apply_rules(std::string& w, const Rule* rules, std::size_t n_rules,
                 int min_measure) {
  const Rule* best = nullptr;
  for (std::size_t i = 0; i < n_rules; ++i) {
    const Rule& r = rules[i];
    if ((best == nullptr || r.suffix.size() > best->suffix.size()) &&
        ends_with(w, r.suffix)) {
      best = &r;
    }
  }
  if (best == nullptr) return;
  std::size_t stem_len = w.size() - best->suffix.size();
  if (measure(w, stem_len) > min_measure) {
    replace_suffix(w, best->suffix.size(), best->replacement);
  }
}

void step1a(std::string& w) {
  if (ends_with(w, "sses")) {
    replace_suffix(w, 4, "ss");
  } else if (ends_with(w, "ies")) {
    replace_suffix(w, 3, "i");
  } else if (ends_with(w, "ss")) {
    // keep
  } else if (ends_with(w, "s")) {
    w.pop_back();
  }
}

void step1b(std::string& w) {
  if (ends_with(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) {
      w.pop_back();  // eed -> ee
    }
    return;
  }
  bool stripped = false;
  if (ends_with(w, "ed") && contains_vowel(w, w.size() - 2)) {
    w.resize(w.size() - 2);
    stripped = true;
  } else if (ends_with(w, "ing") && contains_vowel(w, w.size() - 3)) {
    w.resize(w.size() - 3);
    stripped = true;
  }
  if (!stripped) return;

  if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
    w.push_back('e');
  } else if (ends_double_cons(w, w.size())) {
    char last = w.back();
    if (last != 'l' && last != 's' && last != 'z') {
      w.pop_back();
    }
  } else if (measure(w, w.size()) == 1 && ends_cvc(w, w.size())) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (ends_with(w, "y") && contains_vowel(w, w.size() - 1)) {
    w.back() = 'i';
  }
}

void step2(std::string& w) {
  static const std::array<Rule, 20> rules = {{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
      {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
      {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
      {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
      {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
      {"iviti", "ive"},   {"biliti", "ble"},
  }};
  apply_rules(w, rules.data(), rules.size(), 0);
}

void step3(std::string& w) {
  static const std::array<Rule, 7> rules = {{
      {"icate", "ic"},
      {"ative", ""},
      {"alize", "al"},
      {"iciti", "ic"},
      {"ical", "ic"},
      {"ful", ""},
      {"ness", ""},
  }};
  apply_rules(w, rules.data(), rules.size(), 0);
}

void step4(std::string& w) {
  static const std::array<std::string_view, 19> suffixes = {
      "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
      "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
  };
  std::string_view best;
  for (std::string_view s : suffixes) {
    if (s.size() > best.size() && ends_with(w, s)) {
      best = s;
    }
  }
  if (best.empty()) return;
  std::size_t stem_len = w.size() - best.size();
  if (measure(w, stem_len) <= 1) return;
  if (best == "ion") {
    char before = stem_len > 0 ? w[stem_len - 1] : '\0';
    if (before != 's' && before != 't') return;
  }
  w.resize(stem_len);
}

void step5a(std::string& w) {
  if (!ends_with(w, "e")) return;
  std::size_t stem_len = w.size() - 1;
  int m = measure(w, stem_len);
  if (m > 1 || (m == 1 && !ends_cvc(w, stem_len))) {
    w.pop_back();
  }
}

void step5b(std::string& w) {
  if (w.back() == 'l' && ends_double_cons(w, w.size()) &&
      measure(w, w.size() - 1) > 1) {
    w.pop_back();
  }
}

}  // namespace

std::string porter_stem(const std::string& word) {
  if (word.empty()) {
    throw DataError("porter_stem: empty input");
  }
  if (word.size() <= 2) {
    return word;
  }
  for (char c : word) {
    if (c < 'a' || c > 'z') return word;
  }
  std::string w = word;
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

}  // namespace afs

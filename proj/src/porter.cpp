// Porter suffix-stripping stemmer, original 1980 rule set.

#include <string>
#include <string_view>

#include "canon/preprocess.hpp"

namespace canon {

namespace {

class Word {
 public:
  explicit Word(std::string_view w) : s_(w) {}

  const std::string& str() const { return s_; }
  std::size_t size() const { return s_.size(); }

  bool consonant(std::size_t i) const { return consonant_in(s_, i); }

  static bool consonant_in(std::string_view w, std::size_t i) {
    switch (w[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !consonant_in(w, i - 1);
      default:
        return true;
    }
  }

  /// m in [C](VC){m}[V] for the prefix of length len.
  static int measure(std::string_view w) {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const bool c = consonant_in(w, i);
      if (c && prev_vowel) ++m;
      prev_vowel = !c;
    }
    return m;
  }

  static bool has_vowel(std::string_view w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!consonant_in(w, i)) return true;
    }
    return false;
  }

  static bool ends_double_consonant(std::string_view w) {
    const auto n = w.size();
    return n >= 2 && w[n - 1] == w[n - 2] && consonant_in(w, n - 1);
  }

  // *o: stem ends consonant-vowel-consonant, last not w, x or y.
  static bool ends_cvc(std::string_view w) {
    const auto n = w.size();
    if (n < 3) return false;
    if (!consonant_in(w, n - 3) || consonant_in(w, n - 2) || !consonant_in(w, n - 1)) return false;
    const char last = w[n - 1];
    return last != 'w' && last != 'x' && last != 'y';
  }

  bool ends_with(std::string_view suffix) const { return std::string_view(s_).ends_with(suffix); }
  std::string_view stem_without(std::string_view suffix) const {
    return std::string_view(s_).substr(0, s_.size() - suffix.size());
  }
  void replace_suffix(std::string_view suffix, std::string_view repl) {
    s_.resize(s_.size() - suffix.size());
    s_.append(repl);
  }

 private:
  std::string s_;
};

enum class Cond { None, MGt0, MGt1 };

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
  Cond cond;
};

// First rule whose suffix matches decides; if its condition fails, no other
// rule in the list is tried.
template <std::size_t N>
void apply_rules(Word& w, const Rule (&rules)[N]) {
  for (const auto& r : rules) {
    if (!w.ends_with(r.suffix)) continue;
    const auto stem = w.stem_without(r.suffix);
    bool ok = true;
    if (r.cond == Cond::MGt0) ok = Word::measure(stem) > 0;
    if (r.cond == Cond::MGt1) ok = Word::measure(stem) > 1;
    if (ok) w.replace_suffix(r.suffix, r.replacement);
    return;
  }
}

void step1a(Word& w) {
  static constexpr Rule rules[] = {
      {"sses", "ss", Cond::None}, {"ies", "i", Cond::None}, {"ss", "ss", Cond::None}, {"s", "", Cond::None}};
  apply_rules(w, rules);
}

void step1b(Word& w) {
  if (w.ends_with("eed")) {
    if (Word::measure(w.stem_without("eed")) > 0) w.replace_suffix("eed", "ee");
    return;
  }
  std::string_view removed;
  for (std::string_view suffix : {std::string_view("ed"), std::string_view("ing")}) {
    if (w.ends_with(suffix) && Word::has_vowel(w.stem_without(suffix))) {
      removed = suffix;
      break;
    }
  }
  if (removed.empty()) return;
  w.replace_suffix(removed, "");

  if (w.ends_with("at")) {
    w.replace_suffix("at", "ate");
  } else if (w.ends_with("bl")) {
    w.replace_suffix("bl", "ble");
  } else if (w.ends_with("iz")) {
    w.replace_suffix("iz", "ize");
  } else if (Word::ends_double_consonant(w.str())) {
    const char last = w.str().back();
    if (last != 'l' && last != 's' && last != 'z') w.replace_suffix(std::string_view(&last, 1), "");
  } else if (Word::measure(w.str()) == 1 && Word::ends_cvc(w.str())) {
    w.replace_suffix("", "e");
  }
}

void step1c(Word& w) {
  if (w.ends_with("y") && Word::has_vowel(w.stem_without("y"))) w.replace_suffix("y", "i");
}

void step2(Word& w) {
  static constexpr Rule rules[] = {
      {"ational", "ate", Cond::MGt0}, {"tional", "tion", Cond::MGt0}, {"enci", "ence", Cond::MGt0},
      {"anci", "ance", Cond::MGt0},   {"izer", "ize", Cond::MGt0},    {"abli", "able", Cond::MGt0},
      {"alli", "al", Cond::MGt0},     {"entli", "ent", Cond::MGt0},   {"eli", "e", Cond::MGt0},
      {"ousli", "ous", Cond::MGt0},   {"ization", "ize", Cond::MGt0}, {"ation", "ate", Cond::MGt0},
      {"ator", "ate", Cond::MGt0},    {"alism", "al", Cond::MGt0},    {"iveness", "ive", Cond::MGt0},
      {"fulness", "ful", Cond::MGt0}, {"ousness", "ous", Cond::MGt0}, {"aliti", "al", Cond::MGt0},
      {"iviti", "ive", Cond::MGt0},   {"biliti", "ble", Cond::MGt0},
  };
  apply_rules(w, rules);
}

void step3(Word& w) {
  static constexpr Rule rules[] = {
      {"icate", "ic", Cond::MGt0}, {"ative", "", Cond::MGt0}, {"alize", "al", Cond::MGt0},
      {"iciti", "ic", Cond::MGt0}, {"ical", "ic", Cond::MGt0}, {"ful", "", Cond::MGt0},
      {"ness", "", Cond::MGt0},
  };
  apply_rules(w, rules);
}

void step4(Word& w) {
  static constexpr std::string_view suffixes[] = {"al",  "ance", "ence", "er",  "ic",  "able", "ible",
                                                  "ant", "ement", "ment", "ent", "ion", "ou",   "ism",
                                                  "ate", "iti",  "ous",  "ive", "ize"};
  for (auto suffix : suffixes) {
    if (!w.ends_with(suffix)) continue;
    const auto stem = w.stem_without(suffix);
    bool ok = Word::measure(stem) > 1;
    if (suffix == "ion") ok = ok && !stem.empty() && (stem.back() == 's' || stem.back() == 't');
    if (ok) w.replace_suffix(suffix, "");
    return;
  }
}

void step5a(Word& w) {
  if (!w.ends_with("e")) return;
  const auto stem = w.stem_without("e");
  const int m = Word::measure(stem);
  if (m > 1 || (m == 1 && !Word::ends_cvc(stem))) w.replace_suffix("e", "");
}

void step5b(Word& w) {
  if (w.ends_with("ll") && Word::measure(w.stem_without("l")) > 1) w.replace_suffix("l", "");
}

}  // namespace

std::string stem(std::string_view token) {
  if (token.empty()) return {};
  Word w(token);
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5a(w);
  step5b(w);
  return w.str();
}

}  // namespace canon

#pragma once

// Porter suffix-stripping stemmer, original 1980 rule set.
//
// Input is expected to be lowercase ASCII; other bytes are treated as
// consonants. No length guard is applied, so two-letter words are stemmed
// too ("is" -> "i"), as in the published algorithm.

#include <string>
#include <string_view>
#include <cstddef>
#include <initializer_list>

namespace pulse {

namespace detail {

class PorterWord {
 public:
  explicit PorterWord(std::string w) : w_(std::move(w)) {}

  std::string take() && { return std::move(w_); }
  const std::string& str() const { return w_; }

  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 ? true : !consonant(i - 1);
      default: return true;
    }
  }

  // m() over the first `len` characters: number of VC sequences.
  int measure(std::size_t len) const {
    int m = 0;
    bool prev_vowel = false;
    for (std::size_t i = 0; i < len; ++i) {
      bool c = consonant(i);
      if (c && prev_vowel) ++m;
      prev_vowel = !c;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // *o: stem ends consonant-vowel-consonant, last not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 3) || consonant(len - 2) || !consonant(len - 1)) return false;
    char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return w_.size() >= s.size() && std::string_view(w_).substr(w_.size() - s.size()) == s;
  }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void chop(std::size_t n) { w_.resize(w_.size() - n); }

  void replace(std::string_view suffix, std::string_view with) {
    w_.resize(w_.size() - suffix.size());
    w_.append(with);
  }

 private:
  std::string w_;
};

struct SuffixRule {
  std::string_view suffix;
  std::string_view replacement;
};

// Applies the first rule whose suffix matches, if the stem's measure exceeds
// `min_measure`. A matching suffix whose condition fails ends the step.
inline void apply_measured(PorterWord& w, std::initializer_list<SuffixRule> rules, int min_measure) {
  for (const auto& r : rules) {
    if (!w.ends(r.suffix)) continue;
    if (w.measure(w.stem_len(r.suffix)) > min_measure) w.replace(r.suffix, r.replacement);
    return;
  }
}

inline void step1a(PorterWord& w) {
  if (w.ends("sses")) w.replace("sses", "ss");
  else if (w.ends("ies")) w.replace("ies", "i");
  else if (w.ends("ss")) return;
  else if (w.ends("s")) w.replace("s", "");
}

inline void step1b(PorterWord& w) {
  if (w.ends("eed")) {
    if (w.measure(w.stem_len("eed")) > 0) w.replace("eed", "ee");
    return;
  }
  std::string_view removed;
  if (w.ends("ed") && w.has_vowel(w.stem_len("ed"))) removed = "ed";
  else if (w.ends("ing") && w.has_vowel(w.stem_len("ing"))) removed = "ing";
  if (removed.empty()) return;
  w.replace(removed, "");

  if (w.ends("at")) w.replace("at", "ate");
  else if (w.ends("bl")) w.replace("bl", "ble");
  else if (w.ends("iz")) w.replace("iz", "ize");
  else if (w.double_consonant(w.str().size())) {
    char last = w.str().back();
    if (last != 'l' && last != 's' && last != 'z') w.chop(1);
  } else if (w.measure(w.str().size()) == 1 && w.cvc(w.str().size())) {
    w.replace("", "e");
  }
}

inline void step1c(PorterWord& w) {
  if (w.ends("y") && w.has_vowel(w.stem_len("y"))) w.replace("y", "i");
}

inline void step2(PorterWord& w) {
  apply_measured(w,
                 {{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
                  {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
                  {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                  {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
                  {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}},
                 0);
}

inline void step3(PorterWord& w) {
  apply_measured(w,
                 {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                  {"ical", "ic"}, {"ful", ""}, {"ness", ""}},
                 0);
}

inline void step4(PorterWord& w) {
  static constexpr std::string_view kSuffixes[] = {
      "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
      "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize"};
  for (auto s : kSuffixes) {
    if (!w.ends(s)) continue;
    std::size_t len = w.stem_len(s);
    bool ok = w.measure(len) > 1;
    if (s == "ion") ok = ok && len > 0 && (w.str()[len - 1] == 's' || w.str()[len - 1] == 't');
    if (ok) w.replace(s, "");
    return;
  }
}

inline void step5(PorterWord& w) {
  if (w.ends("e")) {
    std::size_t len = w.stem_len("e");
    int m = w.measure(len);
    if (m > 1 || (m == 1 && !w.cvc(len))) w.replace("e", "");
  }
  std::size_t n = w.str().size();
  if (w.ends("ll") && w.measure(n - 1) > 1) w.chop(1);
}

}  // namespace detail

/// Stems one lowercase word.
inline std::string porter_stem(std::string_view word) {
  if (word.empty()) return {};
  detail::PorterWord w{std::string(word)};
  detail::step1a(w);
  detail::step1b(w);
  detail::step1c(w);
  detail::step2(w);
  detail::step3(w);
  detail::step4(w);
  detail::step5(w);
  return std::move(w).take();
}

}  // namespace pulse

#pragma once

// Bundled word lists used by the tokenizer. Versioned with the library;
// changing any list changes classification results, so bump
// kTextResourcesVersion when editing.

#include <iterator>
#include <string_view>
#include <unordered_set>

namespace pulse::text {

inline constexpr int kTextResourcesVersion = 1;

// English stop words, removed after tokenization.
inline constexpr std::string_view kStopWords[] = {
    "a",       "about",   "above",  "after",   "again",   "against", "all",    "am",
    "an",      "and",     "any",    "are",     "as",      "at",      "be",     "because",
    "been",    "before",  "being",  "below",   "between", "both",    "but",    "by",
    "can",     "could",   "did",    "do",      "does",    "doing",   "down",   "during",
    "each",    "few",     "for",    "from",    "further", "had",     "has",    "have",
    "having",  "he",      "her",    "here",    "hers",    "herself", "him",    "himself",
    "his",     "how",     "i",      "if",      "in",      "into",    "is",     "it",
    "its",     "itself",  "just",   "me",      "more",    "most",    "my",     "myself",
    "no",      "nor",     "not",    "now",     "of",      "off",     "on",     "once",
    "only",    "or",      "other",  "our",     "ours",    "ourselves", "out",  "over",
    "own",     "same",    "she",    "should",  "so",      "some",    "such",   "than",
    "that",    "the",     "their",  "theirs",  "them",    "themselves", "then", "there",
    "these",   "they",    "this",   "those",   "through", "to",      "too",    "under",
    "until",   "up",      "very",   "was",     "we",      "were",    "what",   "when",
    "where",   "which",   "while",  "who",     "whom",    "why",     "will",   "with",
    "would",   "you",     "your",   "yours",   "yourself", "yourselves", "s",   "t",
    "don",     "ll",      "re",     "ve",      "m",       "d",       "im"};

// Frequent English words (pre-stemming, lowercase). One hit marks a message
// as English-looking.
inline constexpr std::string_view kCommonEnglish[] = {
    "the",    "be",     "to",     "of",     "and",    "a",      "in",     "that",   "have",
    "i",      "it",     "for",    "not",    "on",     "with",   "he",     "as",     "you",
    "do",     "at",     "this",   "but",    "his",    "by",     "from",   "they",   "we",
    "say",    "her",    "she",    "or",     "an",     "will",   "my",     "one",    "all",
    "would",  "there",  "their",  "what",   "so",     "up",     "out",    "if",     "about",
    "who",    "get",    "which",  "go",     "me",     "when",   "make",   "can",    "like",
    "time",   "no",     "just",   "him",    "know",   "take",   "people", "into",   "year",
    "your",   "good",   "some",   "could",  "them",   "see",    "other",  "than",   "then",
    "now",    "look",   "only",   "come",   "its",    "over",   "think",  "also",   "back",
    "after",  "use",    "two",    "how",    "our",    "work",   "first",  "well",   "way",
    "even",   "new",    "want",   "because", "any",   "these",  "give",   "day",    "most",
    "us",     "is",     "was",    "are",    "been",   "has",    "had",    "were",   "did",
    "got",    "am",     "going",  "great",  "really", "right",  "still",  "too",    "much",
    "why",    "where",  "here",   "very",   "more",   "many",   "let",    "big",    "man",
    "guys",   "guy",    "today",  "tonight", "watch", "watching", "omg",  "lol",    "yes",
    "wow",    "best",   "never",  "ever",   "again",  "off",    "down",   "love",   "hate",
    "need",   "feel",   "thing",  "life",   "home",   "last",   "next",   "long",   "little",
    "old",    "should", "those",  "made",   "said",   "does",   "nice",   "bad",    "better",
    "worst",  "happy",  "sure",   "always", "every",  "another", "week",  "night",  "down",
    "call",   "while",  "before", "around", "again",  "team",   "win",    "won",    "lose",
    "lost",   "beat",   "fans",   "amazing", "awesome", "crazy", "dinner", "work",  "school",
    "finally", "yeah",  "haha",   "damn",   "gonna",  "wanna",  "cant",   "dont",   "im"};

// Function words of languages that commonly borrow football terms. A message
// with more of these than English hits is treated as foreign.
inline constexpr std::string_view kForeignFunctionWords[] = {
    "que",    "los",    "las",    "del",    "por",    "para",   "una",    "muy",   "pero",
    "esta",   "ahora",  "hoy",    "jugada", "partido", "vamos", "gran",   "nao",   "vai",
    "uma",    "isso",   "muito",  "mais",   "jogo",   "les",    "des",    "une",   "pas",
    "pour",   "avec",   "sur",    "dans",   "tres",   "quel",   "der",    "und",   "ist",
    "nicht",  "ein",    "eine",   "mit",    "auf",    "noch",   "spiel",  "heute", "sehr",
    "ich",    "che",    "della",  "molto",  "questo", "partita", "el"};

// Emoticons removed before punctuation stripping. Entries containing letters
// are only removed when they stand alone as a whitespace-delimited chunk.
inline constexpr std::string_view kEmoticons[] = {
    ":-)", ":)",  ":-(", ":(",  ";-)", ";)",  ":-D", ":D",  ":-P", ":P",  ":-p", ":p",
    ":'(", ":-/", ":/",  ":-|", ":|",  ":-o", ":o",  ":-O", ":O",  "=)",  "=(",  "<3",
    "</3", "^_^", "-_-", "T_T", "xD",  "XD",  ":*",  ":-*", "8-)", "o_O"};

using WordSet = std::unordered_set<std::string_view>;

inline bool is_stop_word(std::string_view w) {
  static const WordSet set(std::begin(kStopWords), std::end(kStopWords));
  return set.count(w) > 0;
}
inline bool is_common_english(std::string_view w) {
  static const WordSet set(std::begin(kCommonEnglish), std::end(kCommonEnglish));
  return set.count(w) > 0;
}
inline bool is_foreign_function_word(std::string_view w) {
  static const WordSet set(std::begin(kForeignFunctionWords), std::end(kForeignFunctionWords));
  return set.count(w) > 0;
}

}  // namespace pulse::text

#pragma once

// Tweet text normalization and lexicon-based classification.
//
// A message is reduced to a list of normalized tokens: URLs, @-mentions,
// emoticons and punctuation are removed, words are lowercased, runs of three
// or more repeated letters are collapsed to two, stop words are dropped and
// each survivor is reduced to its Porter stem (iterated to a fixed point so
// that normalizing normalized text is the identity). When lexicons are
// supplied, tokens of five or more characters within one edit of a lexicon
// token are snapped onto it.
//
// Lexicon JSON (one object per game; a file holds one object per line or a
// single array):
//
//   {"game_id": "SB45",
//    "teams": [["packers", "gb"], ["steelers", "pitt"]],
//    "game_terms": ["game", "football", "quarterback"],
//    "event_keywords": {"touchdown": ["touchdown", "td"],
//                       "interception": ["interception"],
//                       "field_goal": ["field goal", "fg"],
//                       "fumble": ["fumble"]}}
//
// Terms are normalized on load; team names and game terms must normalize to a
// single token, event keywords to one or two tokens.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/error.hpp"
#include "pulse/event_type.hpp"
#include "pulse/porter_stemmer.hpp"
#include "pulse/text_resources.hpp"

namespace pulse {

enum class DeviceClass : std::uint8_t { Mobile, NonMobile, Unknown };

constexpr std::string_view to_string(DeviceClass d) noexcept {
  switch (d) {
    case DeviceClass::Mobile: return "mobile";
    case DeviceClass::NonMobile: return "non_mobile";
    case DeviceClass::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<DeviceClass> parse_device_class(std::string_view s) {
  if (s == "mobile") return DeviceClass::Mobile;
  if (s == "non_mobile") return DeviceClass::NonMobile;
  if (s == "unknown") return DeviceClass::Unknown;
  return std::nullopt;
}

struct TokenizedTweet {
  std::vector<std::string> tokens;
  bool is_english = false;
  DeviceClass device = DeviceClass::Unknown;
};

/// A keyword is one token or an adjacent pair of tokens ("field goal").
using Keyword = std::vector<std::string>;

namespace detail {

inline bool is_ascii_alnum(unsigned char c) { return c < 0x80 && std::isalnum(c) != 0; }
inline bool is_ascii_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Shortens alphabetic runs of 3+ letters to `keep` letters; shorter runs stay.
inline std::string collapse_repeats(std::string_view w, std::size_t keep = 2) {
  std::string out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    std::size_t run = j - i;
    if (run >= 3 && std::isalpha(static_cast<unsigned char>(w[i]))) run = keep;
    out.append(run, w[i]);
    i = j;
  }
  return out;
}

inline bool has_stretch(std::string_view w) { return collapse_repeats(w).size() < w.size(); }

// Stem until stable. Porter is not idempotent on every word.
inline std::string stem_fixpoint(std::string w) {
  for (int i = 0; i < 8; ++i) {
    std::string next = porter_stem(w);
    if (next == w) break;
    w = std::move(next);
  }
  return w;
}

// Removes @mentions, URLs and emoticons from one whitespace-delimited chunk.
inline std::string scrub_chunk(std::string_view chunk) {
  for (auto e : text::kEmoticons)
    if (chunk == e) return {};

  std::string s(chunk);
  for (std::string_view scheme : {"http://", "https://", "www."}) {
    auto pos = s.find(scheme);
    if (pos != std::string::npos) s.resize(pos);
  }
  for (auto pos = s.find('@'); pos != std::string::npos; pos = s.find('@', pos)) {
    auto end = pos + 1;
    while (end < s.size() && (is_ascii_alnum(s[end]) || s[end] == '_')) ++end;
    s.erase(pos, end - pos);
  }
  for (auto e : text::kEmoticons) {
    bool has_letter = std::any_of(e.begin(), e.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
    if (has_letter) continue;
    for (auto pos = s.find(e); pos != std::string::npos; pos = s.find(e, pos)) s.replace(pos, e.size(), " ");
  }
  return s;
}

// Fraction of non-whitespace code points that are ASCII.
inline double ascii_ratio(std::string_view raw) {
  std::size_t total = 0, ascii = 0;
  for (unsigned char c : raw) {
    if ((c & 0xC0) == 0x80) continue;  // continuation byte
    if (is_ascii_space(c)) continue;
    ++total;
    if (c < 0x80) ++ascii;
  }
  return total == 0 ? 0.0 : static_cast<double>(ascii) / static_cast<double>(total);
}

// Lowercased alphanumeric words in order, before stop-word removal.
inline std::vector<std::string> raw_words(std::string_view raw) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_ascii_space(raw[i])) ++i;
    std::size_t start = i;
    while (i < raw.size() && !is_ascii_space(raw[i])) ++i;
    if (start == i) continue;
    std::string chunk = scrub_chunk(raw.substr(start, i - start));
    std::string cur;
    for (unsigned char c : chunk) {
      if (is_ascii_alnum(c)) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else if (!cur.empty()) {
        words.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
  }
  return words;
}

inline bool within_one_edit(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (b.size() - a.size() > 1) return false;
  auto [ia, ib] = std::mismatch(a.begin(), a.end(), b.begin());
  if (ia == a.end()) return true;
  if (a.size() == b.size()) ++ia;
  return std::equal(ia, a.end(), ib + 1, b.end());
}

// Normalizes one lowercase word. Empty result means the word is dropped.
inline std::string normalize_word_uncached(std::string_view word) {
  std::string w = collapse_repeats(word);
  if (w.empty() || text::is_stop_word(w)) return {};
  w = stem_fixpoint(std::move(w));
  if (w.empty() || text::is_stop_word(w)) return {};
  return w;
}

// Message vocabulary repeats heavily and stemming dominates preprocessing.
inline std::string normalize_word(std::string_view word) {
  thread_local std::unordered_map<std::string, std::string> memo;
  if (auto it = memo.find(std::string(word)); it != memo.end()) return it->second;
  if (memo.size() >= (1u << 16)) memo.clear();
  return memo.emplace(std::string(word), normalize_word_uncached(word)).first->second;
}

}  // namespace detail

/// Normalizes a lexicon term to its token sequence (no misspelling snap).
inline std::vector<std::string> normalize_term(std::string_view term) {
  std::vector<std::string> out;
  for (auto& w : detail::raw_words(term)) {
    auto n = detail::normalize_word(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

class GameLexicon {
 public:
  /// Normalizes and validates raw terms. Throws ConfigError.
  static GameLexicon build(std::string game_id, const std::array<std::vector<std::string>, 2>& teams,
                           const std::vector<std::string>& game_terms,
                           const std::map<EventType, std::vector<std::string>>& event_keywords) {
    if (game_id.empty()) throw ConfigError("lexicon: empty game_id");
    GameLexicon lex;
    lex.game_id_ = std::move(game_id);
    auto single = [&](const std::string& raw, const char* what) {
      auto toks = normalize_term(raw);
      if (toks.size() != 1)
        throw ConfigError("lexicon " + lex.game_id_ + ": " + what + " '" + raw +
                          "' must normalize to exactly one token");
      return toks.front();
    };
    for (std::size_t t = 0; t < 2; ++t) {
      if (teams[t].empty()) throw ConfigError("lexicon " + lex.game_id_ + ": team without names");
      for (auto& name : teams[t]) lex.teams_[t].insert(single(name, "team name"));
    }
    for (auto& name : lex.teams_[0])
      if (lex.teams_[1].count(name))
        throw ConfigError("lexicon " + lex.game_id_ + ": team name '" + name + "' used by both teams");
    for (auto& term : game_terms) lex.game_terms_.insert(single(term, "game term"));
    for (auto type : kEventTypes) {
      auto it = event_keywords.find(type);
      if (it == event_keywords.end() || it->second.empty())
        throw ConfigError("lexicon " + lex.game_id_ + ": no keywords for " + std::string(to_string(type)));
      auto& dest = lex.keywords_[index_of(type)];
      for (auto& raw : it->second) {
        auto toks = normalize_term(raw);
        if (toks.empty() || toks.size() > 2)
          throw ConfigError("lexicon " + lex.game_id_ + ": event keyword '" + raw +
                            "' must normalize to one or two tokens");
        if (std::find(dest.begin(), dest.end(), toks) == dest.end()) dest.push_back(std::move(toks));
      }
    }
    lex.index();
    return lex;
  }

  const std::string& game_id() const noexcept { return game_id_; }
  const std::set<std::string>& team_names(std::size_t team) const { return teams_.at(team); }
  const std::set<std::string>& game_terms() const noexcept { return game_terms_; }
  const std::vector<Keyword>& keywords(EventType t) const { return keywords_[index_of(t)]; }

  /// Single tokens that mark a message as game related.
  const std::set<std::string>& vocabulary() const noexcept { return vocabulary_; }
  /// Every token appearing in any term, including parts of bigram keywords.
  const std::set<std::string>& spelling_targets() const noexcept { return spelling_targets_; }

  bool is_team_name(std::string_view tok) const {
    return teams_[0].count(std::string(tok)) || teams_[1].count(std::string(tok));
  }

  /// Event type of a single-token keyword, if any.
  std::optional<EventType> unigram_event(const std::string& tok) const {
    auto it = unigram_events_.find(tok);
    if (it == unigram_events_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<EventType> bigram_event(const std::string& a, const std::string& b) const {
    auto it = bigram_events_.find({a, b});
    if (it == bigram_events_.end()) return std::nullopt;
    return it->second;
  }

  /// Serializes normalized terms. Loading the output yields an equal lexicon.
  nlohmann::json to_json() const {
    nlohmann::json j;
    j["game_id"] = game_id_;
    j["teams"] = nlohmann::json::array(
        {std::vector<std::string>(teams_[0].begin(), teams_[0].end()),
         std::vector<std::string>(teams_[1].begin(), teams_[1].end())});
    j["game_terms"] = std::vector<std::string>(game_terms_.begin(), game_terms_.end());
    auto& ek = j["event_keywords"] = nlohmann::json::object();
    for (auto t : kEventTypes) {
      auto& arr = ek[std::string(to_string(t))] = nlohmann::json::array();
      for (auto& kw : keywords(t)) {
        std::string joined = kw[0];
        if (kw.size() == 2) joined += " " + kw[1];
        arr.push_back(joined);
      }
    }
    return j;
  }

  static GameLexicon from_json(const nlohmann::json& j) {
    try {
      std::array<std::vector<std::string>, 2> teams;
      const auto& jt = j.at("teams");
      if (!jt.is_array() || jt.size() != 2) throw ConfigError("lexicon: 'teams' must hold two arrays");
      teams[0] = jt[0].get<std::vector<std::string>>();
      teams[1] = jt[1].get<std::vector<std::string>>();
      std::map<EventType, std::vector<std::string>> kws;
      for (auto& [key, val] : j.at("event_keywords").items()) {
        auto type = parse_event_type(key);
        if (!type) throw ConfigError("lexicon: unknown event type '" + key + "'");
        kws[*type] = val.get<std::vector<std::string>>();
      }
      return build(j.at("game_id").get<std::string>(), teams,
                   j.value("game_terms", std::vector<std::string>{}), kws);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("lexicon: ") + e.what());
    }
  }

  friend bool operator==(const GameLexicon& a, const GameLexicon& b) {
    return a.game_id_ == b.game_id_ && a.teams_ == b.teams_ && a.game_terms_ == b.game_terms_ &&
           a.keywords_ == b.keywords_;
  }

 private:
  void index() {
    for (auto& team : teams_) vocabulary_.insert(team.begin(), team.end());
    vocabulary_.insert(game_terms_.begin(), game_terms_.end());
    spelling_targets_ = vocabulary_;
    for (auto type : kEventTypes) {
      for (auto& kw : keywords(type)) {
        spelling_targets_.insert(kw.begin(), kw.end());
        if (kw.size() == 1) {
          vocabulary_.insert(kw[0]);
          unigram_events_.emplace(kw[0], type);  // first type wins on overlap
        } else {
          bigram_events_.emplace(std::make_pair(kw[0], kw[1]), type);
        }
      }
    }
  }

  std::string game_id_;
  std::array<std::set<std::string>, 2> teams_;
  std::set<std::string> game_terms_;
  std::array<std::vector<Keyword>, kEventTypeCount> keywords_;

  std::set<std::string> vocabulary_;
  std::set<std::string> spelling_targets_;
  std::map<std::string, EventType> unigram_events_;
  std::map<std::pair<std::string, std::string>, EventType> bigram_events_;
};

namespace detail {

inline bool has_keyword_hit(const std::vector<std::string>& tokens, const GameLexicon& lex) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (lex.vocabulary().count(tokens[i])) return true;
    if (i + 1 < tokens.size() && lex.bigram_event(tokens[i], tokens[i + 1])) return true;
  }
  return false;
}

inline bool is_spelling_target(const std::string& tok, std::span<const GameLexicon> games) {
  return std::any_of(games.begin(), games.end(), [&](const GameLexicon& g) { return g.spelling_targets().count(tok); });
}

inline std::string snap_spelling(std::string tok, std::span<const GameLexicon> games) {
  if (tok.size() < 5 || is_spelling_target(tok, games)) return tok;
  const std::string* best = nullptr;
  for (auto& g : games)
    for (auto& target : g.spelling_targets())
      if (target.size() >= 4 && within_one_edit(tok, target) && (!best || target < *best)) best = &target;
  return best ? *best : tok;
}

}  // namespace detail

/// Tokenizes and normalizes one message. With `games` non-empty, misspelled
/// lexicon terms are corrected and a lexicon hit counts as English evidence.
inline TokenizedTweet preprocess(std::string_view raw, std::span<const GameLexicon> games = {},
                                 DeviceClass device = DeviceClass::Unknown) {
  TokenizedTweet out;
  out.device = device;
  std::size_t english_hits = 0, foreign_hits = 0;
  for (auto& w : detail::raw_words(raw)) {
    if (text::is_common_english(w)) ++english_hits;
    if (text::is_foreign_function_word(w)) ++foreign_hits;
    auto n = detail::normalize_word(w);
    if (n.empty()) continue;
    if (!games.empty()) {
      n = detail::snap_spelling(std::move(n), games);
      // "Bearssss" may mean one letter, not two.
      if (detail::has_stretch(w) && !detail::is_spelling_target(n, games)) {
        auto single = detail::normalize_word(detail::collapse_repeats(w, 1));
        if (!single.empty() && detail::is_spelling_target(single, games)) n = std::move(single);
      }
    }
    out.tokens.push_back(std::move(n));
  }
  bool keyword_hit = std::any_of(games.begin(), games.end(),
                                 [&](const GameLexicon& g) { return detail::has_keyword_hit(out.tokens, g); });
  out.is_english = detail::ascii_ratio(raw) >= 0.9 && (english_hits > 0 || keyword_hit) &&
                   foreign_hits <= english_hits;
  return out;
}

inline TokenizedTweet preprocess(std::string_view raw, const GameLexicon& game,
                                 DeviceClass device = DeviceClass::Unknown) {
  return preprocess(raw, std::span<const GameLexicon>(&game, 1), device);
}

inline bool is_game_related(const TokenizedTweet& t, const GameLexicon& lex) {
  return t.is_english && detail::has_keyword_hit(t.tokens, lex);
}

/// Throws ConfigError if two games share a team-name token.
inline void check_concurrent_games(std::span<const GameLexicon> games) {
  std::map<std::string, const std::string*> owner;
  std::set<std::string> ids;
  for (auto& g : games) {
    if (!ids.insert(g.game_id()).second) throw ConfigError("duplicate game_id '" + g.game_id() + "'");
    for (std::size_t t = 0; t < 2; ++t)
      for (auto& name : g.team_names(t)) {
        auto [it, fresh] = owner.emplace(name, &g.game_id());
        if (!fresh)
          throw ConfigError("team name '" + name + "' shared by games " + *it->second + " and " + g.game_id());
      }
  }
}

/// Games whose team names appear in the message.
inline std::set<std::string> attribute_games(const TokenizedTweet& t, std::span<const GameLexicon> games) {
  check_concurrent_games(games);
  std::set<std::string> ids;
  for (auto& g : games)
    for (auto& tok : t.tokens)
      if (g.is_team_name(tok)) {
        ids.insert(g.game_id());
        break;
      }
  return ids;
}

/// One count per matching token; a bigram keyword consumes both tokens.
inline EventCounts match_event_keywords(const TokenizedTweet& t, const GameLexicon& lex) {
  EventCounts counts;
  const auto& toks = t.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i + 1 < toks.size()) {
      if (auto type = lex.bigram_event(toks[i], toks[i + 1])) {
        ++counts[*type];
        ++i;
        continue;
      }
    }
    if (auto type = lex.unigram_event(toks[i])) ++counts[*type];
  }
  return counts;
}

/// Per-game outcome of classifying one message.
struct GameHit {
  std::string game_id;
  EventCounts events;
};

/// Runs the full lexicon path for a fixed set of concurrent games. When only
/// one game is configured, related messages without a team name are
/// attributed to it.
class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(std::vector<GameLexicon> games) : games_(std::move(games)) {
    check_concurrent_games(games_);
  }

  const std::vector<GameLexicon>& games() const noexcept { return games_; }

  std::vector<GameHit> classify(std::string_view text, DeviceClass device = DeviceClass::Unknown) const {
    std::vector<GameHit> hits;
    if (games_.empty()) return hits;
    auto t = preprocess(text, games_, device);
    if (!t.is_english) return hits;
    for (auto& g : games_) {
      bool attributed = false;
      for (auto& tok : t.tokens)
        if (g.is_team_name(tok)) {
          attributed = true;
          break;
        }
      if (!attributed && games_.size() == 1) attributed = is_game_related(t, g);
      if (attributed) hits.push_back({g.game_id(), match_event_keywords(t, g)});
    }
    return hits;
  }

 private:
  std::vector<GameLexicon> games_;
};

/// Reads a lexicon file: a JSON array of game objects, or one object per line.
inline std::vector<GameLexicon> load_lexicons(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  std::vector<GameLexicon> out;
  auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(0, e.what());
    }
    for (auto& j : doc) out.push_back(GameLexicon::from_json(j));
    return out;
  }
  std::istringstream lines(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(lineno, e.what());
    }
    out.push_back(GameLexicon::from_json(j));
  }
  return out;
}

inline std::vector<GameLexicon> load_lexicons(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open lexicon file " + path);
  return load_lexicons(in);
}

inline void save_lexicons(std::ostream& out, std::span<const GameLexicon> games) {
  for (auto& g : games) out << g.to_json().dump() << '\n';
}

}  // namespace pulse

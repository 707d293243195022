#pragma once

// Labeled message corpus for scoring lexicon extraction. Categories follow the
// ways keyword matching goes wrong on real streams: foreign-language messages
// that carry an English keyword, misspellings, and clipped fragments.

#include <cstdint>
#include <string>
#include <vector>

#include "pulse/bundled.hpp"
#include "pulse/eval.hpp"

namespace pulse::bundled {

namespace detail {

inline constexpr std::string_view kFragmentWithTeam[] = {"{T}!!", "{T} {W}", "go {T}", "{T}... {W}?",
                                                         "{W} {T} ugh"};
inline constexpr std::string_view kFragmentBare[] = {"what a play", "cant believe that", "that catch tho",
                                                     "refs!!", "wow just wow", "here we go"};
// Team aliases in messages that have nothing to do with the game.
inline constexpr std::string_view kOffTopicTeam[] = {"flying into {T} tomorrow morning", "{T} traffic is the worst",
                                                     "my cousin moved to {T} last year", "{T} pizza is overrated"};
inline constexpr std::string_view kFootballNoGame[] = {"fantasy league draft is next week",
                                                       "college basketball tonight", "need new running shoes"};

}  // namespace detail

/// Roughly half related. Related: clean game messages, one-edit misspellings,
/// fragments (those naming no team cannot be attributed). Unrelated: everyday
/// chatter, foreign keyword carriers, and team names used off topic.
inline std::vector<LabeledMessage> labeled_corpus(std::uint64_t seed = 2011, std::size_t size = 2400) {
  using namespace pulse::detail;
  using namespace pulse::bundled::detail;
  Rng rng(seed);
  const auto& games = regular_season_matchups();
  std::vector<LabeledMessage> out;
  out.reserve(size);
  while (out.size() < size) {
    auto surface = nfl_surface(games[rng.below(games.size())]);
    const auto& side = surface.teams[rng.below(2)];
    std::string team = pick_word(side, rng);
    auto type = kEventTypes[rng.below(kEventTypeCount)];
    std::string word = pick_word(surface.events[index_of(type)], rng);
    std::string term = pick_word(surface.terms, rng);
    double u = rng.uniform01();
    if (u < 0.36) {
      bool burst = rng.bernoulli(0.5);
      out.push_back({burst ? fill(pick_template(kBurstWithTeam, rng), team, word)
                           : fill(pick_template(kChatterWithTeam, rng), team, term),
                     true, "clean"});
    } else if (u < 0.46) {
      if (rng.bernoulli(0.5)) team = misspell(team, rng);
      else word = misspell(word, rng);
      out.push_back({fill(pick_template(kBurstWithTeam, rng), team, word), true, "misspelled"});
    } else if (u < 0.52) {
      if (rng.bernoulli(0.6)) out.push_back({fill(pick_template(kFragmentWithTeam, rng), team, word), true, "fragment"});
      else out.push_back({std::string(pick_template(kFragmentBare, rng)), true, "fragment"});
    } else if (u < 0.86) {
      out.push_back({std::string(pick_template(kUnrelated, rng)), false, "unrelated"});
    } else if (u < 0.90) {
      out.push_back({std::string(pick_template(kFootballNoGame, rng)), false, "unrelated"});
    } else if (u < 0.98) {
      out.push_back({fill(pick_template(kForeign, rng), team, word), false, "foreign"});
    } else {
      out.push_back({fill(pick_template(kOffTopicTeam, rng), team, word), false, "ambiguous"});
    }
  }
  return out;
}

}  // namespace pulse::bundled

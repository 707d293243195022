#pragma once

// Bundled NFL lexicons and scenarios used by the CLI, the acceptance suite and
// the data/ exports.

#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pulse/lexicon.hpp"
#include "pulse/random.hpp"
#include "pulse/simgen.hpp"

namespace pulse::bundled {

struct Matchup {
  std::string game_id;
  std::vector<std::string> home;
  std::vector<std::string> away;
};

inline GameLexicon nfl_lexicon(const Matchup& m) {
  return GameLexicon::build(m.game_id, {m.home, m.away},
                            {"football", "nfl", "game", "quarterback", "qb", "defense", "offense", "kickoff",
                             "superbowl", "coach", "endzone", "playoffs"},
                            {{EventType::Touchdown, {"touchdown", "TD"}},
                             {EventType::Interception, {"interception", "intercepted", "pick six"}},
                             {EventType::FieldGoal, {"field goal", "fieldgoal"}},
                             {EventType::Fumble, {"fumble", "fumbled"}}});
}

inline SurfaceWords nfl_surface(const Matchup& m) {
  SurfaceWords s;
  s.teams = {m.home, m.away};
  s.terms = {"football", "NFL", "game", "quarterback", "QB", "defense", "offense", "coach", "endzone"};
  s.events[index_of(EventType::Touchdown)] = {"touchdown", "TOUCHDOWN", "TD", "touchdowns"};
  s.events[index_of(EventType::Interception)] = {"interception", "intercepted", "pick six"};
  s.events[index_of(EventType::FieldGoal)] = {"field goal", "FIELD GOAL", "fieldgoal"};
  s.events[index_of(EventType::Fumble)] = {"fumble", "fumbled", "FUMBLE"};
  return s;
}

inline const Matchup kSuperBowl{"SB45", {"Packers", "GreenBay"}, {"Steelers", "Pittsburgh"}};

inline const std::vector<Matchup>& regular_season_matchups() {
  static const std::vector<Matchup> games{{"W16-CHI-NYJ", {"Bears", "Chicago"}, {"Jets"}},
                                          {"W16-NE-IND", {"Patriots", "Pats"}, {"Colts", "Indianapolis"}},
                                          {"W16-NYG-PHI", {"Giants"}, {"Eagles", "Philly"}},
                                          {"W16-DAL-NO", {"Cowboys", "Dallas"}, {"Saints"}}};
  return games;
}

/// Peak extra tweets/s by event type; touchdowns draw the loudest reaction.
inline double typical_magnitude(EventType t) {
  switch (t) {
    case EventType::Touchdown: return 36.0;
    case EventType::Interception: return 26.0;
    case EventType::FieldGoal: return 22.0;
    case EventType::Fumble: return 18.0;
  }
  return 20.0;
}

/// Seconds after which half of a burst's messages still name the event;
/// later reactions drift to commentary.
inline constexpr double kKeywordHalfLife = 7.0;

/// Share of fumbles the fumbling team recovers; those draw little reaction.
inline constexpr double kQuietFumbleShare = 0.4;
inline constexpr double kQuietFumbleScale = 0.25;

/// Places `types` in order with gaps drawn from [min_gap, max_gap].
inline std::vector<ScenarioEvent> spaced_events(const std::string& game_id, const std::vector<EventType>& types,
                                                Second start, Second min_gap, Second max_gap, double scale,
                                                Rng& rng) {
  std::vector<ScenarioEvent> out;
  Second at = start;
  for (auto t : types) {
    double jitter = rng.uniform(0.85, 1.15);
    if (t == EventType::Fumble && rng.bernoulli(kQuietFumbleShare)) jitter *= kQuietFumbleScale;
    out.push_back({game_id, t, at, typical_magnitude(t) * scale * jitter});
    at += min_gap + static_cast<Second>(rng.below(static_cast<std::uint64_t>(max_gap - min_gap + 1)));
  }
  return out;
}

/// One heavily watched game: 80 tweets/s of chatter against a 50 tweets/s
/// delivery cap, with the XLV event inventory (7 TD, 2 INT, 1 FUM, 1 FG).
inline Scenario superbowl() {
  Scenario sc;
  sc.name = "superbowl";
  sc.seed = 2011;
  sc.duration_s = 2400;
  sc.games.push_back({nfl_lexicon(kSuperBowl), 80.0, nfl_surface(kSuperBowl)});
  sc.noise = {8.0, 0.03, 0.0};
  sc.api = {ApiProfile::kPopularDelay, 50};
  sc.text.keyword_half_life_s = kKeywordHalfLife;
  using E = EventType;
  Rng rng = Rng::derived(sc.seed, 77);
  sc.events = spaced_events("SB45",
                            {E::Touchdown, E::Interception, E::Touchdown, E::FieldGoal, E::Touchdown, E::Fumble,
                             E::Touchdown, E::Interception, E::Touchdown, E::Touchdown, E::Touchdown},
                            120, 180, 230, 1.2, rng);
  return sc;
}

/// Four concurrent regular-season games, uncapped, popular-keyword delivery.
inline Scenario regular_season(std::uint64_t seed = 1216) {
  Scenario sc;
  sc.name = "regular_season";
  sc.seed = seed;
  sc.duration_s = 2100;
  sc.noise = {5.0, 0.03, 0.0};
  sc.api = {ApiProfile::kPopularDelay, std::nullopt};
  sc.text.keyword_half_life_s = kKeywordHalfLife;
  const double baselines[] = {24.0, 36.0, 20.0, 30.0};
  using E = EventType;
  const std::vector<std::vector<E>> plans{{E::Touchdown, E::FieldGoal, E::Interception, E::Touchdown, E::Fumble, E::Touchdown},
                                          {E::FieldGoal, E::Touchdown, E::Fumble, E::Touchdown, E::Interception, E::Touchdown},
                                          {E::Touchdown, E::Interception, E::Touchdown, E::FieldGoal, E::Touchdown},
                                          {E::Fumble, E::Touchdown, E::FieldGoal, E::Touchdown, E::Interception, E::Touchdown}};
  Rng rng = Rng::derived(seed, 78);
  const auto& games = regular_season_matchups();
  for (std::size_t i = 0; i < games.size(); ++i) {
    sc.games.push_back({nfl_lexicon(games[i]), baselines[i], nfl_surface(games[i])});
    auto evs = spaced_events(games[i].game_id, plans[i], 90 + static_cast<Second>(rng.below(120)), 200, 320,
                             baselines[i] * 0.06, rng);
    sc.events.insert(sc.events.end(), evs.begin(), evs.end());
  }
  return sc;
}

/// Scenario suite behind the regular-season acceptance checks.
inline std::vector<Scenario> regular_season_suite() { return {regular_season(1216), regular_season(1217)}; }

/// "superbowl", "regular_season" or "regular_season:<seed>".
inline std::optional<Scenario> scenario_by_name(std::string_view name) {
  if (name == "superbowl") return superbowl();
  if (name == "regular_season") return regular_season();
  constexpr std::string_view prefix = "regular_season:";
  if (name.substr(0, prefix.size()) == prefix) {
    auto digits = name.substr(prefix.size());
    std::uint64_t seed = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec == std::errc{} && end == digits.data() + digits.size() && !digits.empty()) return regular_season(seed);
  }
  return std::nullopt;
}

inline std::vector<GameLexicon> regular_season_lexicons() {
  std::vector<GameLexicon> out;
  for (auto& m : regular_season_matchups()) out.push_back(nfl_lexicon(m));
  return out;
}

}  // namespace pulse::bundled

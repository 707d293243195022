#pragma once

// Seeded random scenarios for equivalence and property tests.

#include <cstdint>

#include "pulse/bundled.hpp"
#include "pulse/random.hpp"
#include "pulse/simgen.hpp"

namespace testgen {

/// 1-3 games, 60-900 s, 0-10 events, optional cap and custom-keyword delay.
inline pulse::Scenario random_scenario(std::uint64_t seed) {
  pulse::Rng rng(seed);
  pulse::Scenario sc;
  sc.name = "random-" + std::to_string(seed);
  sc.seed = seed;
  sc.duration_s = 60 + static_cast<pulse::Second>(rng.below(841));
  const auto& matchups = pulse::bundled::regular_season_matchups();
  auto games = 1 + rng.below(3);
  for (std::uint64_t g = 0; g < games; ++g)
    sc.games.push_back({pulse::bundled::nfl_lexicon(matchups[g]), rng.uniform(1.0, 25.0),
                        pulse::bundled::nfl_surface(matchups[g])});
  auto events = rng.below(11);
  for (std::uint64_t i = 0; i < events; ++i) {
    const auto& game = sc.games[rng.below(sc.games.size())];
    sc.events.push_back({game.lexicon.game_id(), pulse::kEventTypes[rng.below(pulse::kEventTypeCount)],
                         static_cast<pulse::Second>(rng.below(static_cast<std::uint64_t>(sc.duration_s))),
                         rng.uniform(3.0, 60.0)});
  }
  sc.noise = {rng.uniform(0.0, 3.0), rng.uniform(0.0, 0.1), rng.uniform(0.0, 0.3)};
  sc.text.keyword_half_life_s = rng.bernoulli(0.5) ? 0.0 : rng.uniform(3.0, 20.0);
  if (rng.bernoulli(0.3)) sc.api.cap_tweets_per_s = static_cast<std::uint32_t>(5 + rng.below(30));
  if (rng.bernoulli(0.2)) sc.api.delivery_delay_s = pulse::ApiProfile::kCustomDelay;
  return sc;
}

}  // namespace testgen

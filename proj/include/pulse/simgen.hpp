#pragma once

// Scenario-driven tweet stream generator and delivery-constraint emulator.
//
// A scenario lists concurrent games (lexicon, baseline chatter rate, surface
// words used to write messages), ground-truth events, background noise, a
// human reaction model and an API delivery profile. generate() is a pure
// function of the scenario (including its seed).
//
// Each event produces a burst of messages. The non-mobile component starts
// at true_second + d, d ~ Triangular(13, 17, 27) floored to whole seconds;
// its first message always carries the event keyword. The rate ramps
// linearly to its peak over `ramp_up_non_mobile_s`, then decays with
// half-life `decay_half_life_s`. The mobile component starts 3-5 s later and
// ramps over `ramp_up_mobile_s`. Peaks split `magnitude` by mobile_fraction.
//
// Scenario JSONL, one object per line:
//
//   {"kind":"scenario","name":"superbowl","duration_s":2400,"seed":7,
//    "noise":{...},"delay_model":{...},"api":{...},"text":{...}}
//   {"kind":"game","baseline_rate":80,"lexicon":{...},"surface":{...}}
//   {"kind":"event","game_id":"SB45","event_type":"touchdown","true_second":300,"magnitude":40}
//   {"kind":"swell","game_id":"SB45","second":410,"magnitude":25}
//
// A swell is a crowd reaction without a recognizable event (a long gain, a
// disputed call): same burst shape and reaction delay, no event keyword.
//
// "api" accepts {"keyword_class":"popular"|"custom"} (1 s / 30 s delivery)
// or an explicit "delivery_delay_s", plus optional "cap_tweets_per_s".

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/error.hpp"
#include "pulse/event_type.hpp"
#include "pulse/lexicon.hpp"
#include "pulse/random.hpp"
#include "pulse/trace.hpp"

namespace pulse {

struct HumanDelayModel {
  double first_min_s = 13.0;
  double first_mode_s = 17.0;
  double first_max_s = 27.0;
  double mobile_extra_min_s = 3.0;
  double mobile_extra_max_s = 5.0;
  double mobile_fraction = 0.40;
  Second ramp_up_non_mobile_s = 10;
  Second ramp_up_mobile_s = 36;
  double decay_half_life_s = 30.0;

  void validate() const {
    if (!(first_min_s <= first_mode_s && first_mode_s <= first_max_s) || first_min_s < 0)
      throw ConfigError("delay model: need 0 <= min <= mode <= max");
    if (!(mobile_extra_min_s >= 0 && mobile_extra_min_s <= mobile_extra_max_s))
      throw ConfigError("delay model: bad mobile extra delay range");
    if (!(mobile_fraction >= 0.0 && mobile_fraction <= 1.0)) throw ConfigError("delay model: mobile_fraction outside [0,1]");
    if (ramp_up_non_mobile_s < 1 || ramp_up_mobile_s < 1) throw ConfigError("delay model: ramp-up must be >= 1 s");
    if (!(decay_half_life_s > 0)) throw ConfigError("delay model: half-life must be positive");
  }

  friend bool operator==(const HumanDelayModel&, const HumanDelayModel&) = default;
};

struct ApiProfile {
  static constexpr Second kPopularDelay = 1;
  static constexpr Second kCustomDelay = 30;

  Second delivery_delay_s = kPopularDelay;
  std::optional<std::uint32_t> cap_tweets_per_s;

  void validate() const {
    if (delivery_delay_s < 0) throw ConfigError("api: delivery_delay_s must be >= 0");
    if (cap_tweets_per_s && *cap_tweets_per_s < 1) throw ConfigError("api: cap must be >= 1");
  }

  friend bool operator==(const ApiProfile&, const ApiProfile&) = default;
};

struct NoiseProfile {
  double unrelated_rate = 0.0;           // unrelated English messages per second
  double foreign_fraction = 0.0;         // share of game messages written in another language
  double incidental_keyword_rate = 0.0;  // per game, keyword mentions outside any event

  friend bool operator==(const NoiseProfile&, const NoiseProfile&) = default;
};

struct TextProfile {
  double team_mention_prob = 0.75;
  double burst_keyword_fraction = 0.85;
  // Keyword share halves every this many seconds of burst age; 0 keeps it flat.
  double keyword_half_life_s = 0.0;
  double misspelling_fraction = 0.05;

  friend bool operator==(const TextProfile&, const TextProfile&) = default;
};

/// Surface words used when writing messages for one game.
struct SurfaceWords {
  std::array<std::vector<std::string>, 2> teams;
  std::vector<std::string> terms;
  std::array<std::vector<std::string>, kEventTypeCount> events;

  friend bool operator==(const SurfaceWords&, const SurfaceWords&) = default;
};

struct GameSpec {
  GameLexicon lexicon;
  double baseline_rate = 0.0;
  SurfaceWords surface;

  friend bool operator==(const GameSpec&, const GameSpec&) = default;
};

struct ScenarioEvent {
  std::string game_id;
  EventType event_type = EventType::Touchdown;
  Second true_second = 0;
  double magnitude = 0.0;

  friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

struct CrowdSwell {
  std::string game_id;
  Second second = 0;
  double magnitude = 0.0;

  friend bool operator==(const CrowdSwell&, const CrowdSwell&) = default;
};

struct Scenario {
  std::string name;
  std::vector<GameSpec> games;
  std::vector<ScenarioEvent> events;
  std::vector<CrowdSwell> swells;
  Second duration_s = 0;
  NoiseProfile noise;
  HumanDelayModel delay;
  ApiProfile api;
  TextProfile text;
  std::uint64_t seed = 0;

  std::vector<GameLexicon> lexicons() const {
    std::vector<GameLexicon> out;
    for (auto& g : games) out.push_back(g.lexicon);
    return out;
  }

  std::vector<TruthEvent> truth() const {
    std::vector<TruthEvent> out;
    for (auto& e : events) out.push_back({e.game_id, e.event_type, e.true_second, e.magnitude});
    return out;
  }

  void validate() const {
    if (duration_s <= 0) throw ConfigError("scenario: duration_s must be positive");
    auto lex = lexicons();
    check_concurrent_games(lex);
    for (auto& g : games)
      if (!(g.baseline_rate >= 0)) throw ConfigError("scenario: negative baseline rate");
    for (auto& e : events) {
      if (e.true_second < 0 || e.true_second >= duration_s)
        throw ConfigError("scenario: event true_second outside [0, duration)");
      if (!(e.magnitude > 0)) throw ConfigError("scenario: event magnitude must be positive");
      bool known = std::any_of(games.begin(), games.end(),
                               [&](const GameSpec& g) { return g.lexicon.game_id() == e.game_id; });
      if (!known) throw ConfigError("scenario: event for unknown game '" + e.game_id + "'");
    }
    for (auto& w : swells) {
      if (w.second < 0 || w.second >= duration_s) throw ConfigError("scenario: swell second outside [0, duration)");
      if (!(w.magnitude > 0)) throw ConfigError("scenario: swell magnitude must be positive");
      bool known = std::any_of(games.begin(), games.end(),
                               [&](const GameSpec& g) { return g.lexicon.game_id() == w.game_id; });
      if (!known) throw ConfigError("scenario: swell for unknown game '" + w.game_id + "'");
    }
    if (noise.unrelated_rate < 0 || noise.incidental_keyword_rate < 0 || noise.foreign_fraction < 0 ||
        noise.foreign_fraction > 1)
      throw ConfigError("scenario: bad noise profile");
    delay.validate();
    api.validate();
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline const std::vector<std::string>& non_empty(const std::vector<std::string>& words,
                                                 const std::vector<std::string>& fallback) {
  return words.empty() ? fallback : words;
}

// Surface forms default to the lexicon's normalized terms, which normalize
// back to themselves.
inline SurfaceWords resolved_surface(const GameSpec& g) {
  SurfaceWords s = g.surface;
  for (std::size_t t = 0; t < 2; ++t)
    if (s.teams[t].empty()) s.teams[t].assign(g.lexicon.team_names(t).begin(), g.lexicon.team_names(t).end());
  if (s.terms.empty()) s.terms.assign(g.lexicon.game_terms().begin(), g.lexicon.game_terms().end());
  if (s.terms.empty()) s.terms = s.teams[0];
  for (auto type : kEventTypes) {
    auto& words = s.events[index_of(type)];
    if (!words.empty()) continue;
    for (auto& kw : g.lexicon.keywords(type)) words.push_back(kw.size() == 1 ? kw[0] : kw[0] + " " + kw[1]);
  }
  return s;
}

inline std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// One-edit misspelling: drop or double an inner letter, or stretch the last.
inline std::string misspell(const std::string& w, Rng& rng) {
  if (w.size() < 5 || w.find(' ') != std::string::npos) return w;
  std::size_t pos = 1 + static_cast<std::size_t>(rng.below(w.size() - 2));
  switch (rng.below(3)) {
    case 0: return w.substr(0, pos) + w.substr(pos + 1);
    case 1: return w.substr(0, pos + 1) + w.substr(pos);
    default: return w + std::string(3, w.back());
  }
}

inline std::string fill(std::string_view tpl, const std::string& team, const std::string& word) {
  std::string out;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i] == '{' && i + 2 < tpl.size() && tpl[i + 2] == '}') {
      out += tpl[i + 1] == 'T' ? team : word;
      i += 2;
    } else {
      out.push_back(tpl[i]);
    }
  }
  return out;
}

inline constexpr std::string_view kChatterWithTeam[] = {
    "{T} {W} looking good tonight", "Come on {T}!! let's go",     "{T} need a better {W}",
    "love watching the {T} play",   "{W} from the {T} is solid #NFL", "this {T} {W} is something else",
    "{T} all the way",              "not sure about the {T} {W} today"};
inline constexpr std::string_view kChatterNoTeam[] = {"this {W} is intense", "great {W} so far tonight",
                                                      "what a {W} lol", "{W} looks shaky right now"};
inline constexpr std::string_view kBurstWithTeam[] = {"{W}!!! {T}", "{T} {W}!!", "omg {W} {T}",
                                                      "what a {W} by the {T}", "{W} {T} lets goooo",
                                                      "YES {W} {T} @nfl"};
inline constexpr std::string_view kBurstNoTeam[] = {"{W}!!!", "{W} {W} {W}", "{W} baby!! :)",
                                                    "did you see that {W}? http://t.co/x1"};
inline constexpr std::string_view kExcitedWithTeam[] = {"WHAT A PLAY {T}!!!", "unbelievable {T}",
                                                        "{T} fans going crazy right now"};
inline constexpr std::string_view kExcitedNoTeam[] = {"did you see that?!", "oh my god", "no way!!!"};
inline constexpr std::string_view kIncidental[] = {"hoping for a {W} soon {T}", "{T} need a {W} badly",
                                                   "still no {W} for the {T}"};
inline constexpr std::string_view kForeign[] = {"Que {W} de los {T}!!", "Vamos {T}! gran partido",
                                                "Muito bom jogo dos {T}, que {W}", "Quel {W} pour les {T}",
                                                "Unglaublich, der {W} der {T}"};
inline constexpr std::string_view kUnrelated[] = {
    "going to dinner with friends",      "traffic is terrible today",        "new phone who dis",
    "watching a movie tonight",          "cannot wait for the weekend",      "coffee first then work",
    "my cat knocked over the lamp",      "long day at the office",           "anyone know a good pizza place",
    "listening to music and relaxing",   "the weather is so nice outside",   "just finished my homework",
    "happy birthday to my best friend",  "need more sleep honestly",         "shopping with mom today"};

template <std::size_t N>
std::string_view pick_template(const std::string_view (&list)[N], Rng& rng) {
  return list[rng.below(N)];
}

inline const std::string& pick_word(const std::vector<std::string>& words, Rng& rng) {
  return words[static_cast<std::size_t>(rng.below(words.size()))];
}

struct BurstPlan {
  std::optional<std::size_t> event_index;  // empty for swells
  std::size_t game_index;
  EventType type;
  Second onset_non_mobile;
  Second onset_mobile;
  double peak_non_mobile;
  double peak_mobile;
};

inline double burst_rate(Second k, double peak, Second ramp, double half_life) {
  if (k < 0 || peak <= 0) return 0.0;
  if (k < ramp) return peak * static_cast<double>(k + 1) / static_cast<double>(ramp);
  return peak * std::pow(0.5, static_cast<double>(k - ramp + 1) / half_life);
}

}  // namespace detail

/// Expected burst rate of one event component, exposed for tests.
inline double burst_rate(Second seconds_since_onset, double peak, Second ramp_up_s, double half_life_s) {
  return detail::burst_rate(seconds_since_onset, peak, ramp_up_s, half_life_s);
}

/// Generates the created-time trace of a scenario; delivered == created.
inline TweetTrace generate(const Scenario& sc) {
  sc.validate();
  TweetTrace trace;
  trace.truth = sc.truth();

  std::vector<SurfaceWords> surface;
  std::map<std::string, std::size_t> game_index;
  for (std::size_t i = 0; i < sc.games.size(); ++i) {
    surface.push_back(detail::resolved_surface(sc.games[i]));
    game_index[sc.games[i].lexicon.game_id()] = i;
  }

  const auto& dm = sc.delay;
  std::vector<detail::BurstPlan> bursts;
  auto plan = [&](std::optional<std::size_t> event, const std::string& game_id, EventType type, Second at,
                  double magnitude, Rng er) {
    auto delay = static_cast<Second>(std::floor(er.triangular(dm.first_min_s, dm.first_mode_s, dm.first_max_s)));
    auto extra = static_cast<Second>(std::lround(er.uniform(dm.mobile_extra_min_s, dm.mobile_extra_max_s)));
    Second onset = at + delay;
    bursts.push_back({event, game_index.at(game_id), type, onset, onset + extra,
                      magnitude * (1.0 - dm.mobile_fraction), magnitude * dm.mobile_fraction});
  };
  for (std::size_t i = 0; i < sc.events.size(); ++i) {
    const auto& e = sc.events[i];
    plan(i, e.game_id, e.event_type, e.true_second, e.magnitude, Rng::derived(sc.seed, 1000 + i));
  }
  for (std::size_t i = 0; i < sc.swells.size(); ++i) {
    const auto& w = sc.swells[i];
    plan(std::nullopt, w.game_id, EventType::Touchdown, w.second, w.magnitude, Rng::derived(sc.seed, 1'000'000 + i));
  }

  Rng rng = Rng::derived(sc.seed, 1);
  std::uint64_t next_id = 1;
  auto emit = [&](Second s, std::string text, DeviceClass dev, TweetTruth truth) {
    trace.tweets.push_back({next_id++, s, s, std::move(text), dev, std::move(truth)});
  };
  auto device = [&](double mobile_p) { return rng.bernoulli(mobile_p) ? DeviceClass::Mobile : DeviceClass::NonMobile; };

  auto team_word = [&](const SurfaceWords& sw, bool& has_team) -> std::string {
    has_team = rng.bernoulli(sc.text.team_mention_prob);
    if (!has_team) return {};
    return detail::pick_word(sw.teams[rng.below(2)], rng);
  };

  auto foreign = [&](std::size_t g, Second s, DeviceClass dev, std::optional<std::size_t> ev, EventType type) {
    const auto& sw = surface[g];
    const auto& team = detail::pick_word(sw.teams[rng.below(2)], rng);
    const auto& word = detail::pick_word(sw.events[index_of(type)], rng);
    emit(s, detail::fill(detail::pick_template(detail::kForeign, rng), team, word), dev,
         {TweetOrigin::Foreign, sc.games[g].lexicon.game_id(), ev});
  };

  auto keyword_text = [&](const SurfaceWords& sw, EventType type, bool exact) {
    std::string word = detail::pick_word(sw.events[index_of(type)], rng);
    if (!exact && rng.bernoulli(sc.text.misspelling_fraction)) word = detail::misspell(word, rng);
    if (!exact && rng.bernoulli(0.3)) word = detail::upper(word);
    bool has_team = false;
    std::string team = team_word(sw, has_team);
    auto tpl = has_team ? detail::pick_template(detail::kBurstWithTeam, rng) : detail::pick_template(detail::kBurstNoTeam, rng);
    return detail::fill(tpl, team, word);
  };

  std::vector<bool> first_sent(bursts.size(), false);
  for (Second s = 0; s < sc.duration_s; ++s) {
    for (std::size_t g = 0; g < sc.games.size(); ++g) {
      const auto& spec = sc.games[g];
      const auto& sw = surface[g];
      for (auto n = rng.poisson(spec.baseline_rate); n > 0; --n) {
        auto dev = device(dm.mobile_fraction);
        if (rng.bernoulli(sc.noise.foreign_fraction)) {
          foreign(g, s, dev, std::nullopt, kEventTypes[rng.below(kEventTypeCount)]);
          continue;
        }
        bool has_team = false;
        std::string team = team_word(sw, has_team);
        const auto& term = detail::pick_word(sw.terms, rng);
        auto tpl = has_team ? detail::pick_template(detail::kChatterWithTeam, rng)
                            : detail::pick_template(detail::kChatterNoTeam, rng);
        emit(s, detail::fill(tpl, team, term), dev, {TweetOrigin::Chatter, spec.lexicon.game_id(), std::nullopt});
      }
      for (auto n = rng.poisson(sc.noise.incidental_keyword_rate); n > 0; --n) {
        auto type = kEventTypes[rng.below(kEventTypeCount)];
        const auto& team = detail::pick_word(sw.teams[rng.below(2)], rng);
        const auto& word = detail::pick_word(sw.events[index_of(type)], rng);
        emit(s, detail::fill(detail::pick_template(detail::kIncidental, rng), team, word), device(dm.mobile_fraction),
             {TweetOrigin::Chatter, spec.lexicon.game_id(), std::nullopt});
      }
    }

    for (std::size_t b = 0; b < bursts.size(); ++b) {
      const auto& plan = bursts[b];
      const auto& sw = surface[plan.game_index];
      const auto& gid = sc.games[plan.game_index].lexicon.game_id();
      for (bool mobile : {false, true}) {
        Second onset = mobile ? plan.onset_mobile : plan.onset_non_mobile;
        double peak = mobile ? plan.peak_mobile : plan.peak_non_mobile;
        Second ramp = mobile ? dm.ramp_up_mobile_s : dm.ramp_up_non_mobile_s;
        auto n = rng.poisson(detail::burst_rate(s - onset, peak, ramp, dm.decay_half_life_s));
        DeviceClass dev = mobile ? DeviceClass::Mobile : DeviceClass::NonMobile;
        if (plan.event_index && !mobile && s == onset && !first_sent[b]) {
          // The first report of the event names it, spelled correctly.
          first_sent[b] = true;
          emit(s, keyword_text(sw, plan.type, true), dev, {TweetOrigin::Burst, gid, plan.event_index});
          if (n > 0) --n;
        }
        for (; n > 0; --n) {
          if (plan.event_index && rng.bernoulli(sc.noise.foreign_fraction)) {
            foreign(plan.game_index, s, dev, plan.event_index, plan.type);
            continue;
          }
          std::string text;
          double keyword_p = plan.event_index ? sc.text.burst_keyword_fraction : 0.0;
          if (sc.text.keyword_half_life_s > 0)
            keyword_p *= std::pow(0.5, static_cast<double>(s - onset) / sc.text.keyword_half_life_s);
          if (rng.bernoulli(keyword_p)) {
            text = keyword_text(sw, plan.type, false);
          } else {
            bool has_team = false;
            std::string team = team_word(sw, has_team);
            text = detail::fill(has_team ? detail::pick_template(detail::kExcitedWithTeam, rng)
                                         : detail::pick_template(detail::kExcitedNoTeam, rng),
                                team, "");
          }
          emit(s, std::move(text), dev, {TweetOrigin::Burst, gid, plan.event_index});
        }
      }
    }

    for (auto n = rng.poisson(sc.noise.unrelated_rate); n > 0; --n)
      emit(s, std::string(detail::pick_template(detail::kUnrelated, rng)), device(dm.mobile_fraction),
           {TweetOrigin::Noise, "", std::nullopt});
  }
  return trace;
}

/// Applies delivery delay and an optional per-second cap. Which messages
/// survive a capped second is drawn uniformly with a seeded generator.
inline TweetTrace apply_api_constraints(const TweetTrace& trace, const ApiProfile& api, std::uint64_t seed = 0) {
  api.validate();
  TweetTrace out;
  out.truth = trace.truth;
  std::vector<Tweet> delayed = trace.tweets;
  for (auto& t : delayed) t.delivered_second = t.created_second + api.delivery_delay_s;
  std::stable_sort(delayed.begin(), delayed.end(), [](const Tweet& a, const Tweet& b) {
    return a.delivered_second != b.delivered_second ? a.delivered_second < b.delivered_second : a.id < b.id;
  });
  if (!api.cap_tweets_per_s) {
    out.tweets = std::move(delayed);
    return out;
  }
  const std::size_t cap = *api.cap_tweets_per_s;
  Rng rng = Rng::derived(seed, 2);
  std::size_t i = 0;
  while (i < delayed.size()) {
    std::size_t j = i;
    while (j < delayed.size() && delayed[j].delivered_second == delayed[i].delivered_second) ++j;
    std::size_t n = j - i;
    if (n <= cap) {
      for (std::size_t k = i; k < j; ++k) out.tweets.push_back(std::move(delayed[k]));
    } else {
      // Partial Fisher-Yates over the indices of this second.
      std::vector<std::size_t> idx(n);
      for (std::size_t k = 0; k < n; ++k) idx[k] = i + k;
      for (std::size_t k = 0; k < cap; ++k) std::swap(idx[k], idx[k + rng.below(n - k)]);
      idx.resize(cap);
      std::sort(idx.begin(), idx.end());
      for (auto k : idx) out.tweets.push_back(std::move(delayed[k]));
    }
    i = j;
  }
  return out;
}

/// generate() followed by the scenario's API profile.
inline TweetTrace simulate(const Scenario& sc) { return apply_api_constraints(generate(sc), sc.api, sc.seed); }

// ---- scenario JSONL ------------------------------------------------------

inline nlohmann::json to_json(const SurfaceWords& s) {
  nlohmann::json ev = nlohmann::json::object();
  for (auto t : kEventTypes)
    if (!s.events[index_of(t)].empty()) ev[std::string(to_string(t))] = s.events[index_of(t)];
  nlohmann::json teams = nlohmann::json::array({nlohmann::json(s.teams[0]), nlohmann::json(s.teams[1])});
  return {{"teams", teams}, {"terms", s.terms}, {"events", ev}};
}

inline SurfaceWords surface_from_json(const nlohmann::json& j) {
  SurfaceWords s;
  if (j.contains("teams")) {
    const auto& t = j.at("teams");
    if (!t.is_array() || t.size() != 2) throw ParseError(0, "surface.teams must hold two arrays");
    s.teams[0] = t[0].get<std::vector<std::string>>();
    s.teams[1] = t[1].get<std::vector<std::string>>();
  }
  s.terms = j.value("terms", std::vector<std::string>{});
  if (j.contains("events"))
    for (auto& [k, v] : j.at("events").items()) {
      auto type = parse_event_type(k);
      if (!type) throw ParseError(0, "surface.events: unknown event type '" + k + "'");
      s.events[index_of(*type)] = v.get<std::vector<std::string>>();
    }
  return s;
}

inline void write_scenario(std::ostream& out, const Scenario& sc) {
  nlohmann::json api = {{"delivery_delay_s", sc.api.delivery_delay_s}};
  if (sc.api.cap_tweets_per_s) api["cap_tweets_per_s"] = *sc.api.cap_tweets_per_s;
  const auto& d = sc.delay;
  nlohmann::json head = {
      {"kind", "scenario"},
      {"name", sc.name},
      {"duration_s", sc.duration_s},
      {"seed", sc.seed},
      {"noise",
       {{"unrelated_rate", sc.noise.unrelated_rate},
        {"foreign_fraction", sc.noise.foreign_fraction},
        {"incidental_keyword_rate", sc.noise.incidental_keyword_rate}}},
      {"delay_model",
       {{"first_min_s", d.first_min_s},
        {"first_mode_s", d.first_mode_s},
        {"first_max_s", d.first_max_s},
        {"mobile_extra_min_s", d.mobile_extra_min_s},
        {"mobile_extra_max_s", d.mobile_extra_max_s},
        {"mobile_fraction", d.mobile_fraction},
        {"ramp_up_non_mobile_s", d.ramp_up_non_mobile_s},
        {"ramp_up_mobile_s", d.ramp_up_mobile_s},
        {"decay_half_life_s", d.decay_half_life_s}}},
      {"api", api},
      {"text",
       {{"team_mention_prob", sc.text.team_mention_prob},
        {"burst_keyword_fraction", sc.text.burst_keyword_fraction},
        {"keyword_half_life_s", sc.text.keyword_half_life_s},
        {"misspelling_fraction", sc.text.misspelling_fraction}}}};
  out << head.dump() << '\n';
  for (auto& g : sc.games)
    out << nlohmann::json{{"kind", "game"},
                          {"baseline_rate", g.baseline_rate},
                          {"lexicon", g.lexicon.to_json()},
                          {"surface", to_json(g.surface)}}
               .dump()
        << '\n';
  for (auto& w : sc.swells)
    out << nlohmann::json{{"kind", "swell"}, {"game_id", w.game_id}, {"second", w.second}, {"magnitude", w.magnitude}}
               .dump()
        << '\n';
  for (auto& e : sc.events)
    out << nlohmann::json{{"kind", "event"},
                          {"game_id", e.game_id},
                          {"event_type", std::string(to_string(e.event_type))},
                          {"true_second", e.true_second},
                          {"magnitude", e.magnitude}}
               .dump()
        << '\n';
}

/// Reads and validates a scenario. ParseError carries the failing line;
/// semantic problems raise ConfigError.
inline Scenario load_scenario(std::istream& in) {
  Scenario sc;
  bool have_head = false;
  for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "scenario") {
      have_head = true;
      sc.name = j.value("name", std::string{});
      sc.duration_s = j.at("duration_s").get<Second>();
      sc.seed = j.value("seed", std::uint64_t{0});
      if (j.contains("noise")) {
        const auto& n = j.at("noise");
        sc.noise.unrelated_rate = n.value("unrelated_rate", 0.0);
        sc.noise.foreign_fraction = n.value("foreign_fraction", 0.0);
        sc.noise.incidental_keyword_rate = n.value("incidental_keyword_rate", 0.0);
      }
      if (j.contains("delay_model")) {
        const auto& d = j.at("delay_model");
        auto& m = sc.delay;
        m.first_min_s = d.value("first_min_s", m.first_min_s);
        m.first_mode_s = d.value("first_mode_s", m.first_mode_s);
        m.first_max_s = d.value("first_max_s", m.first_max_s);
        m.mobile_extra_min_s = d.value("mobile_extra_min_s", m.mobile_extra_min_s);
        m.mobile_extra_max_s = d.value("mobile_extra_max_s", m.mobile_extra_max_s);
        m.mobile_fraction = d.value("mobile_fraction", m.mobile_fraction);
        m.ramp_up_non_mobile_s = d.value("ramp_up_non_mobile_s", m.ramp_up_non_mobile_s);
        m.ramp_up_mobile_s = d.value("ramp_up_mobile_s", m.ramp_up_mobile_s);
        m.decay_half_life_s = d.value("decay_half_life_s", m.decay_half_life_s);
      }
      if (j.contains("api")) {
        const auto& a = j.at("api");
        if (a.contains("keyword_class")) {
          auto cls = a.at("keyword_class").get<std::string>();
          if (cls == "popular") sc.api.delivery_delay_s = ApiProfile::kPopularDelay;
          else if (cls == "custom") sc.api.delivery_delay_s = ApiProfile::kCustomDelay;
          else throw ParseError(0, "api.keyword_class must be popular or custom");
        }
        sc.api.delivery_delay_s = a.value("delivery_delay_s", sc.api.delivery_delay_s);
        if (a.contains("cap_tweets_per_s") && !a.at("cap_tweets_per_s").is_null())
          sc.api.cap_tweets_per_s = a.at("cap_tweets_per_s").get<std::uint32_t>();
      }
      if (j.contains("text")) {
        const auto& t = j.at("text");
        sc.text.team_mention_prob = t.value("team_mention_prob", sc.text.team_mention_prob);
        sc.text.burst_keyword_fraction = t.value("burst_keyword_fraction", sc.text.burst_keyword_fraction);
        sc.text.keyword_half_life_s = t.value("keyword_half_life_s", sc.text.keyword_half_life_s);
        sc.text.misspelling_fraction = t.value("misspelling_fraction", sc.text.misspelling_fraction);
      }
    } else if (kind == "game") {
      GameSpec g{GameLexicon::from_json(j.at("lexicon")), j.at("baseline_rate").get<double>(), {}};
      if (j.contains("surface")) g.surface = surface_from_json(j.at("surface"));
      sc.games.push_back(std::move(g));
    } else if (kind == "event") {
      auto type = parse_event_type(j.at("event_type").get<std::string>());
      if (!type) throw ParseError(0, "unknown event_type");
      sc.events.push_back({j.at("game_id").get<std::string>(), *type, j.at("true_second").get<Second>(),
                           j.at("magnitude").get<double>()});
    } else if (kind == "swell") {
      sc.swells.push_back(
          {j.at("game_id").get<std::string>(), j.at("second").get<Second>(), j.at("magnitude").get<double>()});
    } else {
      throw ParseError(0, "unknown record kind '" + kind + "'");
    }
  });
  if (!have_head) throw ConfigError("scenario: missing {\"kind\":\"scenario\"} record");
  sc.validate();
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path);
  return load_scenario(in);
}

inline void write_scenario(const std::string& path, const Scenario& sc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_scenario(out, sc);
}

}  // namespace pulse

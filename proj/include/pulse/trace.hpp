#pragma once

// Tweet traces and their JSONL form.
//
// One JSON object per line, discriminated by "kind":
//
//   {"kind":"meta","schema":"pulse.trace","version":1}
//   {"kind":"event","game_id":"SB45","event_type":"touchdown","true_second":620,"magnitude":40.0}
//   {"kind":"tweet","id":17,"created":637,"delivered":638,"text":"TOUCHDOWN Packers!!",
//    "device":"mobile","truth":{"origin":"burst","game_id":"SB45","event":0}}
//
// The meta line is optional on read. "truth" is generator-private ground
// truth and is omitted for tweets of unknown provenance. Blank lines are
// ignored; anything else that fails to parse raises ParseError with its line.

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/buckets.hpp"
#include "pulse/error.hpp"
#include "pulse/event_type.hpp"
#include "pulse/lexicon.hpp"

namespace pulse {

enum class TweetOrigin : std::uint8_t { Chatter, Burst, Noise, Foreign };

constexpr std::string_view to_string(TweetOrigin o) noexcept {
  switch (o) {
    case TweetOrigin::Chatter: return "chatter";
    case TweetOrigin::Burst: return "burst";
    case TweetOrigin::Noise: return "noise";
    case TweetOrigin::Foreign: return "foreign";
  }
  return "?";
}

inline std::optional<TweetOrigin> parse_tweet_origin(std::string_view s) {
  for (auto o : {TweetOrigin::Chatter, TweetOrigin::Burst, TweetOrigin::Noise, TweetOrigin::Foreign})
    if (s == to_string(o)) return o;
  return std::nullopt;
}

struct TweetTruth {
  TweetOrigin origin = TweetOrigin::Noise;
  std::string game_id;               // empty for noise
  std::optional<std::size_t> event;  // index into TweetTrace::truth for burst tweets

  friend bool operator==(const TweetTruth&, const TweetTruth&) = default;
};

struct Tweet {
  std::uint64_t id = 0;
  Second created_second = 0;
  Second delivered_second = 0;
  std::string text;
  DeviceClass device = DeviceClass::Unknown;
  std::optional<TweetTruth> truth;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

struct TruthEvent {
  std::string game_id;
  EventType event_type = EventType::Touchdown;
  Second true_second = 0;
  double magnitude = 0.0;

  friend bool operator==(const TruthEvent&, const TruthEvent&) = default;
};

struct TweetTrace {
  std::vector<Tweet> tweets;
  std::vector<TruthEvent> truth;

  friend bool operator==(const TweetTrace&, const TweetTrace&) = default;
};

inline nlohmann::json to_json(const TruthEvent& e) {
  return {{"kind", "event"},
          {"game_id", e.game_id},
          {"event_type", std::string(to_string(e.event_type))},
          {"true_second", e.true_second},
          {"magnitude", e.magnitude}};
}

inline TruthEvent truth_event_from_json(const nlohmann::json& j) {
  TruthEvent e;
  e.game_id = j.at("game_id").get<std::string>();
  auto t = parse_event_type(j.at("event_type").get<std::string>());
  if (!t) throw ParseError(0, "unknown event_type");
  e.event_type = *t;
  e.true_second = j.at("true_second").get<Second>();
  e.magnitude = j.value("magnitude", 0.0);
  return e;
}

inline nlohmann::json to_json(const Tweet& t) {
  nlohmann::json j = {{"kind", "tweet"},
                      {"id", t.id},
                      {"created", t.created_second},
                      {"delivered", t.delivered_second},
                      {"text", t.text},
                      {"device", std::string(to_string(t.device))}};
  if (t.truth) {
    nlohmann::json tr = {{"origin", std::string(to_string(t.truth->origin))}, {"game_id", t.truth->game_id}};
    if (t.truth->event) tr["event"] = *t.truth->event;
    j["truth"] = tr;
  }
  return j;
}

inline Tweet tweet_from_json(const nlohmann::json& j) {
  Tweet t;
  t.id = j.at("id").get<std::uint64_t>();
  t.created_second = j.at("created").get<Second>();
  t.delivered_second = j.value("delivered", t.created_second);
  t.text = j.at("text").get<std::string>();
  auto dev = parse_device_class(j.value("device", std::string("unknown")));
  if (!dev) throw ParseError(0, "unknown device class");
  t.device = *dev;
  if (j.contains("truth")) {
    const auto& tr = j.at("truth");
    auto origin = parse_tweet_origin(tr.at("origin").get<std::string>());
    if (!origin) throw ParseError(0, "unknown tweet origin");
    TweetTruth truth{*origin, tr.value("game_id", std::string{}), std::nullopt};
    if (tr.contains("event")) truth.event = tr.at("event").get<std::size_t>();
    t.truth = std::move(truth);
  }
  return t;
}

/// Calls `on_line(json, lineno)` for every non-blank line. Wraps JSON and
/// schema errors in ParseError with the offending line number.
template <class Fn>
void for_each_jsonl(std::istream& in, Fn&& on_line) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      on_line(nlohmann::json::parse(line), lineno);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const ParseError& e) {
      if (e.line() != 0) throw;
      throw ParseError(lineno, e.what());
    }
  }
}

inline void write_trace(std::ostream& out, const TweetTrace& trace) {
  out << nlohmann::json{{"kind", "meta"}, {"schema", "pulse.trace"}, {"version", 1}}.dump() << '\n';
  for (auto& e : trace.truth) out << to_json(e).dump() << '\n';
  for (auto& t : trace.tweets) out << to_json(t).dump() << '\n';
}

inline TweetTrace read_trace(std::istream& in) {
  TweetTrace trace;
  for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) {
    auto kind = j.at("kind").get<std::string>();
    if (kind == "tweet") trace.tweets.push_back(tweet_from_json(j));
    else if (kind == "event") trace.truth.push_back(truth_event_from_json(j));
    else if (kind != "meta") throw ParseError(0, "unknown record kind '" + kind + "'");
  });
  return trace;
}

inline void write_trace(const std::string& path, const TweetTrace& trace) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_trace(out, trace);
}

inline TweetTrace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_trace(in);
}

}  // namespace pulse

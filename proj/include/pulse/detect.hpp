#pragma once

// Two-stage event detection: an adaptive sliding-window burst test on a
// game's total post rate, followed by keyword-rate recognition inside the
// triggering window.
//
// At every elapsed second t the window ladder is walked smallest-first. For a
// window of W seconds the first half is [t-W, t-W/2) and the second half
// [t-W/2, t). A window qualifies when
//
//   second / first >= ratio_threshold        (first == 0 counts as infinite)
//   second / (W/2)  >  avg_floor_multiplier * running average at t
//
// Windows reaching back before the stream origin are skipped, as are windows
// with both halves empty.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/buckets.hpp"
#include "pulse/error.hpp"
#include "pulse/event_type.hpp"

namespace pulse {

struct DetectorConfig {
  std::vector<Second> window_ladder{10, 20, 30, 60};
  double ratio_threshold = 1.7;
  double avg_floor_multiplier = 1.0;
  std::uint32_t min_keyword_count = 3;
  Second cooldown_s = 60;

  Second max_window() const { return window_ladder.empty() ? 0 : window_ladder.back(); }

  void validate() const {
    if (window_ladder.empty()) throw ConfigError("detector: empty window ladder");
    for (std::size_t i = 0; i < window_ladder.size(); ++i) {
      if (window_ladder[i] <= 0 || window_ladder[i] % 2 != 0)
        throw ConfigError("detector: window sizes must be positive and even");
      if (i > 0 && window_ladder[i] <= window_ladder[i - 1])
        throw ConfigError("detector: window ladder must be strictly increasing");
    }
    if (!(ratio_threshold > 1.0)) throw ConfigError("detector: ratio_threshold must exceed 1");
    if (!(avg_floor_multiplier >= 0.0)) throw ConfigError("detector: avg_floor_multiplier must be >= 0");
    if (cooldown_s < max_window()) throw ConfigError("detector: cooldown_s must be >= the largest window");
  }

  /// Same knobs with a single fixed window.
  DetectorConfig fixed(Second window) const {
    DetectorConfig c = *this;
    c.window_ladder = {window};
    c.cooldown_s = std::max(cooldown_s, window);
    return c;
  }

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

inline nlohmann::json to_json(const DetectorConfig& c) {
  return {{"window_ladder", c.window_ladder},
          {"ratio_threshold", c.ratio_threshold},
          {"avg_floor_multiplier", c.avg_floor_multiplier},
          {"min_keyword_count", c.min_keyword_count},
          {"cooldown_s", c.cooldown_s}};
}

/// Missing keys keep their defaults. Throws ConfigError.
inline DetectorConfig detector_config_from_json(const nlohmann::json& j) {
  DetectorConfig c;
  try {
    c.window_ladder = j.value("window_ladder", c.window_ladder);
    c.ratio_threshold = j.value("ratio_threshold", c.ratio_threshold);
    c.avg_floor_multiplier = j.value("avg_floor_multiplier", c.avg_floor_multiplier);
    c.min_keyword_count = j.value("min_keyword_count", c.min_keyword_count);
    c.cooldown_s = j.value("cooldown_s", c.cooldown_s);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("detector config: ") + e.what());
  }
  c.validate();
  return c;
}

enum class Solution : std::uint8_t { TwoStage, Unified };

constexpr std::string_view to_string(Solution s) noexcept {
  return s == Solution::TwoStage ? "two_stage" : "unified";
}

inline std::optional<Solution> parse_solution(std::string_view s) {
  if (s == "two_stage") return Solution::TwoStage;
  if (s == "unified") return Solution::Unified;
  return std::nullopt;
}

struct TriggerWindow {
  std::string game_id;
  Second at_second = 0;
  Second window_s = 0;
  double ratio = 0.0;  // +inf when the first half is empty
  double second_half_rate = 0.0;
  std::uint64_t first_half = 0;
  std::uint64_t second_half = 0;

  bool infinite_ratio() const { return std::isinf(ratio); }
  Second second_half_begin() const { return at_second - window_s / 2; }

  friend bool operator==(const TriggerWindow&, const TriggerWindow&) = default;
};

struct DetectedEvent {
  std::string game_id;
  EventType event_type = EventType::Touchdown;
  Second detected_at_second = 0;
  TriggerWindow trigger;
  std::uint32_t keyword_count = 0;
  Solution solution = Solution::TwoStage;

  friend bool operator==(const DetectedEvent&, const DetectedEvent&) = default;
};

/// Last emission second per (game, event type).
class CooldownState {
 public:
  bool ready(const std::string& game, EventType t, Second at, Second cooldown) const {
    auto it = last_.find({game, t});
    return it == last_.end() || at - it->second >= cooldown;
  }
  void mark(const std::string& game, EventType t, Second at) { last_[{game, t}] = at; }
  void clear() { last_.clear(); }

 private:
  std::map<std::pair<std::string, EventType>, Second> last_;
};

/// Outcome of testing one window.
struct WindowTest {
  Second window_s = 0;
  std::uint64_t first_half = 0;
  std::uint64_t second_half = 0;
  double ratio = 0.0;
  bool ratio_ok = false;
  bool floor_ok = false;

  bool passes() const { return ratio_ok && floor_ok; }
};

/// Tests one window of a series. `sum(from, to)` sums the series over
/// [from, to); `trailing(at)` returns the TrailingSum ending at `at`.
template <class SumFn, class TrailingFn>
WindowTest test_window(Second at, Second window, const DetectorConfig& cfg, SumFn&& sum, TrailingFn&& trailing) {
  WindowTest w;
  w.window_s = window;
  Second half = window / 2;
  w.first_half = sum(at - window, at - half);
  w.second_half = sum(at - half, at);
  if (w.first_half == 0 && w.second_half == 0) return w;
  w.ratio = w.first_half == 0 ? std::numeric_limits<double>::infinity()
                              : static_cast<double>(w.second_half) / static_cast<double>(w.first_half);
  w.ratio_ok = w.ratio >= cfg.ratio_threshold;
  if (!w.ratio_ok) return w;
  // second/half > m * avg.sum/avg.seconds, cross-multiplied to stay in integers.
  TrailingSum avg = trailing(at);
  auto lhs = static_cast<double>(w.second_half * static_cast<std::uint64_t>(std::max<Second>(avg.seconds, 1)));
  auto rhs = static_cast<double>(avg.sum * static_cast<std::uint64_t>(half));
  w.floor_ok = avg.seconds <= 0 ? w.second_half > 0 : lhs > cfg.avg_floor_multiplier * rhs;
  return w;
}

/// Walks the ladder smallest-first and returns the first qualifying window.
/// `extra(test)` may impose an additional per-window requirement.
template <class SumFn, class TrailingFn, class ExtraFn>
std::optional<WindowTest> scan_ladder(Second at, Second origin, const DetectorConfig& cfg, SumFn&& sum,
                                      TrailingFn&& trailing, ExtraFn&& extra) {
  for (Second window : cfg.window_ladder) {
    if (at - window < origin) continue;
    auto w = test_window(at, window, cfg, sum, trailing);
    if (w.passes() && extra(w)) return w;
  }
  return std::nullopt;
}

inline TriggerWindow make_trigger(const std::string& game_id, Second at, const WindowTest& w) {
  return {game_id, at, w.window_s, w.ratio,
          static_cast<double>(w.second_half) / static_cast<double>(w.window_s / 2), w.first_half, w.second_half};
}

/// Burst test on the game's total series at `at_second`.
inline std::optional<TriggerWindow> detect_step(const std::string& game_id, Second at_second,
                                                const TimeBucketStore& store, const DetectorConfig& cfg) {
  auto sum = [&](Second a, Second b) { return store.rate(game_id, a, b); };
  auto trailing = [&](Second at) { return store.trailing(game_id, Channel::total(), at); };
  auto w = scan_ladder(at_second, store.origin(), cfg, sum, trailing, [](const WindowTest&) { return true; });
  if (!w) return std::nullopt;
  return make_trigger(game_id, at_second, *w);
}

/// Picks the event type with the most keyword matches in the trigger's second
/// half. Ties go to the earlier type in significance order.
inline std::optional<DetectedEvent> recognize(const TriggerWindow& trigger, const TimeBucketStore& store,
                                              const DetectorConfig& cfg) {
  std::optional<EventType> best;
  std::uint64_t best_count = 0;
  for (auto t : kEventTypes) {
    auto n = store.keyword_rate(trigger.game_id, t, trigger.second_half_begin(), trigger.at_second);
    if (n > best_count) {
      best = t;
      best_count = n;
    }
  }
  if (!best || best_count < cfg.min_keyword_count) return std::nullopt;
  return DetectedEvent{trigger.game_id, *best, trigger.at_second, trigger,
                       static_cast<std::uint32_t>(best_count), Solution::TwoStage};
}

inline std::vector<DetectedEvent> two_stage_step(const std::string& game_id, Second at_second,
                                                 const TimeBucketStore& store, const DetectorConfig& cfg,
                                                 CooldownState& cooldowns) {
  std::vector<DetectedEvent> out;
  auto trigger = detect_step(game_id, at_second, store, cfg);
  if (!trigger) return out;
  auto ev = recognize(*trigger, store, cfg);
  if (!ev || !cooldowns.ready(game_id, ev->event_type, at_second, cfg.cooldown_s)) return out;
  cooldowns.mark(game_id, ev->event_type, at_second);
  out.push_back(std::move(*ev));
  return out;
}

inline nlohmann::json to_json(const TriggerWindow& t) {
  nlohmann::json ratio = t.infinite_ratio() ? nlohmann::json("inf") : nlohmann::json(t.ratio);
  return {{"at_second", t.at_second},   {"window_s", t.window_s},       {"ratio", ratio},
          {"second_half_rate", t.second_half_rate}, {"first_half", t.first_half}, {"second_half", t.second_half}};
}

inline TriggerWindow trigger_from_json(const nlohmann::json& j, std::string game_id) {
  TriggerWindow t;
  t.game_id = std::move(game_id);
  t.at_second = j.at("at_second").get<Second>();
  t.window_s = j.at("window_s").get<Second>();
  const auto& r = j.at("ratio");
  t.ratio = r.is_string() ? std::numeric_limits<double>::infinity() : r.get<double>();
  t.second_half_rate = j.at("second_half_rate").get<double>();
  t.first_half = j.at("first_half").get<std::uint64_t>();
  t.second_half = j.at("second_half").get<std::uint64_t>();
  return t;
}

inline nlohmann::json to_json(const DetectedEvent& e) {
  return {{"game_id", e.game_id},
          {"event_type", std::string(to_string(e.event_type))},
          {"detected_at", e.detected_at_second},
          {"solution", std::string(to_string(e.solution))},
          {"keyword_count", e.keyword_count},
          {"trigger", to_json(e.trigger)}};
}

inline DetectedEvent detected_event_from_json(const nlohmann::json& j) {
  DetectedEvent e;
  e.game_id = j.at("game_id").get<std::string>();
  auto type = parse_event_type(j.at("event_type").get<std::string>());
  auto sol = parse_solution(j.at("solution").get<std::string>());
  if (!type || !sol) throw ParseError(0, "bad event_type or solution");
  e.event_type = *type;
  e.solution = *sol;
  e.detected_at_second = j.at("detected_at").get<Second>();
  e.keyword_count = j.at("keyword_count").get<std::uint32_t>();
  e.trigger = trigger_from_json(j.at("trigger"), e.game_id);
  return e;
}

}  // namespace pulse

#pragma once

// Unified detection: the adaptive-window burst test runs directly on each
// event keyword's per-second series, so detection and recognition happen in
// one pass. The average floor uses the keyword's own trailing series, and a
// window additionally needs at least `min_keyword_count` matches in its second
// half. Nothing here reads the total series, which is what keeps the result
// stable when delivery is capped.

#include <string>
#include <vector>

#include "pulse/buckets.hpp"
#include "pulse/detect.hpp"

namespace pulse {

/// Burst test on one keyword series; nullopt when no ladder window qualifies.
inline std::optional<TriggerWindow> keyword_trigger(const std::string& game_id, EventType type, Second at_second,
                                                    const TimeBucketStore& store, const DetectorConfig& cfg) {
  auto sum = [&](Second a, Second b) { return store.keyword_rate(game_id, type, a, b); };
  auto trailing = [&](Second at) { return store.trailing(game_id, Channel::of(type), at); };
  auto enough = [&](const WindowTest& w) { return w.second_half >= cfg.min_keyword_count; };
  auto w = scan_ladder(at_second, store.origin(), cfg, sum, trailing, enough);
  if (!w) return std::nullopt;
  return make_trigger(game_id, at_second, *w);
}

inline std::vector<DetectedEvent> unified_step(const std::string& game_id, Second at_second,
                                               const TimeBucketStore& store, const DetectorConfig& cfg,
                                               CooldownState& cooldowns) {
  std::vector<DetectedEvent> out;
  for (auto type : kEventTypes) {
    auto trigger = keyword_trigger(game_id, type, at_second, store, cfg);
    if (!trigger || !cooldowns.ready(game_id, type, at_second, cfg.cooldown_s)) continue;
    cooldowns.mark(game_id, type, at_second);
    auto count = static_cast<std::uint32_t>(trigger->second_half);
    out.push_back(DetectedEvent{game_id, type, at_second, std::move(*trigger), count, Solution::Unified});
  }
  return out;
}

}  // namespace pulse

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace pulse {

/// The four recognized game events. Enumerator order is the significance
/// order used to break ties (touchdown first).
enum class EventType : std::uint8_t { Touchdown = 0, Interception = 1, FieldGoal = 2, Fumble = 3 };

inline constexpr std::size_t kEventTypeCount = 4;

inline constexpr std::array<EventType, kEventTypeCount> kEventTypes = {
    EventType::Touchdown, EventType::Interception, EventType::FieldGoal, EventType::Fumble};

constexpr std::size_t index_of(EventType t) noexcept { return static_cast<std::size_t>(t); }

constexpr std::string_view to_string(EventType t) noexcept {
  switch (t) {
    case EventType::Touchdown: return "touchdown";
    case EventType::Interception: return "interception";
    case EventType::FieldGoal: return "field_goal";
    case EventType::Fumble: return "fumble";
  }
  return "?";
}

/// Short labels matching the confusion-matrix headers.
constexpr std::string_view short_label(EventType t) noexcept {
  switch (t) {
    case EventType::Touchdown: return "TD";
    case EventType::Interception: return "INT";
    case EventType::FieldGoal: return "FG";
    case EventType::Fumble: return "FUM";
  }
  return "?";
}

constexpr std::optional<EventType> parse_event_type(std::string_view s) noexcept {
  for (auto t : kEventTypes) {
    if (s == to_string(t) || s == short_label(t)) return t;
  }
  if (s == "fieldgoal" || s == "field goal") return EventType::FieldGoal;
  return std::nullopt;
}

/// Per-type counter; a multiset of EventType.
struct EventCounts {
  std::array<std::uint32_t, kEventTypeCount> counts{};

  std::uint32_t& operator[](EventType t) noexcept { return counts[index_of(t)]; }
  std::uint32_t operator[](EventType t) const noexcept { return counts[index_of(t)]; }

  std::uint32_t total() const noexcept {
    std::uint32_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
  bool empty() const noexcept { return total() == 0; }

  friend bool operator==(const EventCounts&, const EventCounts&) = default;
};

}  // namespace pulse

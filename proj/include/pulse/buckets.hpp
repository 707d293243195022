#pragma once

// Per-second counters of game-related messages and event-keyword matches.
//
// Each game owns a ring of `horizon + skew` slots tagged with the second they
// hold; a slot whose tag does not match the queried second reads as zero, so
// gaps materialize as empty seconds without any clearing pass. Seconds before
// `origin` (stream start) always read as zero.

#include <algorithm>
#include <climits>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/error.hpp"
#include "pulse/event_type.hpp"

namespace pulse {

using Second = std::int64_t;

/// Selects the total series or one keyword series of a game.
struct Channel {
  std::optional<EventType> keyword;

  static constexpr Channel total() { return {}; }
  static constexpr Channel of(EventType t) { return {t}; }
};

struct BucketRecord {
  Second second = 0;
  std::uint64_t total = 0;
  EventCounts keywords;

  std::uint64_t value(Channel c) const { return c.keyword ? keywords[*c.keyword] : total; }
  friend bool operator==(const BucketRecord&, const BucketRecord&) = default;
};

/// Sum and length of a trailing span; mean = sum / seconds.
struct TrailingSum {
  std::uint64_t sum = 0;
  Second seconds = 0;

  double mean() const { return seconds <= 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(seconds); }
};

enum class IngestResult { Accepted, DroppedLate, ClampedFuture };

class TimeBucketStore {
 public:
  struct Options {
    Second horizon_s = 3600;
    Second horizon_avg_s = 600;
    Second skew_tolerance_s = 2;
    Second origin = 0;
  };

  struct Metrics {
    std::uint64_t late_dropped = 0;
    std::uint64_t future_clamped = 0;
    friend bool operator==(const Metrics&, const Metrics&) = default;
  };

  TimeBucketStore() : TimeBucketStore(Options{}) {}
  explicit TimeBucketStore(Options opts, const std::vector<std::string>& games = {})
      : opts_(opts), now_(opts.origin) {
    if (opts_.horizon_s <= 0 || opts_.horizon_avg_s <= 0 || opts_.skew_tolerance_s < 0)
      throw ConfigError("bucket store: horizons must be positive and skew non-negative");
    if (opts_.horizon_avg_s > opts_.horizon_s)
      throw ConfigError("bucket store: averaging horizon exceeds retention");
    for (auto& g : games) add_game(g);
  }

  const Options& options() const noexcept { return opts_; }
  const Metrics& metrics() const noexcept { return metrics_; }
  Second now() const noexcept { return now_; }
  Second origin() const noexcept { return opts_.origin; }

  void add_game(const std::string& game_id) {
    if (games_.count(game_id)) return;
    games_.emplace(game_id, std::vector<BucketRecord>(ring_size(), BucketRecord{kEmpty, 0, {}}));
  }
  bool has_game(const std::string& game_id) const { return games_.count(game_id) != 0; }
  std::vector<std::string> games() const {
    std::vector<std::string> ids;
    for (auto& [id, _] : games_) ids.push_back(id);
    return ids;
  }

  /// Moves the ingestion clock forward; never backwards.
  void advance_to(Second now) {
    if (now > now_) now_ = now;
  }

  /// Counts one message for `game_id`. Unknown games are registered.
  IngestResult ingest(Second second, const std::string& game_id, const EventCounts& events) {
    IngestResult result = IngestResult::Accepted;
    if (second < oldest_retained()) {
      ++metrics_.late_dropped;
      return IngestResult::DroppedLate;
    }
    if (second > now_ + opts_.skew_tolerance_s) {
      ++metrics_.future_clamped;
      second = now_;
      result = IngestResult::ClampedFuture;
    }
    auto it = games_.find(game_id);
    if (it == games_.end()) {
      add_game(game_id);
      it = games_.find(game_id);
    }
    auto& slot = slot_for(it->second, second);
    if (slot.second != second) slot = BucketRecord{second, 0, {}};
    slot.total += 1;
    for (auto t : kEventTypes) slot.keywords[t] += events[t];
    return result;
  }

  /// Counts one message for every game in `game_ids` with the same keyword matches.
  IngestResult ingest(Second second, std::span<const std::string> game_ids, const EventCounts& events) {
    IngestResult r = IngestResult::Accepted;
    bool first = true;
    for (auto& g : game_ids) {
      auto res = ingest(second, g, events);
      if (first) r = res;
      first = false;
    }
    return r;
  }

  BucketRecord record(const std::string& game_id, Second second) const {
    check_readable(second, second + 1);
    return read(series(game_id), second);
  }

  /// Exact sum over [from, to) of the chosen channel.
  std::uint64_t sum(const std::string& game_id, Channel c, Second from, Second to) const {
    if (to <= from) return 0;
    check_readable(from, to);
    const auto& ring = series(game_id);
    std::uint64_t n = 0;
    for (Second s = std::max(from, opts_.origin); s < to; ++s) n += read(ring, s).value(c);
    return n;
  }

  std::uint64_t rate(const std::string& game_id, Second from, Second to) const {
    return sum(game_id, Channel::total(), from, to);
  }
  std::uint64_t keyword_rate(const std::string& game_id, EventType t, Second from, Second to) const {
    return sum(game_id, Channel::of(t), from, to);
  }

  /// Trailing span [max(origin, at - horizon_avg), at).
  TrailingSum trailing(const std::string& game_id, Channel c, Second at) const {
    Second from = std::max(opts_.origin, at - opts_.horizon_avg_s);
    if (at <= from) return {};
    return {sum(game_id, c, from, at), at - from};
  }

  double running_average(const std::string& game_id, Second at) const {
    return trailing(game_id, Channel::total(), at).mean();
  }
  double keyword_running_average(const std::string& game_id, EventType t, Second at) const {
    return trailing(game_id, Channel::of(t), at).mean();
  }

  /// Records for [from, to), zero-filled, for charting and export.
  std::vector<BucketRecord> snapshot(const std::string& game_id, Second from, Second to) const {
    std::vector<BucketRecord> out;
    if (to <= from) return out;
    check_readable(from, to);
    const auto& ring = series(game_id);
    out.reserve(static_cast<std::size_t>(to - from));
    for (Second s = from; s < to; ++s) out.push_back(s < opts_.origin ? BucketRecord{s, 0, {}} : read(ring, s));
    return out;
  }

  /// Oldest second still held (seconds before origin read as zero regardless).
  Second oldest_retained() const noexcept { return now_ - opts_.horizon_s + 1; }
  /// One past the newest second that may hold data.
  Second retained_end() const noexcept { return now_ + opts_.skew_tolerance_s + 1; }

 private:
  static constexpr Second kEmpty = INT64_MIN;

  std::size_t ring_size() const { return static_cast<std::size_t>(opts_.horizon_s + opts_.skew_tolerance_s); }

  const std::vector<BucketRecord>& series(const std::string& game_id) const {
    auto it = games_.find(game_id);
    if (it == games_.end()) throw UnknownGame("unknown game '" + game_id + "'");
    return it->second;
  }

  std::size_t index(Second s) const {
    auto n = static_cast<Second>(ring_size());
    return static_cast<std::size_t>(((s - opts_.origin) % n + n) % n);
  }

  BucketRecord& slot_for(std::vector<BucketRecord>& ring, Second s) { return ring[index(s)]; }

  BucketRecord read(const std::vector<BucketRecord>& ring, Second s) const {
    if (s < opts_.origin) return {s, 0, {}};
    const auto& slot = ring[index(s)];
    return slot.second == s ? slot : BucketRecord{s, 0, {}};
  }

  void check_readable(Second from, Second to) const {
    bool before_origin_only = to <= opts_.origin;
    if (before_origin_only) return;
    Second lo = std::max(from, opts_.origin);
    if (lo < oldest_retained() || to > retained_end())
      throw OutOfRetention("seconds [" + std::to_string(from) + ", " + std::to_string(to) +
                           ") outside retention [" + std::to_string(oldest_retained()) + ", " +
                           std::to_string(retained_end()) + ")");
  }

  Options opts_;
  Second now_;
  Metrics metrics_;
  std::map<std::string, std::vector<BucketRecord>> games_;
};

inline nlohmann::json to_json(const BucketRecord& r) {
  nlohmann::json kw = nlohmann::json::object();
  for (auto t : kEventTypes) kw[std::string(to_string(t))] = r.keywords[t];
  return {{"second", r.second}, {"total", r.total}, {"keywords", kw}};
}

inline void write_snapshot_csv(std::ostream& out, std::span<const BucketRecord> records) {
  out << "second,total";
  for (auto t : kEventTypes) out << ',' << to_string(t);
  out << '\n';
  for (auto& r : records) {
    out << r.second << ',' << r.total;
    for (auto t : kEventTypes) out << ',' << r.keywords[t];
    out << '\n';
  }
}

inline nlohmann::json snapshot_json(const std::string& game_id, std::span<const BucketRecord> records) {
  nlohmann::json rows = nlohmann::json::array();
  for (auto& r : records) rows.push_back(to_json(r));
  return {{"game_id", game_id}, {"seconds", rows}};
}

}  // namespace pulse

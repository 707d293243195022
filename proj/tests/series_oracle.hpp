#pragma once

// Test-side reference for the burst rules, written over plain per-second
// arrays with exact integer arithmetic. The ratio threshold is passed as a
// fraction num/den so 1.7 is compared as 10*second >= 17*first.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pulse/buckets.hpp"
#include "pulse/event_type.hpp"

namespace oracle {

using pulse::Second;

struct Series {
  std::vector<std::uint64_t> total;
  std::array<std::vector<std::uint64_t>, 4> kw;

  explicit Series(Second n = 0) : total(static_cast<std::size_t>(n)) {
    for (auto& k : kw) k.assign(static_cast<std::size_t>(n), 0);
  }
  Second length() const { return static_cast<Second>(total.size()); }
};

struct Rules {
  std::vector<Second> ladder{10, 20, 30, 60};
  std::uint64_t ratio_num = 17, ratio_den = 10;
  std::uint64_t min_count = 3;
  Second cooldown = 60;
  Second avg_horizon = 600;
};

struct Hit {
  Second at;
  int type;  // EventType index
  Second window;
  bool operator==(const Hit&) const = default;
};

inline std::uint64_t range(const std::vector<std::uint64_t>& v, Second a, Second b) {
  std::uint64_t n = 0;
  for (Second s = std::max<Second>(a, 0); s < b && s < static_cast<Second>(v.size()); ++s) n += v[static_cast<std::size_t>(s)];
  return n;
}

// First qualifying ladder window for series `v` at second `at`.
inline std::optional<Second> burst(const std::vector<std::uint64_t>& v, Second at, const Rules& r,
                                   std::uint64_t min_second_half = 0) {
  for (Second w : r.ladder) {
    if (at - w < 0) continue;
    std::uint64_t first = range(v, at - w, at - w / 2), second = range(v, at - w / 2, at);
    if (first == 0 && second == 0) continue;
    if (second * r.ratio_den < r.ratio_num * first) continue;
    Second from = std::max<Second>(0, at - r.avg_horizon);
    std::uint64_t avg_sum = range(v, from, at);
    auto avg_len = static_cast<std::uint64_t>(at - from);
    if (!(second * avg_len > avg_sum * static_cast<std::uint64_t>(w / 2))) continue;
    if (second < min_second_half) continue;
    return w;
  }
  return std::nullopt;
}

// Steps t = 1 .. length (the step after the last second included).
inline std::vector<Hit> two_stage(const Series& s, const Rules& r) {
  std::vector<Hit> out;
  std::array<std::optional<Second>, 4> last{};
  for (Second t = 1; t <= s.length(); ++t) {
    auto w = burst(s.total, t, r);
    if (!w) continue;
    int best = -1;
    std::uint64_t best_n = 0;
    for (int k = 0; k < 4; ++k) {
      auto n = range(s.kw[k], t - *w / 2, t);
      if (n > best_n) best = k, best_n = n;
    }
    if (best < 0 || best_n < r.min_count) continue;
    if (last[best] && t - *last[best] < r.cooldown) continue;
    last[best] = t;
    out.push_back({t, best, *w});
  }
  return out;
}

inline std::vector<Hit> unified(const Series& s, const Rules& r) {
  std::vector<Hit> out;
  std::array<std::optional<Second>, 4> last{};
  for (Second t = 1; t <= s.length(); ++t)
    for (int k = 0; k < 4; ++k) {
      auto w = burst(s.kw[k], t, r, r.min_count);
      if (!w || (last[k] && t - *last[k] < r.cooldown)) continue;
      last[k] = t;
      out.push_back({t, k, *w});
    }
  return out;
}

// Loads a series into a store as individual messages: keyword matches ride on
// the first message of each second, so total[s] must be >= 1 when any keyword
// count is positive.
inline void load(pulse::TimeBucketStore& store, const std::string& game, const Series& s, Second upto) {
  for (Second t = 0; t < upto && t < s.length(); ++t) {
    store.advance_to(t);
    auto i = static_cast<std::size_t>(t);
    pulse::EventCounts first;
    for (auto type : pulse::kEventTypes) first[type] = static_cast<std::uint32_t>(s.kw[pulse::index_of(type)][i]);
    for (std::uint64_t n = 0; n < s.total[i]; ++n) store.ingest(t, game, n == 0 ? first : pulse::EventCounts{});
  }
}

// Random series with quiet stretches, baseline noise and bursts.
inline Series random_series(std::mt19937_64& rng, Second length, int bursts) {
  Series s(length);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double base = 0.5 + 6.0 * u(rng);
  for (Second t = 0; t < length; ++t) {
    auto i = static_cast<std::size_t>(t);
    s.total[i] = std::poisson_distribution<std::uint64_t>(base)(rng);
    if (u(rng) < 0.05 && s.total[i] > 0) s.kw[static_cast<std::size_t>(rng() % 4)][i] = 1;
  }
  for (int b = 0; b < bursts; ++b) {
    Second at = static_cast<Second>(rng() % static_cast<std::uint64_t>(length));
    int type = static_cast<int>(rng() % 4);
    double peak = 2.0 + 20.0 * u(rng);
    Second len = 10 + static_cast<Second>(rng() % 50);
    for (Second k = 0; k < len && at + k < length; ++k) {
      auto i = static_cast<std::size_t>(at + k);
      double rate = peak * (k < 8 ? (k + 1) / 8.0 : std::pow(0.5, (k - 7) / 20.0));
      auto extra = std::poisson_distribution<std::uint64_t>(rate)(rng);
      s.total[i] += extra;
      s.kw[static_cast<std::size_t>(type)][i] += std::binomial_distribution<std::uint64_t>(extra, 0.8)(rng);
      if (s.kw[static_cast<std::size_t>(type)][i] > 0 && s.total[i] == 0) s.total[i] = 1;
    }
  }
  return s;
}

}  // namespace oracle

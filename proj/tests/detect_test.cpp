#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pulse/detect.hpp"
#include "series_oracle.hpp"

namespace {

using pulse::DetectorConfig;
using pulse::EventType;
using pulse::Second;
using pulse::TimeBucketStore;

const std::string kGame = "G";

TimeBucketStore store_of(const oracle::Series& s) {
  TimeBucketStore store({}, {kGame});
  oracle::load(store, kGame, s, s.length());
  store.advance_to(s.length());
  return store;
}

// Flat 20/s for [0, 95), then `tail` tweets spread over [95, 100).
oracle::Series threshold_series(std::uint64_t tail) {
  oracle::Series s(100);
  for (Second t = 0; t < 95; ++t) s.total[static_cast<std::size_t>(t)] = 20;
  for (Second t = 95; t < 100; ++t) s.total[static_cast<std::size_t>(t)] = tail / 5 + (static_cast<std::uint64_t>(t - 95) < tail % 5);
  return s;
}

TEST(Detect, ExactThresholdTriggers) {
  auto store = store_of(threshold_series(170));
  auto trig = pulse::detect_step(kGame, 100, store, DetectorConfig{});
  ASSERT_TRUE(trig);
  EXPECT_EQ(trig->window_s, 10);
  EXPECT_EQ(trig->first_half, 100u);
  EXPECT_EQ(trig->second_half, 170u);
  EXPECT_DOUBLE_EQ(trig->ratio, 1.7);
  EXPECT_DOUBLE_EQ(trig->second_half_rate, 34.0);
}

TEST(Detect, JustBelowThresholdDoesNot) {
  auto store = store_of(threshold_series(169));
  EXPECT_FALSE(pulse::detect_step(kGame, 100, store, DetectorConfig{}));
}

TEST(Detect, AllZeroNoTrigger) {
  oracle::Series s(200);
  auto store = store_of(s);
  for (Second t = 1; t <= 200; ++t) EXPECT_FALSE(pulse::detect_step(kGame, t, store, DetectorConfig{}));
}

TEST(Detect, LadderEscalation) {
  // W=10: 35 vs 45 (about 1.29). W=20: 40 vs 80 (2.0).
  oracle::Series s(100);
  for (Second t = 0; t < 80; ++t) s.total[static_cast<std::size_t>(t)] = 1;
  for (Second t = 80; t < 90; ++t) s.total[static_cast<std::size_t>(t)] = t < 85 ? 2 : 6;
  for (Second t = 90; t < 100; ++t) s.total[static_cast<std::size_t>(t)] = t < 95 ? 7 : 9;
  auto store = store_of(s);
  auto trig = pulse::detect_step(kGame, 100, store, DetectorConfig{});
  ASSERT_TRUE(trig);
  EXPECT_EQ(trig->window_s, 20);
  EXPECT_DOUBLE_EQ(trig->ratio, 2.0);
  EXPECT_EQ(oracle::burst(s.total, 100, {}), std::optional<Second>(20));
}

TEST(Detect, EmptyFirstHalfNeedsFloor) {
  oracle::Series s(100);
  s.total[99] = 1;
  auto store = store_of(s);
  auto trig = pulse::detect_step(kGame, 100, store, DetectorConfig{});
  ASSERT_TRUE(trig);
  EXPECT_TRUE(trig->infinite_ratio());

  // Same spike after a busy past: the floor rejects it.
  oracle::Series busy(100);
  for (Second t = 0; t < 80; ++t) busy.total[static_cast<std::size_t>(t)] = 10;
  busy.total[99] = 1;
  auto store2 = store_of(busy);
  EXPECT_FALSE(pulse::detect_step(kGame, 100, store2, DetectorConfig{}));
}

TEST(Detect, WindowsBeforeOriginSkipped) {
  oracle::Series s(30);
  s.total[5] = 5;
  auto store = store_of(s);
  for (Second t = 1; t < 10; ++t) EXPECT_FALSE(pulse::detect_step(kGame, t, store, DetectorConfig{}));
  EXPECT_TRUE(pulse::detect_step(kGame, 10, store, DetectorConfig{}));
}

pulse::TriggerWindow trigger_at(Second at, Second window) {
  return {kGame, at, window, 2.0, 1.0, 1, 2};
}

oracle::Series keyword_series(std::array<std::uint64_t, 4> counts) {
  oracle::Series s(100);
  for (std::size_t k = 0; k < 4; ++k) s.kw[k][97] = counts[k];
  s.total[97] = 40;
  return s;
}

TEST(Recognize, ClearArgmax) {
  auto store = store_of(keyword_series({12, 1, 0, 0}));
  auto ev = pulse::recognize(trigger_at(100, 10), store, DetectorConfig{});
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->event_type, EventType::Touchdown);
  EXPECT_EQ(ev->keyword_count, 12u);
  EXPECT_EQ(ev->solution, pulse::Solution::TwoStage);
}

TEST(Recognize, NoKeywordsRejected) {
  auto store = store_of(keyword_series({0, 0, 0, 0}));
  EXPECT_FALSE(pulse::recognize(trigger_at(100, 10), store, DetectorConfig{}));
}

TEST(Recognize, BelowMinimumRejected) {
  auto store = store_of(keyword_series({0, 2, 0, 0}));
  EXPECT_FALSE(pulse::recognize(trigger_at(100, 10), store, DetectorConfig{}));
}

TEST(Recognize, TiesFollowSignificanceOrder) {
  // Independent tie-break: lowest type index among the maxima.
  for (auto counts : {std::array<std::uint64_t, 4>{5, 5, 0, 0}, {0, 4, 4, 4}, {0, 0, 3, 3}, {3, 3, 3, 3}}) {
    auto store = store_of(keyword_series(counts));
    auto ev = pulse::recognize(trigger_at(100, 10), store, DetectorConfig{});
    ASSERT_TRUE(ev);
    std::size_t expect = 0;
    for (std::size_t k = 1; k < 4; ++k)
      if (counts[k] > counts[expect]) expect = k;
    EXPECT_EQ(pulse::index_of(ev->event_type), expect);
  }
}

TEST(TwoStage, CooldownSuppressesRepeat) {
  oracle::Series s(200);
  for (Second t = 0; t < 200; ++t) s.total[static_cast<std::size_t>(t)] = 2;
  for (Second t = 100; t < 110; ++t) {
    s.total[static_cast<std::size_t>(t)] = 30;
    s.kw[0][static_cast<std::size_t>(t)] = 10;
  }
  auto store = store_of(s);
  pulse::CooldownState cd;
  DetectorConfig cfg;
  std::vector<pulse::DetectedEvent> all;
  std::vector<Second> raw;
  for (Second t = 1; t <= 200; ++t) {
    if (pulse::detect_step(kGame, t, store, cfg)) raw.push_back(t);
    for (auto& e : pulse::two_stage_step(kGame, t, store, cfg, cd)) all.push_back(e);
  }
  ASSERT_GT(raw.size(), 1u);  // the burst triggers on several consecutive seconds
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].detected_at_second, raw.front());
  EXPECT_EQ(all[0].event_type, EventType::Touchdown);
}

TEST(TwoStage, NoTriggerNoEvents) {
  oracle::Series s(100);
  auto store = store_of(s);
  pulse::CooldownState cd;
  EXPECT_TRUE(pulse::two_stage_step(kGame, 100, store, DetectorConfig{}, cd).empty());
}

TEST(Cooldown, BoundaryIsInclusive) {
  pulse::CooldownState cd;
  cd.mark("G", EventType::Touchdown, 100);
  EXPECT_FALSE(cd.ready("G", EventType::Touchdown, 159, 60));
  EXPECT_TRUE(cd.ready("G", EventType::Touchdown, 160, 60));
  EXPECT_TRUE(cd.ready("G", EventType::Fumble, 101, 60));
  EXPECT_TRUE(cd.ready("H", EventType::Touchdown, 101, 60));
}

std::vector<oracle::Hit> run_engine(const oracle::Series& s, const DetectorConfig& cfg) {
  auto store = store_of(s);
  pulse::CooldownState cd;
  std::vector<oracle::Hit> out;
  for (Second t = 1; t <= s.length(); ++t)
    for (auto& e : pulse::two_stage_step(kGame, t, store, cfg, cd))
      out.push_back({e.detected_at_second, static_cast<int>(pulse::index_of(e.event_type)), e.trigger.window_s});
  return out;
}

TEST(Properties, OracleEquivalence) {
  std::mt19937_64 rng(11);
  std::size_t nonempty = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto s = oracle::random_series(rng, 60 + static_cast<Second>(rng() % 600), static_cast<int>(rng() % 8));
    auto expect = oracle::two_stage(s, {});
    nonempty += !expect.empty();
    ASSERT_EQ(run_engine(s, {}), expect) << "trial " << trial;
  }
  EXPECT_GT(nonempty, 20u);
}

TEST(Properties, LadderMinimalityAndScaleInvariance) {
  std::mt19937_64 rng(12);
  DetectorConfig cfg;
  for (int trial = 0; trial < 30; ++trial) {
    auto s = oracle::random_series(rng, 300, 4);
    oracle::Series scaled = s;
    std::uint64_t k = 2 + rng() % 5;
    for (auto& v : scaled.total) v *= k;
    auto store = store_of(s);
    auto store_k = store_of(scaled);
    for (Second t = 1; t <= 300; ++t) {
      auto trig = pulse::detect_step(kGame, t, store, cfg);
      auto trig_k = pulse::detect_step(kGame, t, store_k, cfg);
      ASSERT_EQ(trig.has_value(), trig_k.has_value()) << "t=" << t;
      if (!trig) continue;
      EXPECT_EQ(trig->window_s, trig_k->window_s);
      EXPECT_GE(trig->ratio, cfg.ratio_threshold);
      auto sum = [&](Second a, Second b) { return store.rate(kGame, a, b); };
      auto trailing = [&](Second at) { return store.trailing(kGame, pulse::Channel::total(), at); };
      for (Second w : cfg.window_ladder) {
        if (w >= trig->window_s) break;
        if (t - w < 0) continue;
        EXPECT_FALSE(pulse::test_window(t, w, cfg, sum, trailing).passes());
      }
    }
  }
}

TEST(Properties, EmittedEventsRespectMinimumAndCooldown) {
  std::mt19937_64 rng(13);
  DetectorConfig cfg;
  for (int trial = 0; trial < 30; ++trial) {
    auto s = oracle::random_series(rng, 600, 6);
    auto store = store_of(s);
    pulse::CooldownState cd;
    std::map<EventType, Second> last;
    for (Second t = 1; t <= s.length(); ++t)
      for (auto& e : pulse::two_stage_step(kGame, t, store, cfg, cd)) {
        EXPECT_GE(e.keyword_count, cfg.min_keyword_count);
        if (last.count(e.event_type)) {
          EXPECT_GE(t - last[e.event_type], cfg.cooldown_s);
        }
        last[e.event_type] = t;
      }
  }
}

TEST(Config, Validation) {
  DetectorConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = [](auto mutate) {
    DetectorConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](auto& c) { c.window_ladder = {10, 10}; }).validate(), pulse::ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.window_ladder = {10, 15}; }).validate(), pulse::ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.window_ladder = {}; }).validate(), pulse::ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.ratio_threshold = 1.0; }).validate(), pulse::ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.cooldown_s = 30; }).validate(), pulse::ConfigError);
  EXPECT_THROW(bad([](auto& c) { c.avg_floor_multiplier = -1; }).validate(), pulse::ConfigError);
  EXPECT_EQ(ok.fixed(20).window_ladder, std::vector<Second>{20});
}

TEST(Config, JsonRoundTrip) {
  DetectorConfig c;
  c.ratio_threshold = 2.5;
  c.window_ladder = {8, 16};
  EXPECT_EQ(pulse::detector_config_from_json(pulse::to_json(c)), c);
  EXPECT_EQ(pulse::detector_config_from_json(nlohmann::json::object()), DetectorConfig{});
  EXPECT_THROW(pulse::detector_config_from_json({{"ratio_threshold", "x"}}), pulse::ConfigError);
}

TEST(Events, JsonRoundTrip) {
  pulse::DetectedEvent e{"G", EventType::FieldGoal, 120, {"G", 120, 10, INFINITY, 3.4, 0, 17}, 5,
                         pulse::Solution::Unified};
  auto j = pulse::to_json(e);
  EXPECT_EQ(j["trigger"]["ratio"], "inf");
  EXPECT_EQ(pulse::detected_event_from_json(nlohmann::json::parse(j.dump())), e);
  e.trigger.ratio = 1.75;
  EXPECT_EQ(pulse::detected_event_from_json(nlohmann::json::parse(pulse::to_json(e).dump())), e);
}

}  // namespace

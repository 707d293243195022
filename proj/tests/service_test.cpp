#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "pulse/bundled.hpp"
#include "pulse/eval.hpp"
#include "pulse/server.hpp"
#include "pulse/service.hpp"
#include "scenario_gen.hpp"

namespace fs = std::filesystem;

namespace {

using pulse::Second;
using pulse::Tweet;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("pulse-service-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_lexicons(const std::string& path, const std::vector<pulse::GameLexicon>& games) {
  std::ofstream out(path);
  pulse::save_lexicons(out, games);
}

// ---- response schema checks -----------------------------------------------------------------

void expect_event_record(const nlohmann::json& e) {
  ASSERT_TRUE(e.is_object());
  EXPECT_TRUE(e.at("id").is_number_unsigned());
  EXPECT_TRUE(e.at("game_id").is_string());
  EXPECT_TRUE(pulse::parse_event_type(e.at("event_type").get<std::string>()).has_value());
  EXPECT_TRUE(e.at("detected_at").is_number_integer());
  EXPECT_TRUE(pulse::parse_solution(e.at("solution").get<std::string>()).has_value());
  EXPECT_TRUE(e.at("trigger").at("window_s").is_number_integer());
}

void expect_games_schema(const nlohmann::json& j) {
  EXPECT_EQ(j.at("schema"), "pulse.games");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_TRUE(j.at("now").is_number_integer());
  std::vector<std::size_t> ranks;
  for (auto& g : j.at("games")) {
    EXPECT_TRUE(g.at("game_id").is_string());
    EXPECT_GE(g.at("post_rate").get<double>(), 0.0);
    ranks.push_back(g.at("rank").get<std::size_t>());
  }
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t i = 0; i < ranks.size(); ++i) EXPECT_EQ(ranks[i], i + 1);
}

void expect_timeline_schema(const nlohmann::json& j) {
  EXPECT_EQ(j.at("schema"), "pulse.timeline");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_TRUE(j.at("game_id").is_string());
  auto from = j.at("from").get<Second>();
  auto to = j.at("to").get<Second>();
  EXPECT_LE(from, to);
  ASSERT_EQ(j.at("seconds").size(), static_cast<std::size_t>(to - from));
  Second s = from;
  for (auto& r : j.at("seconds")) {
    EXPECT_EQ(r.at("second").get<Second>(), s++);
    EXPECT_TRUE(r.at("total").is_number_unsigned());
  }
  for (auto& e : j.at("events")) expect_event_record(e);
}

void expect_events_schema(const nlohmann::json& j) {
  EXPECT_EQ(j.at("schema"), "pulse.events");
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_TRUE(j.at("last_id").is_number_unsigned());
  std::uint64_t prev = 0;
  for (auto& e : j.at("events")) {
    expect_event_record(e);
    EXPECT_GT(e.at("id").get<std::uint64_t>(), prev);
    prev = e.at("id").get<std::uint64_t>();
  }
}

void expect_error(const pulse::Reply& r, int status) {
  EXPECT_EQ(r.status, status);
  EXPECT_TRUE(r.body.at("error").is_string());
}

// ---- fixtures -----------------------------------------------------------------------------------

pulse::ServiceConfig replay_config(const TempDir& dir, const std::string& trace, const std::string& games) {
  pulse::ServiceConfig cfg;
  cfg.source.kind = pulse::SourceConfig::Kind::Replay;
  cfg.source.path = trace;
  cfg.games_path = games;
  cfg.solutions = {pulse::Solution::TwoStage, pulse::Solution::Unified};
  cfg.tweet_log = dir.file("tweets.jsonl");
  cfg.event_log = dir.file("events.jsonl");
  return cfg;
}

pulse::PipelineOptions batch_options(const pulse::ServiceConfig& cfg) {
  pulse::PipelineOptions o;
  o.detector = cfg.detector;
  o.solutions = cfg.solutions;
  o.store = cfg.store;
  return o;
}

std::vector<pulse::DetectedEvent> run_service(const pulse::ServiceConfig& cfg) {
  pulse::Service svc(cfg);
  svc.start();
  svc.wait();
  return svc.events();
}

TEST(ServiceConfig, JsonRoundTripAndErrors) {
  auto j = nlohmann::json::parse(R"({
    "source": {"kind": "replay", "path": "t.jsonl", "speed": 2},
    "games": "games.jsonl",
    "solutions": ["unified", "two_stage"],
    "detector": {"window_ladder": [10, 20], "ratio_threshold": 1.5},
    "listen": "127.0.0.1:0",
    "tweet_log": "tw.jsonl", "event_log": "ev.jsonl", "hotness_window_s": 30})");
  auto cfg = pulse::service_config_from_json(j);
  EXPECT_EQ(cfg.source.speed, 2.0);
  EXPECT_EQ(cfg.solutions, (std::vector{pulse::Solution::Unified, pulse::Solution::TwoStage}));
  EXPECT_EQ(cfg.detector.window_ladder, (std::vector<Second>{10, 20}));
  EXPECT_EQ(cfg.hotness_window_s, 30);
  auto again = pulse::service_config_from_json(pulse::to_json(cfg));
  EXPECT_EQ(pulse::to_json(again), pulse::to_json(cfg));

  auto bad = [&](auto edit) {
    auto k = j;
    edit(k);
    EXPECT_THROW(pulse::service_config_from_json(k), pulse::ConfigError) << k.dump();
  };
  bad([](auto& k) { k["solutions"] = nlohmann::json::array(); });
  bad([](auto& k) { k["solutions"] = {"three_stage"}; });
  bad([](auto& k) { k["source"]["kind"] = "carrier-pigeon"; });
  bad([](auto& k) { k.erase("games"); });
  bad([](auto& k) { k["source"].erase("path"); });
  bad([](auto& k) { k["source"] = {{"kind", "external"}}; });
  bad([](auto& k) { k["hotness_window_s"] = 0; });
  bad([](auto& k) { k["detector"]["ratio_threshold"] = "high"; });
  bad([](auto& k) { k["store"] = {{"horizon_s", 300}}; });
}

TEST(Service, UnwritableLogIsConfigError) {
  TempDir dir;
  pulse::TweetTrace empty;
  pulse::write_trace(dir.file("t.jsonl"), empty);
  write_lexicons(dir.file("g.jsonl"), pulse::bundled::regular_season_lexicons());
  auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
  cfg.event_log = dir.file("no/such/dir/events.jsonl");
  EXPECT_THROW(pulse::Service{cfg}, pulse::ConfigError);
}

TEST(Service, EmptyTraceStartsAndStopsCleanly) {
  TempDir dir;
  pulse::write_trace(dir.file("t.jsonl"), {});
  write_lexicons(dir.file("g.jsonl"), pulse::bundled::regular_season_lexicons());
  auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
  pulse::Service svc(cfg);
  auto games = svc.games_reply();
  expect_games_schema(games.body);
  for (auto& g : games.body["games"]) EXPECT_EQ(g["post_rate"], 0.0);
  svc.start();
  svc.wait();
  EXPECT_TRUE(svc.finished());
  EXPECT_TRUE(svc.events().empty());
  EXPECT_TRUE(pulse::read_trace(cfg.tweet_log).tweets.empty());
  EXPECT_TRUE(pulse::read_event_log(cfg.event_log).empty());
}

// Live/batch equivalence over random traces, including a store so small that
// ingestion must wait for analysis.
TEST(Service, ReplayEqualsBatch) {
  for (std::uint64_t seed = 300; seed < 312; ++seed) {
    TempDir dir;
    auto sc = testgen::random_scenario(seed);
    auto trace = pulse::simulate(sc);
    pulse::write_trace(dir.file("t.jsonl"), trace);
    write_lexicons(dir.file("g.jsonl"), sc.lexicons());
    auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
    if (seed % 2) cfg.store.horizon_s = 640;
    auto expect = pulse::run_batch(trace, sc.lexicons(), batch_options(cfg));
    EXPECT_EQ(run_service(cfg), expect) << "seed " << seed;
    EXPECT_EQ(pulse::read_event_log(cfg.event_log), expect) << "seed " << seed;
  }
}

TEST(Service, LongDeliveryGapWithShortRetention) {
  TempDir dir;
  auto sc = pulse::bundled::regular_season(5);
  sc.duration_s = 900;
  std::erase_if(sc.events, [&](auto& e) { return e.true_second >= sc.duration_s; });
  auto trace = pulse::simulate(sc);
  // Shift the second half far into the future: a silent stretch of ~4000 s.
  for (auto& t : trace.tweets)
    if (t.delivered_second >= 450) t.delivered_second += 4000, t.created_second += 4000;
  pulse::write_trace(dir.file("t.jsonl"), trace);
  write_lexicons(dir.file("g.jsonl"), sc.lexicons());
  auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
  cfg.store.horizon_s = 700;
  EXPECT_EQ(run_service(cfg), pulse::run_batch(trace, sc.lexicons(), batch_options(cfg)));
}

TEST(Service, TweetLogReplaysToIdenticalEventLog) {
  TempDir dir;
  auto sc = pulse::bundled::regular_season(1216);
  pulse::write_scenario(dir.file("s.jsonl"), sc);
  pulse::ServiceConfig first;
  first.source.kind = pulse::SourceConfig::Kind::Simulate;
  first.source.path = dir.file("s.jsonl");
  first.solutions = {pulse::Solution::TwoStage, pulse::Solution::Unified};
  first.tweet_log = dir.file("tweets-1.jsonl");
  first.event_log = dir.file("events-1.jsonl");
  auto live = run_service(first);
  EXPECT_FALSE(live.empty());

  write_lexicons(dir.file("g.jsonl"), sc.lexicons());
  auto second = replay_config(dir, first.tweet_log, dir.file("g.jsonl"));
  second.tweet_log = dir.file("tweets-2.jsonl");
  second.event_log = dir.file("events-2.jsonl");
  run_service(second);
  EXPECT_EQ(slurp(first.event_log), slurp(second.event_log));
  EXPECT_EQ(slurp(first.tweet_log), slurp(second.tweet_log));
  EXPECT_EQ(pulse::read_trace(first.tweet_log).tweets, pulse::simulate(sc).tweets);
}

TEST(Service, PacedReplayMatchesBatch) {
  TempDir dir;
  auto sc = testgen::random_scenario(77);
  sc.duration_s = 120;
  std::erase_if(sc.events, [&](auto& e) { return e.true_second >= sc.duration_s; });
  auto trace = pulse::simulate(sc);
  pulse::write_trace(dir.file("t.jsonl"), trace);
  write_lexicons(dir.file("g.jsonl"), sc.lexicons());
  auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
  cfg.source.speed = 400;  // ~0.3 s of wall time
  auto begin = std::chrono::steady_clock::now();
  auto events = run_service(cfg);
  auto elapsed = std::chrono::steady_clock::now() - begin;
  EXPECT_EQ(events, pulse::run_batch(trace, sc.lexicons(), batch_options(cfg)));
  auto span = trace.tweets.back().delivered_second - trace.tweets.front().delivered_second;
  EXPECT_GE(elapsed, std::chrono::duration<double>(0.9 * static_cast<double>(span) / 400.0));
}

// Hands out a trace and lets the test look at the service between messages.
class ProbingSource : public pulse::StreamSource {
 public:
  ProbingSource(std::vector<Tweet> tweets, std::function<void(const Tweet&)> probe)
      : tweets_(std::move(tweets)), probe_(std::move(probe)) {}
  std::optional<Tweet> next() override {
    if (pos_ == tweets_.size()) return std::nullopt;
    probe_(tweets_[pos_]);
    return tweets_[pos_++];
  }

 private:
  std::vector<Tweet> tweets_;
  std::function<void(const Tweet&)> probe_;
  std::size_t pos_ = 0;
};

TEST(Service, OneSidedTrafficRanksThatGameFirst) {
  TempDir dir;
  const auto& m = pulse::bundled::regular_season_matchups();
  auto games = std::vector{pulse::bundled::nfl_lexicon(m[0]), pulse::bundled::nfl_lexicon(m[1])};
  write_lexicons(dir.file("g.jsonl"), games);
  pulse::Scenario sc;
  sc.seed = 4;
  sc.duration_s = 400;
  sc.games.push_back({games[0], 15.0, pulse::bundled::nfl_surface(m[0])});
  sc.noise = {0.0, 0.0, 0.0};
  auto trace = pulse::simulate(sc);

  auto cfg = replay_config(dir, "unused", dir.file("g.jsonl"));
  pulse::Service* svc = nullptr;
  std::size_t polls = 0;
  auto probe = [&](const Tweet& t) {
    if (t.id % 200 != 0 || t.delivered_second < 5) return;
    auto g = svc->games_reply().body;
    expect_games_schema(g);
    for (auto& row : g["games"]) {
      if (row["game_id"] == games[0].game_id()) {
        EXPECT_EQ(row["rank"], 1);
        EXPECT_GT(row["post_rate"].get<double>(), 0.0);
      } else {
        EXPECT_EQ(row["rank"], 2);
        EXPECT_EQ(row["post_rate"].get<double>(), 0.0);
      }
    }
    ++polls;
  };
  pulse::Service service(cfg, std::make_unique<ProbingSource>(trace.tweets, probe));
  svc = &service;
  service.start();
  service.wait();
  EXPECT_GT(polls, 10u);
}

pulse::TweetTrace single_touchdown_trace(const pulse::GameLexicon& lex, const pulse::SurfaceWords& surface) {
  pulse::Scenario sc;
  sc.seed = 12;
  sc.duration_s = 600;
  sc.games.push_back({lex, 12.0, surface});
  sc.events.push_back({lex.game_id(), pulse::EventType::Touchdown, 300, 30.0});
  sc.text.keyword_half_life_s = 7.0;
  return pulse::simulate(sc);
}

TEST(Endpoints, EventsTimelineAndErrors) {
  TempDir dir;
  const auto& m = pulse::bundled::regular_season_matchups()[2];
  auto lex = pulse::bundled::nfl_lexicon(m);
  auto trace = single_touchdown_trace(lex, pulse::bundled::nfl_surface(m));
  pulse::write_trace(dir.file("t.jsonl"), trace);
  write_lexicons(dir.file("g.jsonl"), {lex});
  auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
  cfg.solutions = {pulse::Solution::TwoStage};
  pulse::Service svc(cfg);
  svc.start();
  svc.wait();

  auto all = svc.events_reply(std::string("0")).body;
  expect_events_schema(all);
  ASSERT_EQ(all["events"].size(), 1u);
  EXPECT_EQ(all["events"][0]["event_type"], "touchdown");
  EXPECT_EQ(all["last_id"], 1);
  EXPECT_TRUE(svc.events_reply(std::string("1")).body["events"].empty());
  expect_events_schema(svc.events_reply(std::nullopt).body);
  expect_error(svc.events_reply(std::string("x")), 400);
  expect_error(svc.events_reply(std::string("-3")), 400);

  // Timeline against the batch pipeline's bucket store.
  pulse::Pipeline batch(pulse::Classifier({lex}), batch_options(cfg));
  for (auto& t : trace.tweets) batch.push(t);
  batch.finish();
  auto tl = svc.timeline_reply(lex.game_id(), std::string("100"), std::string("400"));
  ASSERT_EQ(tl.status, 200);
  expect_timeline_schema(tl.body);
  auto records = batch.store().snapshot(lex.game_id(), 100, 400);
  EXPECT_EQ(tl.body["seconds"], pulse::snapshot_json(lex.game_id(), records)["seconds"]);
  ASSERT_EQ(tl.body["events"].size(), 1u);
  auto defaults = svc.timeline_reply(lex.game_id(), std::nullopt, std::nullopt);
  expect_timeline_schema(defaults.body);
  EXPECT_EQ(defaults.body["to"].get<Second>() - defaults.body["from"].get<Second>(), 300);

  expect_error(svc.timeline_reply("nope", std::nullopt, std::nullopt), 404);
  expect_error(svc.timeline_reply(lex.game_id(), std::string("50"), std::string("10")), 400);
  expect_error(svc.timeline_reply(lex.game_id(), std::string("ten"), std::nullopt), 400);
  auto capped = svc.timeline_reply(lex.game_id(), std::string("-100000"), std::string("100000"));
  expect_timeline_schema(capped.body);
  EXPECT_EQ(capped.body["to"].get<Second>(), svc.clock());
}

TEST(Endpoints, HttpRoundTrip) {
  TempDir dir;
  const auto& m = pulse::bundled::regular_season_matchups()[2];
  auto lex = pulse::bundled::nfl_lexicon(m);
  pulse::write_trace(dir.file("t.jsonl"), single_touchdown_trace(lex, pulse::bundled::nfl_surface(m)));
  write_lexicons(dir.file("g.jsonl"), {lex});
  pulse::Service svc(replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl")));
  pulse::HttpFrontend http(svc, "127.0.0.1:0");
  svc.start();
  svc.wait();
  httplib::Client client("127.0.0.1", http.port());
  auto timed_get = [&](const std::string& path) {
    auto begin = std::chrono::steady_clock::now();
    auto res = client.Get(path);
    EXPECT_LT(std::chrono::steady_clock::now() - begin, std::chrono::milliseconds(100)) << path;
    return res;
  };
  auto games = timed_get("/games");
  ASSERT_TRUE(games);
  EXPECT_EQ(games->status, 200);
  EXPECT_EQ(games->get_header_value("Content-Type"), "application/json");
  expect_games_schema(nlohmann::json::parse(games->body));
  auto events = timed_get("/events?since=0");
  ASSERT_TRUE(events);
  expect_events_schema(nlohmann::json::parse(events->body));
  auto tl = timed_get("/games/" + lex.game_id() + "/timeline?from=250&to=350");
  ASSERT_TRUE(tl);
  EXPECT_EQ(tl->status, 200);
  expect_timeline_schema(nlohmann::json::parse(tl->body));
  EXPECT_EQ(timed_get("/games/XYZ/timeline")->status, 404);
  EXPECT_EQ(timed_get("/games/" + lex.game_id() + "/timeline?from=9&to=1")->status, 400);
  EXPECT_EQ(timed_get("/nothing")->status, 404);
}

// Fails a fixed number of times, then behaves.
class FlakySource : public pulse::StreamSource {
 public:
  FlakySource(std::vector<Tweet> tweets, int every, int failures)
      : tweets_(std::move(tweets)), every_(every), failures_left_(failures) {}
  std::optional<Tweet> next() override {
    if (broken_) throw pulse::SourceError("connection still down");
    if (failures_left_ > 0 && pos_ > 0 && pos_ % static_cast<std::size_t>(every_) == 0 && !just_failed_) {
      --failures_left_;
      broken_ = true;
      just_failed_ = true;
      throw pulse::SourceError("connection reset");
    }
    just_failed_ = false;
    if (pos_ == tweets_.size()) return std::nullopt;
    return tweets_[pos_++];
  }
  void reconnect() override {
    ++reconnects;
    broken_ = false;
  }
  int reconnects = 0;

 private:
  std::vector<Tweet> tweets_;
  int every_;
  int failures_left_;
  std::size_t pos_ = 0;
  bool broken_ = false;
  bool just_failed_ = false;
};

TEST(Sources, ReconnectsWithBackoff) {
  TempDir dir;
  auto sc = testgen::random_scenario(21);
  auto trace = pulse::simulate(sc);
  write_lexicons(dir.file("g.jsonl"), sc.lexicons());
  auto cfg = replay_config(dir, "unused", dir.file("g.jsonl"));
  cfg.source.backoff = std::chrono::milliseconds(1);
  cfg.source.max_retries = 2;
  auto flaky = std::make_unique<FlakySource>(trace.tweets, 500, 4);
  auto* raw = flaky.get();
  pulse::Service svc(cfg, std::move(flaky));
  svc.start();
  svc.wait();
  EXPECT_EQ(raw->reconnects, 4);
  EXPECT_EQ(svc.events(), pulse::run_batch(trace, sc.lexicons(), batch_options(cfg)));
}

class DeadSource : public pulse::StreamSource {
 public:
  std::optional<Tweet> next() override { throw pulse::SourceError("no route to host"); }
};

TEST(Sources, GivesUpAfterRetriesWithExitCode3) {
  TempDir dir;
  write_lexicons(dir.file("g.jsonl"), pulse::bundled::regular_season_lexicons());
  auto cfg = replay_config(dir, "unused", dir.file("g.jsonl"));
  cfg.source.backoff = std::chrono::milliseconds(1);
  cfg.source.max_retries = 3;
  {
    pulse::Service svc(cfg, std::make_unique<DeadSource>());
    svc.start();
    EXPECT_THROW(svc.wait(), pulse::SourceError);
  }
  pulse::AdapterRegistry::instance().add("dead", [](const nlohmann::json&) { return std::make_unique<DeadSource>(); });
  cfg.source.kind = pulse::SourceConfig::Kind::External;
  cfg.source.adapter = "dead";
  std::ostringstream log;
  EXPECT_EQ(pulse::run_service(cfg, nullptr, log), pulse::kExitSource);
  EXPECT_NE(log.str().find("no route to host"), std::string::npos);
}

TEST(Sources, ConfigErrorsExitWith2) {
  TempDir dir;
  pulse::ServiceConfig cfg;
  cfg.source.path = dir.file("missing.jsonl");
  cfg.games_path = dir.file("missing-games.jsonl");
  std::ostringstream log;
  EXPECT_EQ(pulse::run_service(cfg, nullptr, log), pulse::kExitConfig);
  cfg.source.kind = pulse::SourceConfig::Kind::External;
  cfg.source.adapter = "no-such-adapter";
  write_lexicons(cfg.games_path, pulse::bundled::regular_season_lexicons());
  EXPECT_EQ(pulse::run_service(cfg, nullptr, log), pulse::kExitConfig);
}

TEST(Sources, JsonlAdapterReadsTraceFiles) {
  TempDir dir;
  auto sc = testgen::random_scenario(8);
  auto trace = pulse::simulate(sc);
  pulse::write_trace(dir.file("t.jsonl"), trace);
  write_lexicons(dir.file("g.jsonl"), sc.lexicons());
  auto cfg = replay_config(dir, "unused", dir.file("g.jsonl"));
  cfg.source.kind = pulse::SourceConfig::Kind::External;
  cfg.source.adapter = "jsonl";
  cfg.source.adapter_options = {{"path", dir.file("t.jsonl")}};
  std::ostringstream log;
  EXPECT_EQ(pulse::run_service(cfg, nullptr, log), pulse::kExitOk);
  EXPECT_EQ(pulse::read_event_log(cfg.event_log), pulse::run_batch(trace, sc.lexicons(), batch_options(cfg)));

  pulse::JsonlFileSource src(nlohmann::json{{"path", dir.file("t.jsonl")}});
  ASSERT_TRUE(src.next());
  auto second = src.next();
  src.reconnect();
  EXPECT_EQ(src.next(), trace.tweets.at(2));
  EXPECT_EQ(second, trace.tweets.at(1));
}

TEST(Service, StopMidStreamShutsDownCleanly) {
  TempDir dir;
  auto sc = pulse::bundled::regular_season(1217);
  pulse::write_trace(dir.file("t.jsonl"), pulse::simulate(sc));
  write_lexicons(dir.file("g.jsonl"), sc.lexicons());
  auto cfg = replay_config(dir, dir.file("t.jsonl"), dir.file("g.jsonl"));
  cfg.source.speed = 50;
  pulse::Service svc(cfg);
  svc.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  svc.request_stop();
  svc.wait();
  auto logged = pulse::read_trace(cfg.tweet_log);
  EXPECT_FALSE(logged.tweets.empty());
  EXPECT_LT(logged.tweets.size(), pulse::simulate(sc).tweets.size());
  // Whatever was ingested was analysed exactly as the batch would.
  EXPECT_EQ(pulse::read_event_log(cfg.event_log), pulse::run_batch(logged, sc.lexicons(), batch_options(cfg)));
}

}  // namespace

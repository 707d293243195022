#pragma once

// Long-running pipeline: a stream source feeds one ingestion thread, which
// classifies messages, fills the bucket store and appends the tweet log. One
// analysis thread per game steps that game's detectors on the logical clock
// (delivered seconds), and a commit stage writes their events in the same
// order the batch pipeline produces. HTTP handlers read snapshots only.
//
// The ingestion clock never runs further ahead of the slowest analysis thread
// than bucket retention allows, so replay at any speed analyses the same data.
//
// Logs are JSONL with a meta header:
//   tweets: {"kind":"meta","schema":"pulse.trace","version":1}, then tweet records
//           (the trace format, so a tweet log replays as a trace)
//   events: {"kind":"meta","schema":"pulse.events","version":1}, then
//           {"kind":"event","id":1,"game_id":...,"event_type":"TD",...}

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/buckets.hpp"
#include "pulse/bundled.hpp"
#include "pulse/detect.hpp"
#include "pulse/engine.hpp"
#include "pulse/error.hpp"
#include "pulse/lexicon.hpp"
#include "pulse/simgen.hpp"
#include "pulse/trace.hpp"
#include "pulse/unified.hpp"

namespace pulse {

// ---- configuration ---------------------------------------------------------------

struct SourceConfig {
  enum class Kind { Replay, Simulate, External };

  Kind kind = Kind::Replay;
  std::string path;  // replay: trace file; simulate: scenario file or "bundled:<name>"
  double speed = 0.0;  // delivered seconds per wall second; 0 = as fast as possible
  std::string adapter;  // external only
  nlohmann::json adapter_options = nlohmann::json::object();
  int max_retries = 5;
  std::chrono::milliseconds backoff{200};  // doubles per consecutive failure, capped at 30 s
};

struct ServiceConfig {
  SourceConfig source;
  std::string games_path;  // lexicon file; simulate falls back to the scenario's games
  DetectorConfig detector;
  std::vector<Solution> solutions{Solution::TwoStage};
  TimeBucketStore::Options store;
  std::string listen;  // "host:port"; empty disables HTTP, port 0 picks a free port
  std::string tweet_log;
  std::string event_log;
  Second hotness_window_s = 60;

  void validate() const {
    detector.validate();
    if (solutions.empty()) throw ConfigError("service: at least one solution must be enabled");
    if (hotness_window_s <= 0) throw ConfigError("service: hotness_window_s must be positive");
    if (source.speed < 0) throw ConfigError("service: source speed must be >= 0");
    if (source.max_retries < 0) throw ConfigError("service: max_retries must be >= 0");
    if (source.kind != SourceConfig::Kind::External && source.path.empty())
      throw ConfigError("service: source path is required");
    if (source.kind == SourceConfig::Kind::External && source.adapter.empty())
      throw ConfigError("service: external source needs an adapter name");
    if (source.kind != SourceConfig::Kind::Simulate && games_path.empty())
      throw ConfigError("service: games (lexicon file) is required");
    Second read_span = std::max(store.horizon_avg_s, detector.max_window());
    if (store.horizon_s <= read_span) throw ConfigError("service: store horizon must exceed the analysis read span");
  }
};

inline std::string_view to_string(SourceConfig::Kind k) {
  switch (k) {
    case SourceConfig::Kind::Replay: return "replay";
    case SourceConfig::Kind::Simulate: return "simulate";
    case SourceConfig::Kind::External: return "external";
  }
  return "?";
}

inline ServiceConfig service_config_from_json(const nlohmann::json& j) {
  try {
    ServiceConfig c;
    const auto& src = j.at("source");
    auto kind = src.at("kind").get<std::string>();
    if (kind == "replay") c.source.kind = SourceConfig::Kind::Replay;
    else if (kind == "simulate") c.source.kind = SourceConfig::Kind::Simulate;
    else if (kind == "external") c.source.kind = SourceConfig::Kind::External;
    else throw ConfigError("service: unknown source kind '" + kind + "'");
    c.source.path = src.value("path", std::string{});
    if (c.source.kind == SourceConfig::Kind::Simulate && src.contains("scenario"))
      c.source.path = src.at("scenario").get<std::string>();
    c.source.speed = src.value("speed", 0.0);
    c.source.adapter = src.value("adapter", std::string{});
    c.source.adapter_options = src.value("options", nlohmann::json::object());
    c.source.max_retries = src.value("max_retries", 5);
    c.source.backoff = std::chrono::milliseconds(src.value("backoff_ms", 200));
    c.games_path = j.value("games", std::string{});
    if (j.contains("detector")) c.detector = detector_config_from_json(j.at("detector"));
    if (j.contains("solutions")) {
      c.solutions.clear();
      for (auto& s : j.at("solutions")) {
        auto sol = parse_solution(s.get<std::string>());
        if (!sol) throw ConfigError("service: unknown solution '" + s.get<std::string>() + "'");
        if (std::find(c.solutions.begin(), c.solutions.end(), *sol) == c.solutions.end()) c.solutions.push_back(*sol);
      }
    }
    if (j.contains("store")) {
      const auto& st = j.at("store");
      c.store.horizon_s = st.value("horizon_s", c.store.horizon_s);
      c.store.horizon_avg_s = st.value("horizon_avg_s", c.store.horizon_avg_s);
      c.store.skew_tolerance_s = st.value("skew_tolerance_s", c.store.skew_tolerance_s);
      c.store.origin = st.value("origin", c.store.origin);
    }
    c.listen = j.value("listen", std::string{});
    c.tweet_log = j.value("tweet_log", std::string{});
    c.event_log = j.value("event_log", std::string{});
    c.hotness_window_s = j.value("hotness_window_s", c.hotness_window_s);
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("service config: ") + e.what());
  }
}

inline nlohmann::json to_json(const ServiceConfig& c) {
  nlohmann::json src = {{"kind", std::string(to_string(c.source.kind))},
                        {"speed", c.source.speed},
                        {"max_retries", c.source.max_retries},
                        {"backoff_ms", c.source.backoff.count()}};
  if (!c.source.path.empty()) src["path"] = c.source.path;
  if (!c.source.adapter.empty()) {
    src["adapter"] = c.source.adapter;
    src["options"] = c.source.adapter_options;
  }
  nlohmann::json sols = nlohmann::json::array();
  for (auto s : c.solutions) sols.push_back(std::string(to_string(s)));
  return {{"source", src},
          {"games", c.games_path},
          {"detector", to_json(c.detector)},
          {"solutions", sols},
          {"store",
           {{"horizon_s", c.store.horizon_s},
            {"horizon_avg_s", c.store.horizon_avg_s},
            {"skew_tolerance_s", c.store.skew_tolerance_s},
            {"origin", c.store.origin}}},
          {"listen", c.listen},
          {"tweet_log", c.tweet_log},
          {"event_log", c.event_log},
          {"hotness_window_s", c.hotness_window_s}};
}

inline ServiceConfig load_service_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open service config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("service config: ") + e.what());
  }
  return service_config_from_json(j);
}

// ---- sources -----------------------------------------------------------------------

/// Delivers timestamped messages in delivery order. next() returns nullopt at
/// end of stream and throws SourceError on a broken connection, after which
/// the service calls reconnect() (with backoff) before reading again.
class StreamSource {
 public:
  virtual ~StreamSource() = default;
  virtual std::optional<Tweet> next() = 0;
  virtual void reconnect() {}
};

/// A finished trace held in memory.
class TraceSource : public StreamSource {
 public:
  explicit TraceSource(std::vector<Tweet> tweets) : tweets_(std::move(tweets)) {}

  std::optional<Tweet> next() override {
    if (pos_ == tweets_.size()) return std::nullopt;
    return tweets_[pos_++];
  }

 private:
  std::vector<Tweet> tweets_;
  std::size_t pos_ = 0;
};

/// Tweet records (trace JSONL) read from a file or FIFO named by options.path.
/// Reconnecting reopens the file and skips what was already delivered.
class JsonlFileSource : public StreamSource {
 public:
  explicit JsonlFileSource(const nlohmann::json& options) {
    if (!options.contains("path")) throw ConfigError("jsonl adapter: options.path is required");
    path_ = options.at("path").get<std::string>();
    reconnect();
  }

  std::optional<Tweet> next() override {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw SourceError("jsonl adapter: line " + std::to_string(line_) + ": " + e.what());
      }
      if (j.value("kind", std::string("tweet")) != "tweet") continue;
      ++delivered_;
      return tweet_from_json(j);
    }
    if (in_.bad()) throw SourceError("jsonl adapter: read error on " + path_);
    return std::nullopt;
  }

  void reconnect() override {
    in_ = std::ifstream(path_);
    if (!in_) throw SourceError("jsonl adapter: cannot open " + path_);
    line_ = 0;
    std::size_t seen = delivered_;
    delivered_ = 0;
    while (delivered_ < seen && next()) {
    }
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_ = 0;
  std::size_t delivered_ = 0;
};

using AdapterFactory = std::function<std::unique_ptr<StreamSource>(const nlohmann::json& options)>;

/// Named external adapters. "jsonl" is built in; a live network client would
/// register itself here (track keywords, emit one message per delivery).
class AdapterRegistry {
 public:
  static AdapterRegistry& instance() {
    static AdapterRegistry registry;
    return registry;
  }

  void add(const std::string& name, AdapterFactory factory) {
    std::lock_guard lock(mutex_);
    factories_[name] = std::move(factory);
  }

  std::unique_ptr<StreamSource> make(const std::string& name, const nlohmann::json& options) const {
    AdapterFactory f;
    {
      std::lock_guard lock(mutex_);
      auto it = factories_.find(name);
      if (it == factories_.end()) throw ConfigError("unknown source adapter '" + name + "'");
      f = it->second;
    }
    return f(options);
  }

  std::vector<std::string> names() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (auto& [name, _] : factories_) out.push_back(name);
    return out;
  }

 private:
  AdapterRegistry() {
    factories_["jsonl"] = [](const nlohmann::json& o) { return std::make_unique<JsonlFileSource>(o); };
  }

  mutable std::mutex mutex_;
  std::map<std::string, AdapterFactory> factories_;
};

/// Loads `path` as a scenario file, or a bundled scenario as "bundled:<name>".
inline Scenario resolve_scenario(const std::string& path) {
  constexpr std::string_view prefix = "bundled:";
  if (std::string_view(path).substr(0, prefix.size()) == prefix) {
    auto sc = bundled::scenario_by_name(std::string_view(path).substr(prefix.size()));
    if (!sc) throw ConfigError("unknown bundled scenario '" + path + "'");
    return *sc;
  }
  return load_scenario(path);
}

// ---- HTTP-independent endpoint replies ----------------------------------------------------

struct Reply {
  int status = 200;
  nlohmann::json body;
};

inline Reply error_reply(int status, const std::string& message) { return {status, {{"error", message}}}; }

inline std::optional<Second> parse_second(const std::string& s) {
  Second v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// ---- the service -----------------------------------------------------------------------------

struct HotnessReading {
  std::string game_id;
  double post_rate = 0.0;  // game-related messages per second over the hotness window
  std::size_t rank = 0;    // 1 = hottest; ties by game id
};

class Service {
 public:
  /// Throws ConfigError. A null `source` is built from the configuration.
  explicit Service(ServiceConfig cfg, std::unique_ptr<StreamSource> source = nullptr)
      : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::vector<GameLexicon> games;
    if (cfg_.source.kind == SourceConfig::Kind::Simulate) {
      auto sc = resolve_scenario(cfg_.source.path);
      games = sc.lexicons();
      if (!source) source = std::make_unique<TraceSource>(simulate(sc).tweets);
    } else if (!source && cfg_.source.kind == SourceConfig::Kind::Replay) {
      source = std::make_unique<TraceSource>(read_trace(cfg_.source.path).tweets);
    } else if (!source) {
      source = AdapterRegistry::instance().make(cfg_.source.adapter, cfg_.source.adapter_options);
    }
    if (!cfg_.games_path.empty()) games = load_lexicons(cfg_.games_path);
    if (games.empty()) throw ConfigError("service: no games configured");
    source_ = std::move(source);
    classifier_ = Classifier(games);
    store_ = TimeBucketStore(cfg_.store);
    for (auto& g : games) {
      store_.add_game(g.game_id());
      auto w = std::make_unique<Worker>();
      w->game_id = g.game_id();
      w->next_step = cfg_.store.origin + 1;
      w->done_through = cfg_.store.origin;
      workers_.push_back(std::move(w));
    }
    std::sort(workers_.begin(), workers_.end(), [](auto& a, auto& b) { return a->game_id < b->game_id; });
    min_done_ = cfg_.store.origin;
    clock_ = cfg_.store.origin;
    lag_budget_ = cfg_.store.horizon_s - std::max(cfg_.store.horizon_avg_s, cfg_.detector.max_window());
    open_logs();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ~Service() {
    request_stop();
    join();
  }

  const ServiceConfig& config() const noexcept { return cfg_; }

  void start() {
    if (started_.exchange(true)) return;
    for (auto& w : workers_) w->thread = std::thread([this, wp = w.get()] { analyse(*wp); });
    ingest_thread_ = std::thread([this] { ingest(); });
  }

  /// Stops reading the source; what was ingested is still analysed and logged.
  void request_stop() {
    stop_.store(true);
    std::lock_guard lock(sync_);
    cv_.notify_all();
  }

  /// Blocks until the source is exhausted (or stopped) and every step ran.
  /// Rethrows a source failure that outlived its retries.
  void wait() {
    join();
    if (failure_) std::rethrow_exception(failure_);
  }

  bool finished() const {
    std::lock_guard lock(sync_);
    return finished_;
  }

  /// Seconds below this have been fully ingested.
  Second clock() const {
    std::lock_guard lock(sync_);
    return clock_;
  }

  std::vector<DetectedEvent> events() const {
    std::lock_guard lock(events_mutex_);
    return events_;
  }

  std::vector<HotnessReading> hotness() const {
    Second to = clock();
    Second from = std::max(cfg_.store.origin, to - cfg_.hotness_window_s);
    std::vector<HotnessReading> out;
    {
      std::shared_lock lock(store_mutex_);
      for (auto& w : workers_) {
        double rate = 0.0;
        if (to > from) {
          Second lo = std::max(from, store_.oldest_retained());
          rate = static_cast<double>(store_.rate(w->game_id, lo, to)) / static_cast<double>(to - from);
        }
        out.push_back({w->game_id, rate, 0});
      }
    }
    std::vector<std::size_t> order(out.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return out[a].post_rate > out[b].post_rate; });
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]].rank = r + 1;
    return out;
  }

  // GET /games
  Reply games_reply() const {
    nlohmann::json games = nlohmann::json::array();
    for (auto& h : hotness()) games.push_back({{"game_id", h.game_id}, {"post_rate", h.post_rate}, {"rank", h.rank}});
    return {200,
            {{"schema", "pulse.games"},
             {"version", 1},
             {"now", clock()},
             {"hotness_window_s", cfg_.hotness_window_s},
             {"games", games}}};
  }

  // GET /games/{id}/timeline?from&to, half-open [from, to); defaults to the
  // last 300 seconds and is capped to what the store retains.
  Reply timeline_reply(const std::string& game_id, const std::optional<std::string>& from_arg,
                       const std::optional<std::string>& to_arg) const {
    if (!std::any_of(workers_.begin(), workers_.end(), [&](auto& w) { return w->game_id == game_id; }))
      return error_reply(404, "unknown game '" + game_id + "'");
    Second now = clock();
    std::optional<Second> from = from_arg ? parse_second(*from_arg) : std::optional<Second>(now - 300);
    std::optional<Second> to = to_arg ? parse_second(*to_arg) : std::optional<Second>(now);
    if (!from || !to) return error_reply(400, "from and to must be integer seconds");
    if (*from > *to) return error_reply(400, "from must not exceed to");
    nlohmann::json body;
    {
      std::shared_lock lock(store_mutex_);
      Second lo = std::max(*from, store_.oldest_retained());
      Second hi = std::min(*to, now);
      if (hi < lo) hi = lo;
      auto records = store_.snapshot(game_id, lo, hi);
      body = snapshot_json(game_id, records);
      body["from"] = lo;
      body["to"] = hi;
    }
    nlohmann::json evs = nlohmann::json::array();
    {
      std::lock_guard lock(events_mutex_);
      for (std::size_t i = 0; i < events_.size(); ++i)
        if (events_[i].game_id == game_id && events_[i].detected_at_second >= body["from"].get<Second>() &&
            events_[i].detected_at_second < body["to"].get<Second>())
          evs.push_back(event_record(i));
    }
    body["schema"] = "pulse.timeline";
    body["version"] = 1;
    body["events"] = evs;
    return {200, body};
  }

  // GET /events?since=<id>: records with id > since, oldest first.
  Reply events_reply(const std::optional<std::string>& since_arg) const {
    std::uint64_t since = 0;
    if (since_arg) {
      auto v = parse_second(*since_arg);
      if (!v || *v < 0) return error_reply(400, "since must be a non-negative integer");
      since = static_cast<std::uint64_t>(*v);
    }
    nlohmann::json evs = nlohmann::json::array();
    std::uint64_t last = 0;
    {
      std::lock_guard lock(events_mutex_);
      for (std::size_t i = static_cast<std::size_t>(std::min<std::uint64_t>(since, events_.size())); i < events_.size(); ++i)
        evs.push_back(event_record(i));
      last = events_.size();
    }
    return {200, {{"schema", "pulse.events"}, {"version", 1}, {"last_id", last}, {"events", evs}}};
  }

  /// Bucket records of one game for [from, to), for export and comparison.
  std::vector<BucketRecord> snapshot(const std::string& game_id, Second from, Second to) const {
    std::shared_lock lock(store_mutex_);
    return store_.snapshot(game_id, from, to);
  }

 private:
  struct Worker {
    std::string game_id;
    std::map<Solution, CooldownState> cooldowns;
    Second next_step = 0;
    Second done_through = 0;  // guarded by sync_
    std::vector<DetectedEvent> pending;  // guarded by sync_
    std::thread thread;
  };

  static constexpr Second kCommitBatch = 64;

  nlohmann::json event_record(std::size_t i) const {
    auto j = to_json(events_[i]);
    j["id"] = i + 1;
    return j;
  }

  void open_logs() {
    auto open = [](const std::string& path, std::ofstream& out, std::string_view schema) {
      if (path.empty()) return;
      out.open(path, std::ios::trunc);
      if (!out) throw ConfigError("cannot write " + path);
      out << nlohmann::json{{"kind", "meta"}, {"schema", schema}, {"version", 1}}.dump() << '\n';
    };
    open(cfg_.tweet_log, tweet_log_, "pulse.trace");
    open(cfg_.event_log, event_log_, "pulse.events");
  }

  void join() {
    if (ingest_thread_.joinable()) ingest_thread_.join();
    for (auto& w : workers_)
      if (w->thread.joinable()) w->thread.join();
  }

  std::optional<Tweet> read_with_retries() {
    int failures = 0;
    for (;;) {
      try {
        return source_->next();
      } catch (const SourceError& e) {
        if (failures >= cfg_.source.max_retries) throw;
        auto delay = std::min<std::chrono::milliseconds>(cfg_.source.backoff * (1LL << std::min(failures, 16)),
                                                         std::chrono::seconds(30));
        ++failures;
        std::cerr << "pulse: source error (" << e.what() << "), retry " << failures << " in " << delay.count()
                  << " ms\n";
        if (!sleep_for(delay)) return std::nullopt;
        try {
          source_->reconnect();
        } catch (const SourceError& re) {
          std::cerr << "pulse: reconnect failed: " << re.what() << '\n';
        }
      }
    }
  }

  // Sleeps unless a stop is requested; false when stopped.
  bool sleep_for(std::chrono::milliseconds d) {
    std::unique_lock lock(sync_);
    return !cv_.wait_for(lock, d, [&] { return stop_.load(); });
  }

  // Moves the ingestion clock to `target`, waiting for analysis whenever the
  // store would otherwise overwrite seconds a pending step still reads.
  void advance_clock(Second target) {
    std::unique_lock lock(sync_);
    while (clock_ < target) {
      cv_.wait(lock, [&] { return min_done_ + lag_budget_ > clock_ || stop_.load(); });
      if (stop_.load() && min_done_ + lag_budget_ <= clock_) return;
      Second next = std::min(target, min_done_ + lag_budget_);
      {
        std::unique_lock store_lock(store_mutex_);
        store_.advance_to(next);
      }
      clock_ = next;
      watermark_ = next;
      cv_.notify_all();
    }
  }

  // Holds a message until its delivered second is due on the wall clock;
  // false when stopped while waiting.
  bool pace(Second delivered) {
    using Clock = std::chrono::steady_clock;
    if (!pace_start_) pace_start_ = {Clock::now(), delivered};
    auto offset = std::chrono::duration<double>(static_cast<double>(delivered - pace_start_->second) / cfg_.source.speed);
    auto due = pace_start_->first + std::chrono::duration_cast<Clock::duration>(offset);
    std::unique_lock lock(sync_);
    return !cv_.wait_until(lock, due, [&] { return stop_.load(); });
  }

  void ingest() {
    std::optional<Second> last;
    try {
      while (!stop_.load()) {
        auto tweet = read_with_retries();
        if (!tweet) break;
        Second d = tweet->delivered_second;
        if (cfg_.source.speed > 0 && !pace(d)) break;
        advance_clock(d);
        if (stop_.load() && clock_locked() < d) break;
        auto hits = classifier_.classify(tweet->text, tweet->device);
        {
          std::unique_lock store_lock(store_mutex_);
          for (auto& hit : hits) store_.ingest(d, hit.game_id, hit.events);
        }
        if (tweet_log_.is_open()) tweet_log_ << to_json(*tweet).dump() << '\n';
        last = std::max(last.value_or(d), d);
      }
    } catch (...) {
      failure_ = std::current_exception();
    }
    if (tweet_log_.is_open()) tweet_log_.flush();
    std::lock_guard lock(sync_);
    // The step after the last delivered second reads only complete data.
    if (last && !failure_) watermark_ = std::max(watermark_, *last + 1);
    input_done_ = true;
    cv_.notify_all();
  }

  Second clock_locked() {
    std::lock_guard lock(sync_);
    return clock_;
  }

  void analyse(Worker& w) {
    for (;;) {
      Second target = 0;
      {
        std::unique_lock lock(sync_);
        cv_.wait(lock, [&] { return watermark_ >= w.next_step || input_done_; });
        if (watermark_ < w.next_step) break;
        target = std::min(watermark_, w.next_step + kCommitBatch - 1);
      }
      std::vector<DetectedEvent> made;
      for (; w.next_step <= target; ++w.next_step) {
        std::shared_lock store_lock(store_mutex_);
        for (auto sol : cfg_.solutions) {
          auto& cd = w.cooldowns[sol];
          auto evs = sol == Solution::TwoStage ? two_stage_step(w.game_id, w.next_step, store_, cfg_.detector, cd)
                                               : unified_step(w.game_id, w.next_step, store_, cfg_.detector, cd);
          for (auto& e : evs) made.push_back(std::move(e));
        }
      }
      std::lock_guard lock(sync_);
      w.done_through = target;
      for (auto& e : made) w.pending.push_back(std::move(e));
      commit();
    }
    std::lock_guard lock(sync_);
    if (std::all_of(workers_.begin(), workers_.end(), [&](auto& x) { return x->next_step > watermark_; }) &&
        input_done_ && !finished_) {
      commit();
      if (event_log_.is_open()) event_log_.flush();
      finished_ = true;
    }
  }

  // Publishes every pending event whose second all games have finished, in
  // batch order: by second, then game id, then production order. sync_ held.
  void commit() {
    Second done = std::numeric_limits<Second>::max();
    for (auto& w : workers_) done = std::min(done, w->done_through);
    min_done_ = done;
    struct Item {
      Second at;
      std::size_t game;
      std::size_t seq;
      DetectedEvent* event;
    };
    std::vector<Item> ready;
    for (std::size_t g = 0; g < workers_.size(); ++g) {
      auto& p = workers_[g]->pending;
      for (std::size_t i = 0; i < p.size() && p[i].detected_at_second <= done; ++i)
        ready.push_back({p[i].detected_at_second, g, i, &p[i]});
    }
    std::sort(ready.begin(), ready.end(),
              [](auto& a, auto& b) { return std::tie(a.at, a.game, a.seq) < std::tie(b.at, b.game, b.seq); });
    if (!ready.empty()) {
      std::lock_guard lock(events_mutex_);
      for (auto& it : ready) {
        events_.push_back(std::move(*it.event));
        if (event_log_.is_open()) {
          auto j = to_json(events_.back());
          j["kind"] = "event";
          j["id"] = events_.size();
          event_log_ << j.dump() << '\n';
        }
      }
      if (event_log_.is_open()) event_log_.flush();
    }
    for (auto& w : workers_) {
      auto& p = w->pending;
      p.erase(p.begin(), std::find_if(p.begin(), p.end(), [&](auto& e) { return e.detected_at_second > done; }));
    }
    cv_.notify_all();
  }

  ServiceConfig cfg_;
  std::unique_ptr<StreamSource> source_;
  Classifier classifier_;

  mutable std::shared_mutex store_mutex_;
  TimeBucketStore store_;

  mutable std::mutex sync_;
  std::condition_variable cv_;
  Second clock_ = 0;
  Second watermark_ = 0;  // steps <= watermark_ may run
  Second min_done_ = 0;
  Second lag_budget_ = 0;
  bool input_done_ = false;
  bool finished_ = false;
  std::vector<std::unique_ptr<Worker>> workers_;

  mutable std::mutex events_mutex_;
  std::vector<DetectedEvent> events_;

  std::ofstream tweet_log_;
  std::ofstream event_log_;
  std::optional<std::pair<std::chrono::steady_clock::time_point, Second>> pace_start_;
  std::atomic<bool> stop_{false};
  std::atomic<bool> started_{false};
  std::exception_ptr failure_;
  std::thread ingest_thread_;
};

/// Reads an event log written by the service.
inline std::vector<DetectedEvent> read_event_log(std::istream& in) {
  std::vector<DetectedEvent> out;
  for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) {
    auto kind = j.value("kind", std::string("event"));
    if (kind == "event") out.push_back(detected_event_from_json(j));
    else if (kind != "meta") throw ParseError(0, "unknown record kind '" + kind + "'");
  });
  return out;
}

inline std::vector<DetectedEvent> read_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_event_log(in);
}

}  // namespace pulse

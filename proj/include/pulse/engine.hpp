#pragma once

// Per-second analysis over a bucket store, and the batch pipeline that feeds
// a trace through classification, bucketing and analysis.
//
// Analysis is clocked by delivery time. The step for second t reads only
// seconds < t, so it may run as soon as a message delivered at or after t has
// been seen (or the stream has ended). A trace whose last delivery is at L is
// analysed at t = origin+1 .. L+1.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pulse/buckets.hpp"
#include "pulse/detect.hpp"
#include "pulse/lexicon.hpp"
#include "pulse/trace.hpp"
#include "pulse/unified.hpp"

namespace pulse {

class DetectionEngine {
 public:
  DetectionEngine(DetectorConfig cfg, std::vector<Solution> solutions)
      : cfg_(std::move(cfg)), solutions_(std::move(solutions)) {
    cfg_.validate();
    if (solutions_.empty()) throw ConfigError("engine: no solution enabled");
  }

  const DetectorConfig& config() const noexcept { return cfg_; }
  const std::vector<Solution>& solutions() const noexcept { return solutions_; }

  /// Runs every enabled solution for every game at `at`. Games are visited in
  /// id order, solutions in configuration order.
  std::vector<DetectedEvent> step(Second at, const TimeBucketStore& store) {
    std::vector<DetectedEvent> out;
    for (const auto& game : store.games()) {
      for (auto sol : solutions_) {
        auto& cd = cooldowns_[sol];
        auto evs = sol == Solution::TwoStage ? two_stage_step(game, at, store, cfg_, cd)
                                             : unified_step(game, at, store, cfg_, cd);
        for (auto& e : evs) out.push_back(std::move(e));
      }
    }
    return out;
  }

 private:
  DetectorConfig cfg_;
  std::vector<Solution> solutions_;
  std::map<Solution, CooldownState> cooldowns_;
};

struct PipelineOptions {
  DetectorConfig detector;
  std::vector<Solution> solutions{Solution::TwoStage};
  TimeBucketStore::Options store;
};

/// Single-threaded ingest-then-analyse loop.
class Pipeline {
 public:
  Pipeline(Classifier classifier, PipelineOptions opts)
      : classifier_(std::move(classifier)),
        store_(opts.store, game_ids(classifier_)),
        engine_(opts.detector, opts.solutions),
        next_step_(opts.store.origin + 1) {}

  /// Ingests one message; runs every analysis step that it completes.
  void push(const Tweet& t) {
    run_steps_through(t.delivered_second);
    store_.advance_to(t.delivered_second);
    for (auto& hit : classifier_.classify(t.text, t.device)) store_.ingest(t.delivered_second, hit.game_id, hit.events);
    last_delivered_ = std::max(last_delivered_.value_or(t.delivered_second), t.delivered_second);
  }

  /// Runs the final step after the last delivered second.
  void finish() {
    if (last_delivered_) run_steps_through(*last_delivered_ + 1);
  }

  const std::vector<DetectedEvent>& events() const noexcept { return events_; }
  const TimeBucketStore& store() const noexcept { return store_; }

 private:
  static std::vector<std::string> game_ids(const Classifier& c) {
    std::vector<std::string> ids;
    for (auto& g : c.games()) ids.push_back(g.game_id());
    return ids;
  }

  void run_steps_through(Second t) {
    for (; next_step_ <= t; ++next_step_) {
      // Keeps the step's read range inside retention across long delivery gaps.
      store_.advance_to(next_step_ - 1);
      for (auto& e : engine_.step(next_step_, store_)) events_.push_back(std::move(e));
    }
  }

  Classifier classifier_;
  TimeBucketStore store_;
  DetectionEngine engine_;
  Second next_step_;
  std::optional<Second> last_delivered_;
  std::vector<DetectedEvent> events_;
};

/// Runs a trace (sorted by delivery) end to end.
inline std::vector<DetectedEvent> run_batch(const TweetTrace& trace, const std::vector<GameLexicon>& games,
                                            const PipelineOptions& opts) {
  Pipeline p(Classifier(games), opts);
  for (auto& t : trace.tweets) p.push(t);
  p.finish();
  return p.events();
}

}  // namespace pulse

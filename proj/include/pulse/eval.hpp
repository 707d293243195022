#pragma once

// Evaluation against ground truth: event matching, confusion matrices, RoC
// sweeps over the detection stage, window-size histograms, delay statistics,
// lexicon scoring, and a brute-force reference detector.

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/detect.hpp"
#include "pulse/engine.hpp"
#include "pulse/lexicon.hpp"
#include "pulse/trace.hpp"

namespace pulse {

inline constexpr Second kDefaultMatchHorizon = 90;

// ---- matching --------------------------------------------------------------

struct MatchedPair {
  std::size_t detected;  // index into Matching::detected
  std::size_t truth;     // index into Matching::truth
  Second delay_s;
};

struct Matching {
  std::vector<DetectedEvent> detected;
  std::vector<TruthEvent> truth;
  std::vector<MatchedPair> pairs;
  std::vector<std::size_t> false_positives;  // indices into detected
  std::vector<std::size_t> misses;           // indices into truth
};

/// Greedy one-to-one matching. Detections are taken in time order; each claims
/// the earliest unmatched truth of the same game and type with
/// 0 <= detected - true <= horizon.
inline Matching match_events(std::vector<DetectedEvent> detected, std::vector<TruthEvent> truth,
                             Second horizon_s = kDefaultMatchHorizon) {
  Matching m;
  m.detected = std::move(detected);
  m.truth = std::move(truth);
  std::vector<std::size_t> det_order(m.detected.size()), truth_order(m.truth.size());
  for (std::size_t i = 0; i < det_order.size(); ++i) det_order[i] = i;
  for (std::size_t i = 0; i < truth_order.size(); ++i) truth_order[i] = i;
  std::stable_sort(det_order.begin(), det_order.end(), [&](auto a, auto b) {
    return m.detected[a].detected_at_second < m.detected[b].detected_at_second;
  });
  std::stable_sort(truth_order.begin(), truth_order.end(),
                   [&](auto a, auto b) { return m.truth[a].true_second < m.truth[b].true_second; });
  std::vector<bool> used(m.truth.size(), false);
  for (auto d : det_order) {
    const auto& det = m.detected[d];
    std::optional<std::size_t> hit;
    for (auto t : truth_order) {
      const auto& tr = m.truth[t];
      if (used[t] || tr.game_id != det.game_id || tr.event_type != det.event_type) continue;
      Second delay = det.detected_at_second - tr.true_second;
      if (delay >= 0 && delay <= horizon_s) {
        hit = t;
        break;
      }
    }
    if (hit) {
      used[*hit] = true;
      m.pairs.push_back({d, *hit, det.detected_at_second - m.truth[*hit].true_second});
    } else {
      m.false_positives.push_back(d);
    }
  }
  for (auto t : truth_order)
    if (!used[t]) m.misses.push_back(t);
  return m;
}

// ---- confusion matrix ------------------------------------------------------

/// Rows are recognized labels, columns actual labels; index 4 is NULL. The
/// NULL/NULL cell is meaningless and stays zero.
class ConfusionMatrix {
 public:
  static constexpr std::size_t kNull = kEventTypeCount;
  static constexpr std::size_t kSize = kEventTypeCount + 1;

  std::uint64_t cell(std::size_t recognized, std::size_t actual) const { return cells_[recognized][actual]; }
  void add(std::size_t recognized, std::size_t actual) {
    if (recognized == kNull && actual == kNull) return;
    ++cells_[recognized][actual];
  }

  std::uint64_t actual_total(EventType t) const {
    std::uint64_t n = 0;
    for (std::size_t r = 0; r < kSize; ++r) n += cells_[r][index_of(t)];
    return n;
  }
  std::uint64_t true_positives(EventType t) const { return cells_[index_of(t)][index_of(t)]; }
  std::uint64_t false_positives(EventType t) const { return cells_[index_of(t)][kNull]; }
  std::uint64_t misses(EventType t) const { return cells_[kNull][index_of(t)]; }

  /// Matched / actual; nullopt without any actual events of the type.
  std::optional<double> true_positive_rate(EventType t) const {
    auto n = actual_total(t);
    if (n == 0) return std::nullopt;
    return static_cast<double>(true_positives(t)) / static_cast<double>(n);
  }
  std::optional<double> overall_true_positive_rate() const {
    std::uint64_t tp = 0, n = 0;
    for (auto t : kEventTypes) tp += true_positives(t), n += actual_total(t);
    if (n == 0) return std::nullopt;
    return static_cast<double>(tp) / static_cast<double>(n);
  }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    for (std::size_t r = 0; r < kSize; ++r)
      for (std::size_t c = 0; c < kSize; ++c) cells_[r][c] += o.cells_[r][c];
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::array<std::array<std::uint64_t, kSize>, kSize> cells_{};
};

inline ConfusionMatrix confusion_matrix(const Matching& m) {
  ConfusionMatrix cm;
  for (auto& p : m.pairs) cm.add(index_of(m.detected[p.detected].event_type), index_of(m.truth[p.truth].event_type));
  for (auto d : m.false_positives) cm.add(index_of(m.detected[d].event_type), ConfusionMatrix::kNull);
  for (auto t : m.misses) cm.add(ConfusionMatrix::kNull, index_of(m.truth[t].event_type));
  return cm;
}

inline std::string_view matrix_label(std::size_t i) {
  return i == ConfusionMatrix::kNull ? std::string_view("NULL") : short_label(kEventTypes[i]);
}

/// Plain-text table in the Recognized x Actual layout.
inline void print_matrix(std::ostream& out, const ConfusionMatrix& cm) {
  out << std::left << std::setw(12) << "Recognized";
  for (std::size_t c = 0; c < ConfusionMatrix::kSize; ++c) out << std::right << std::setw(6) << matrix_label(c);
  out << '\n';
  for (std::size_t r = 0; r < ConfusionMatrix::kSize; ++r) {
    out << std::left << std::setw(12) << matrix_label(r);
    for (std::size_t c = 0; c < ConfusionMatrix::kSize; ++c) {
      if (r == ConfusionMatrix::kNull && c == ConfusionMatrix::kNull) out << std::right << std::setw(6) << "";
      else out << std::right << std::setw(6) << cm.cell(r, c);
    }
    out << '\n';
  }
}

inline nlohmann::json to_json(const ConfusionMatrix& cm) {
  nlohmann::json labels = nlohmann::json::array(), rows = nlohmann::json::array();
  for (std::size_t i = 0; i < ConfusionMatrix::kSize; ++i) labels.push_back(std::string(matrix_label(i)));
  for (std::size_t r = 0; r < ConfusionMatrix::kSize; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < ConfusionMatrix::kSize; ++c)
      row.push_back(r == ConfusionMatrix::kNull && c == ConfusionMatrix::kNull ? nlohmann::json(nullptr)
                                                                             : nlohmann::json(cm.cell(r, c)));
    rows.push_back(row);
  }
  nlohmann::json tpr = nlohmann::json::object(), fp = nlohmann::json::object();
  for (auto t : kEventTypes) {
    auto r = cm.true_positive_rate(t);
    tpr[std::string(short_label(t))] = r ? nlohmann::json(*r) : nlohmann::json(nullptr);
    fp[std::string(short_label(t))] = cm.false_positives(t);
  }
  return {{"labels", labels}, {"rows_recognized_cols_actual", rows}, {"true_positive_rate", tpr},
          {"false_positives", fp}};
}

// ---- window sizes ------------------------------------------------------------

inline std::map<Second, std::size_t> window_size_distribution(const std::vector<DetectedEvent>& detections) {
  std::map<Second, std::size_t> hist;
  for (auto& d : detections) ++hist[d.trigger.window_s];
  return hist;
}

/// Share of detections whose window is at most `limit`; nullopt when empty.
inline std::optional<double> share_at_most(const std::map<Second, std::size_t>& hist, Second limit) {
  std::size_t n = 0, small = 0;
  for (auto& [w, c] : hist) {
    n += c;
    if (w <= limit) small += c;
  }
  if (n == 0) return std::nullopt;
  return static_cast<double>(small) / static_cast<double>(n);
}

// ---- delays ------------------------------------------------------------------

struct EventDelay {
  std::string game_id;
  EventType event_type = EventType::Touchdown;
  Second true_second = 0;
  Second detected_at_second = 0;
  Second recognition_s = 0;
  // Decomposition, present when the trace carries per-tweet truth:
  // human = first burst tweet created - true, api = its delivered - created,
  // analysis = the remainder.
  std::optional<Second> human_s, api_s, analysis_s;
};

struct DelayStats {
  std::vector<EventDelay> events;
  std::optional<double> mean_s;
  std::optional<Second> min_s, max_s;
  std::optional<double> mean_human_s, mean_api_s, mean_analysis_s;
};

/// `trace` may be null; truth indices in the matching must refer to
/// trace->truth when it is given.
inline DelayStats delay_stats(const Matching& m, const TweetTrace* trace = nullptr) {
  DelayStats st;
  std::map<std::size_t, const Tweet*> first_burst;
  if (trace)
    for (auto& t : trace->tweets)
      if (t.truth && t.truth->event && t.truth->origin == TweetOrigin::Burst) {
        auto& slot = first_burst[*t.truth->event];
        if (!slot || t.created_second < slot->created_second) slot = &t;
      }
  double sum = 0, hsum = 0, asum = 0, ysum = 0;
  std::size_t decomposed = 0;
  for (auto& p : m.pairs) {
    const auto& d = m.detected[p.detected];
    const auto& tr = m.truth[p.truth];
    EventDelay e{tr.game_id, tr.event_type, tr.true_second, d.detected_at_second, p.delay_s, {}, {}, {}};
    if (auto it = first_burst.find(p.truth); it != first_burst.end()) {
      e.human_s = it->second->created_second - tr.true_second;
      e.api_s = it->second->delivered_second - it->second->created_second;
      e.analysis_s = e.recognition_s - *e.human_s - *e.api_s;
      hsum += static_cast<double>(*e.human_s);
      asum += static_cast<double>(*e.api_s);
      ysum += static_cast<double>(*e.analysis_s);
      ++decomposed;
    }
    sum += static_cast<double>(e.recognition_s);
    st.min_s = std::min(st.min_s.value_or(e.recognition_s), e.recognition_s);
    st.max_s = std::max(st.max_s.value_or(e.recognition_s), e.recognition_s);
    st.events.push_back(std::move(e));
  }
  if (!st.events.empty()) st.mean_s = sum / static_cast<double>(st.events.size());
  if (decomposed > 0) {
    auto n = static_cast<double>(decomposed);
    st.mean_human_s = hsum / n;
    st.mean_api_s = asum / n;
    st.mean_analysis_s = ysum / n;
  }
  return st;
}

inline nlohmann::json to_json(const DelayStats& st) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json events = nlohmann::json::array();
  for (auto& e : st.events)
    events.push_back({{"game_id", e.game_id},
                      {"event_type", std::string(to_string(e.event_type))},
                      {"true_second", e.true_second},
                      {"detected_at", e.detected_at_second},
                      {"recognition_s", e.recognition_s},
                      {"human_s", opt(e.human_s)},
                      {"api_s", opt(e.api_s)},
                      {"analysis_s", opt(e.analysis_s)}});
  return {{"mean_s", opt(st.mean_s)},           {"min_s", opt(st.min_s)},
          {"max_s", opt(st.max_s)},             {"mean_human_s", opt(st.mean_human_s)},
          {"mean_api_s", opt(st.mean_api_s)},   {"mean_analysis_s", opt(st.mean_analysis_s)},
          {"events", events}};
}

// ---- per-second series from a trace -------------------------------------------

/// Classified per-second counts of one game, indexed from `origin`.
struct GameSeries {
  std::vector<std::uint64_t> total;
  std::array<std::vector<std::uint64_t>, kEventTypeCount> keywords;
};

struct TraceSeries {
  Second origin = 0;
  Second end = 0;  // one past the last delivered second
  std::map<std::string, GameSeries> games;
};

/// Buckets a delivery-sorted trace the way the pipeline does.
inline TraceSeries trace_series(const TweetTrace& trace, const std::vector<GameLexicon>& lexicons, Second origin = 0) {
  TraceSeries ts;
  ts.origin = origin;
  ts.end = origin;
  for (auto& t : trace.tweets) ts.end = std::max(ts.end, t.delivered_second + 1);
  auto len = static_cast<std::size_t>(ts.end - origin);
  for (auto& g : lexicons) {
    auto& s = ts.games[g.game_id()];
    s.total.assign(len, 0);
    for (auto& k : s.keywords) k.assign(len, 0);
  }
  Classifier cls(lexicons);
  for (auto& t : trace.tweets) {
    if (t.delivered_second < origin) continue;
    auto i = static_cast<std::size_t>(t.delivered_second - origin);
    for (auto& hit : cls.classify(t.text, t.device)) {
      auto& s = ts.games[hit.game_id];
      s.total[i] += 1;
      for (auto type : kEventTypes) s.keywords[index_of(type)][i] += hit.events[type];
    }
  }
  return ts;
}

// ---- brute-force reference -----------------------------------------------------

namespace detail {

inline std::uint64_t span_sum(const std::vector<std::uint64_t>& v, Second origin, Second from, Second to) {
  std::uint64_t n = 0;
  for (Second s = from; s < to; ++s) {
    if (s < origin || s - origin >= static_cast<Second>(v.size())) continue;
    n += v[static_cast<std::size_t>(s - origin)];
  }
  return n;
}

struct BruteWindow {
  Second window = 0;
  double ratio = 0;
  std::uint64_t first = 0, second = 0;
};

// Every ladder window recomputed from the raw series.
inline std::optional<BruteWindow> brute_burst(const std::vector<std::uint64_t>& v, Second origin, Second at,
                                              const DetectorConfig& cfg, std::uint64_t min_second_half,
                                              Second avg_horizon) {
  for (Second w : cfg.window_ladder) {
    if (at - w < origin) continue;
    std::uint64_t first = span_sum(v, origin, at - w, at - w / 2);
    std::uint64_t second = span_sum(v, origin, at - w / 2, at);
    if (first == 0 && second == 0) continue;
    double ratio = first == 0 ? std::numeric_limits<double>::infinity()
                              : static_cast<double>(second) / static_cast<double>(first);
    if (ratio < cfg.ratio_threshold) continue;
    Second avg_from = std::max(origin, at - avg_horizon);
    std::uint64_t avg_sum = span_sum(v, origin, avg_from, at);
    Second avg_len = at - avg_from;
    double lhs = static_cast<double>(second) * static_cast<double>(avg_len);
    double rhs = cfg.avg_floor_multiplier * static_cast<double>(avg_sum) * static_cast<double>(w / 2);
    if (!(lhs > rhs)) continue;
    if (second < min_second_half) continue;
    return BruteWindow{w, ratio, first, second};
  }
  return std::nullopt;
}

}  // namespace detail

/// Reference detector over materialized per-second arrays; steps run at
/// origin+1 .. last delivered + 1, games in id order.
inline std::vector<DetectedEvent> brute_force_oracle(const TweetTrace& trace, const std::vector<GameLexicon>& lexicons,
                                                     const DetectorConfig& cfg, Solution solution,
                                                     Second origin = 0, Second avg_horizon = 600) {
  std::vector<DetectedEvent> out;
  if (trace.tweets.empty()) return out;
  auto ts = trace_series(trace, lexicons, origin);
  std::map<std::pair<std::string, EventType>, Second> last;
  auto cooled = [&](const std::string& g, EventType t, Second at) {
    auto it = last.find({g, t});
    return it == last.end() || at - it->second >= cfg.cooldown_s;
  };
  for (Second at = origin + 1; at <= ts.end; ++at) {
    for (auto& [game, s] : ts.games) {
      auto trig = [&](const detail::BruteWindow& w) {
        return TriggerWindow{game, at, w.window, w.ratio,
                             static_cast<double>(w.second) / static_cast<double>(w.window / 2), w.first, w.second};
      };
      if (solution == Solution::TwoStage) {
        auto w = detail::brute_burst(s.total, origin, at, cfg, 0, avg_horizon);
        if (!w) continue;
        std::optional<EventType> best;
        std::uint64_t best_n = 0;
        for (auto t : kEventTypes) {
          auto n = detail::span_sum(s.keywords[index_of(t)], origin, at - w->window / 2, at);
          if (n > best_n) best = t, best_n = n;
        }
        if (!best || best_n < cfg.min_keyword_count || !cooled(game, *best, at)) continue;
        last[{game, *best}] = at;
        out.push_back({game, *best, at, trig(*w), static_cast<std::uint32_t>(best_n), Solution::TwoStage});
      } else {
        for (auto t : kEventTypes) {
          auto w = detail::brute_burst(s.keywords[index_of(t)], origin, at, cfg, cfg.min_keyword_count, avg_horizon);
          if (!w || !cooled(game, t, at)) continue;
          last[{game, t}] = at;
          out.push_back({game, t, at, trig(*w), static_cast<std::uint32_t>(w->second), Solution::Unified});
        }
      }
    }
  }
  return out;
}

// ---- RoC -------------------------------------------------------------------------

struct WindowMode {
  std::optional<Second> fixed;  // nullopt: the adaptive ladder

  std::string name() const { return fixed ? "fixed-" + std::to_string(*fixed) : "adaptive"; }
  friend bool operator==(const WindowMode&, const WindowMode&) = default;
};

inline std::optional<WindowMode> parse_window_mode(std::string_view s) {
  if (s == "adaptive") return WindowMode{};
  if (s.substr(0, 6) == "fixed-") {
    try {
      return WindowMode{std::stoll(std::string(s.substr(6)))};
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::vector<WindowMode> standard_window_modes() { return {{}, {10}, {20}, {30}, {60}}; }

struct RocPoint {
  std::string mode;
  double threshold = 0;
  double fpr = 0;
  double tpr = 0;
};

/// Raw counts behind RoC points; summed across scenarios before taking rates.
struct RocCounts {
  std::string mode;
  double threshold = 0;
  std::uint64_t detected_events = 0, events = 0;
  std::uint64_t triggered_negatives = 0, negatives = 0;

  RocPoint point() const {
    return {mode, threshold, negatives ? static_cast<double>(triggered_negatives) / static_cast<double>(negatives) : 0.0,
            events ? static_cast<double>(detected_events) / static_cast<double>(events) : 0.0};
  }
};

/// First delivered second of a trace (0 when empty): where a collector
/// attached to the stream starts observing.
inline Second stream_start(const TweetTrace& trace) {
  if (trace.tweets.empty()) return 0;
  return std::min_element(trace.tweets.begin(), trace.tweets.end(), [](const Tweet& a, const Tweet& b) {
           return a.delivered_second < b.delivered_second;
         })->delivered_second;
}

/// Detection-stage-only sweep. At each second the detector either triggers
/// or not; a truth event counts as detected when some trigger falls in
/// [true, true + horizon], and every second outside all such spans of its
/// game is a negative. Without an explicit origin the sweep starts at
/// stream_start(), so seconds before the first delivery are not counted.
inline std::vector<RocCounts> roc_counts(const TweetTrace& trace, const std::vector<GameLexicon>& lexicons,
                                         const DetectorConfig& base, const std::vector<double>& thresholds,
                                         const std::vector<WindowMode>& modes, Second horizon_s = kDefaultMatchHorizon,
                                         std::optional<Second> start = std::nullopt, Second avg_horizon = 600) {
  const Second origin = start.value_or(stream_start(trace));
  auto ts = trace_series(trace, lexicons, origin);
  std::vector<RocCounts> out;
  for (auto& mode : modes)
    for (double th : thresholds) out.push_back({mode.name(), th, 0, 0, 0, 0});
  if (ts.end <= origin) return out;

  for (auto& [game, s] : ts.games) {
    // Prefix sums; score[t] is the largest ratio among windows whose floor
    // holds, so the detector triggers at threshold th iff score >= th.
    std::vector<std::uint64_t> prefix(s.total.size() + 1, 0);
    for (std::size_t i = 0; i < s.total.size(); ++i) prefix[i + 1] = prefix[i] + s.total[i];
    auto sum = [&](Second a, Second b) {
      auto clamp = [&](Second x) { return static_cast<std::size_t>(std::clamp<Second>(x - origin, 0, ts.end - origin)); };
      return prefix[clamp(b)] - prefix[clamp(a)];
    };
    auto trailing = [&](Second at) {
      Second from = std::max(origin, at - avg_horizon);
      return TrailingSum{sum(from, at), at - from};
    };
    std::vector<TruthEvent> truth;
    for (auto& e : trace.truth)
      if (e.game_id == game) truth.push_back(e);

    DetectorConfig probe = base;
    probe.ratio_threshold = 0.0;  // evaluate the floor for every non-empty window
    std::size_t row = 0;
    for (auto& mode : modes) {
      std::vector<Second> ladder = mode.fixed ? std::vector<Second>{*mode.fixed} : base.window_ladder;
      std::vector<double> score;
      std::vector<bool> positive;
      for (Second at = origin + 1; at <= ts.end; ++at) {
        double best = -std::numeric_limits<double>::infinity();
        for (Second w : ladder) {
          if (at - w < origin) continue;
          auto wt = test_window(at, w, probe, sum, trailing);
          if (wt.passes()) best = std::max(best, wt.ratio);
        }
        score.push_back(best);
        bool pos = std::any_of(truth.begin(), truth.end(),
                               [&](const TruthEvent& e) { return at >= e.true_second && at <= e.true_second + horizon_s; });
        positive.push_back(pos);
      }
      for (double th : thresholds) {
        auto& c = out[row++];
        for (std::size_t i = 0; i < score.size(); ++i)
          if (!positive[i]) {
            ++c.negatives;
            if (score[i] >= th) ++c.triggered_negatives;
          }
        for (auto& e : truth) {
          ++c.events;
          for (Second at = std::max(e.true_second, origin + 1); at <= e.true_second + horizon_s && at <= ts.end; ++at)
            if (score[static_cast<std::size_t>(at - origin - 1)] >= th) {
              ++c.detected_events;
              break;
            }
        }
      }
    }
  }
  return out;
}

inline void accumulate(std::vector<RocCounts>& into, const std::vector<RocCounts>& more) {
  if (into.empty()) {
    into = more;
    return;
  }
  for (std::size_t i = 0; i < into.size(); ++i) {
    into[i].detected_events += more[i].detected_events;
    into[i].events += more[i].events;
    into[i].triggered_negatives += more[i].triggered_negatives;
    into[i].negatives += more[i].negatives;
  }
}

inline std::vector<RocPoint> roc_points(const std::vector<RocCounts>& counts) {
  std::vector<RocPoint> out;
  for (auto& c : counts) out.push_back(c.point());
  return out;
}

inline std::vector<RocPoint> roc_sweep(const TweetTrace& trace, const std::vector<GameLexicon>& lexicons,
                                       const DetectorConfig& base, const std::vector<double>& thresholds,
                                       const std::vector<WindowMode>& modes, Second horizon_s = kDefaultMatchHorizon) {
  return roc_points(roc_counts(trace, lexicons, base, thresholds, modes, horizon_s));
}

inline std::vector<double> default_roc_thresholds() {
  std::vector<double> th;
  for (int i = 11; i <= 40; ++i) th.push_back(i / 10.0);
  for (double x : {5.0, 7.5, 10.0, 20.0}) th.push_back(x);
  return th;
}

inline void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& points) {
  out << "mode,threshold,fpr,tpr\n";
  out << std::setprecision(10);
  for (auto& p : points) out << p.mode << ',' << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
}

/// Points of one mode.
inline std::vector<RocPoint> curve(const std::vector<RocPoint>& points, const std::string& mode) {
  std::vector<RocPoint> out;
  for (auto& p : points)
    if (p.mode == mode) out.push_back(p);
  return out;
}

/// TPR of a curve at `fpr`: the monotone hull of its points plus (0,0) and
/// (1,1), linearly interpolated.
inline double curve_tpr_at(const std::vector<RocPoint>& c, double fpr) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}};
  for (auto& p : c) pts.emplace_back(p.fpr, p.tpr);
  std::sort(pts.begin(), pts.end());
  // Keep the best TPR per FPR (sorting puts it last), then make it monotone.
  std::vector<std::pair<double, double>> hull;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (i + 1 == pts.size() || pts[i + 1].first != pts[i].first) hull.push_back(pts[i]);
  for (std::size_t i = 1; i < hull.size(); ++i) hull[i].second = std::max(hull[i].second, hull[i - 1].second);
  if (fpr <= hull.front().first) return hull.front().second;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    auto [x0, y0] = hull[i - 1];
    auto [x1, y1] = hull[i];
    if (fpr > x1) continue;
    return y0 + (y1 - y0) * (fpr - x0) / (x1 - x0);
  }
  return 1.0;
}

/// True when curve `a` is at or above every point of curve `b`.
inline bool weakly_dominates(const std::vector<RocPoint>& a, const std::vector<RocPoint>& b, double eps = 1e-12) {
  return std::all_of(b.begin(), b.end(), [&](const RocPoint& p) { return curve_tpr_at(a, p.fpr) + eps >= p.tpr; });
}

// ---- lexicon scoring ---------------------------------------------------------------

struct LabeledMessage {
  std::string text;
  bool related = false;
  std::string category;  // error-taxonomy bucket the generator drew it from
};

struct LexiconScore {
  std::uint64_t true_positive = 0, false_positive = 0, true_negative = 0, false_negative = 0;
  std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> by_category;  // (correct, total)

  double false_positive_rate() const {
    auto n = false_positive + true_negative;
    return n ? static_cast<double>(false_positive) / static_cast<double>(n) : 0.0;
  }
  double false_negative_rate() const {
    auto n = false_negative + true_positive;
    return n ? static_cast<double>(false_negative) / static_cast<double>(n) : 0.0;
  }
};

/// A message is extracted when the classifier attributes it to any game.
inline LexiconScore score_lexicon(const std::vector<LabeledMessage>& corpus, const Classifier& cls) {
  LexiconScore sc;
  for (auto& m : corpus) {
    bool predicted = !cls.classify(m.text).empty();
    if (predicted && m.related) ++sc.true_positive;
    else if (predicted) ++sc.false_positive;
    else if (m.related) ++sc.false_negative;
    else ++sc.true_negative;
    auto& [ok, total] = sc.by_category[m.category];
    ok += predicted == m.related;
    ++total;
  }
  return sc;
}

inline nlohmann::json to_json(const LexiconScore& s) {
  nlohmann::json cats = nlohmann::json::object();
  for (auto& [k, v] : s.by_category) cats[k] = {{"correct", v.first}, {"total", v.second}};
  return {{"true_positive", s.true_positive},        {"false_positive", s.false_positive},
          {"true_negative", s.true_negative},        {"false_negative", s.false_negative},
          {"false_positive_rate", s.false_positive_rate()}, {"false_negative_rate", s.false_negative_rate()},
          {"by_category", cats}};
}

inline void write_labeled_corpus(std::ostream& out, const std::vector<LabeledMessage>& corpus) {
  for (auto& m : corpus)
    out << nlohmann::json{{"text", m.text}, {"related", m.related}, {"category", m.category}}.dump() << '\n';
}

inline std::vector<LabeledMessage> read_labeled_corpus(std::istream& in) {
  std::vector<LabeledMessage> out;
  for_each_jsonl(in, [&](const nlohmann::json& j, std::size_t) {
    out.push_back({j.at("text").get<std::string>(), j.at("related").get<bool>(), j.value("category", std::string{})});
  });
  return out;
}

// ---- reports -------------------------------------------------------------------------

struct EvalReport {
  Solution solution = Solution::TwoStage;
  Second horizon_s = kDefaultMatchHorizon;
  Matching matching;
  ConfusionMatrix matrix;
  DelayStats delays;
  std::map<Second, std::size_t> windows;
};

inline EvalReport evaluate(const TweetTrace& trace, const std::vector<GameLexicon>& lexicons,
                           const PipelineOptions& opts, Solution solution, Second horizon_s = kDefaultMatchHorizon) {
  PipelineOptions o = opts;
  o.solutions = {solution};
  EvalReport r;
  r.solution = solution;
  r.horizon_s = horizon_s;
  auto detected = run_batch(trace, lexicons, o);
  r.windows = window_size_distribution(detected);
  r.matching = match_events(std::move(detected), trace.truth, horizon_s);
  r.matrix = confusion_matrix(r.matching);
  r.delays = delay_stats(r.matching, &trace);
  return r;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json windows = nlohmann::json::object();
  for (auto& [w, n] : r.windows) windows[std::to_string(w)] = n;
  nlohmann::json detections = nlohmann::json::array();
  for (auto& d : r.matching.detected) detections.push_back(to_json(d));
  auto overall = r.matrix.overall_true_positive_rate();
  return {{"schema", "pulse.eval"},
          {"version", 1},
          {"solution", std::string(to_string(r.solution))},
          {"match_horizon_s", r.horizon_s},
          {"truth_events", r.matching.truth.size()},
          {"detections", r.matching.detected.size()},
          {"matched", r.matching.pairs.size()},
          {"false_positives", r.matching.false_positives.size()},
          {"misses", r.matching.misses.size()},
          {"overall_true_positive_rate", overall ? nlohmann::json(*overall) : nlohmann::json(nullptr)},
          {"confusion_matrix", to_json(r.matrix)},
          {"delays", to_json(r.delays)},
          {"window_sizes", windows},
          {"detected_events", detections}};
}

}  // namespace pulse

// pulse: simulate traces, run and score the detectors, serve the live pipeline.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pulse/bundled.hpp"
#include "pulse/corpus.hpp"
#include "pulse/eval.hpp"
#include "pulse/server.hpp"
#include "pulse/service.hpp"

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop.store(true); }

// Writes to `path`, or stdout for "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw pulse::ConfigError("cannot write " + path);
  fn(out);
}

pulse::Solution solution_arg(const std::string& s) {
  auto sol = pulse::parse_solution(s);
  if (!sol) throw pulse::ConfigError("unknown solution '" + s + "' (two_stage or unified)");
  return *sol;
}

// Truth comes from --truth when given, else from the event records in the trace.
pulse::TweetTrace load_trace(const std::string& trace_path, const std::string& truth_path) {
  auto trace = pulse::read_trace(trace_path);
  if (!truth_path.empty()) trace.truth = pulse::read_trace(truth_path).truth;
  return trace;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse: detect and recognize game events from per-second message rates"};
  app.require_subcommand(1);

  // simulate
  std::string sim_scenario, sim_out = "-", sim_truth;
  auto* sim = app.add_subcommand("simulate", "Generate a message trace from a scenario");
  sim->add_option("--scenario", sim_scenario, "Scenario JSONL file or bundled:<name>")->required();
  sim->add_option("--out", sim_out, "Trace output (JSONL, - for stdout)");
  sim->add_option("--truth", sim_truth, "Also write the ground-truth events here");

  // eval
  std::string ev_trace, ev_truth, ev_games, ev_solution = "two_stage", ev_out = "-", ev_events;
  auto* ev = app.add_subcommand("eval", "Run a detector over a trace and score it against truth");
  ev->add_option("--trace", ev_trace, "Trace JSONL")->required();
  ev->add_option("--truth", ev_truth, "Truth JSONL (defaults to the trace's event records)");
  ev->add_option("--games", ev_games, "Lexicon file")->required();
  ev->add_option("--solution", ev_solution, "two_stage or unified");
  ev->add_option("--out", ev_out, "Report JSON (- for stdout)");
  ev->add_option("--events", ev_events, "Also write detected events as JSONL");

  // roc
  std::string roc_trace, roc_truth, roc_games, roc_out = "-";
  std::vector<double> roc_thresholds;
  auto* roc = app.add_subcommand("roc", "Sweep ratio thresholds for every window mode");
  roc->add_option("--trace", roc_trace, "Trace JSONL (default: the bundled regular-season suite)");
  roc->add_option("--truth", roc_truth, "Truth JSONL");
  roc->add_option("--games", roc_games, "Lexicon file (required with --trace)");
  roc->add_option("--thresholds", roc_thresholds, "Ratio thresholds (default 1.0-3.0 step 0.1)");
  roc->add_option("--out", roc_out, "CSV output: mode,threshold,fpr,tpr");

  // lexscore
  std::string lx_corpus, lx_games;
  auto* lx = app.add_subcommand("lexscore", "Score lexicon extraction on a labeled corpus");
  lx->add_option("--corpus", lx_corpus, "Labeled corpus JSONL (default: bundled corpus)");
  lx->add_option("--games", lx_games, "Lexicon file (default: bundled regular-season games)");

  // export
  std::string ex_what, ex_name = "regular_season", ex_out = "-";
  auto* ex = app.add_subcommand("export", "Write bundled scenarios, lexicons or the labeled corpus");
  ex->add_option("what", ex_what, "scenario, lexicons or corpus")
      ->required()
      ->check(CLI::IsMember({"scenario", "lexicons", "corpus"}));
  ex->add_option("--name", ex_name, "Bundled scenario: superbowl, regular_season[:seed]");
  ex->add_option("--out", ex_out, "Output file (- for stdout)");

  // serve
  std::string sv_config;
  auto* sv = app.add_subcommand("serve", "Run the live pipeline with HTTP endpoints");
  sv->add_option("--config", sv_config, "Service config JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      auto sc = pulse::resolve_scenario(sim_scenario);
      auto trace = pulse::simulate(sc);
      with_output(sim_out, [&](std::ostream& o) { pulse::write_trace(o, trace); });
      if (!sim_truth.empty())
        with_output(sim_truth, [&](std::ostream& o) { pulse::write_trace(o, pulse::TweetTrace{{}, trace.truth}); });
    } else if (*ev) {
      auto trace = load_trace(ev_trace, ev_truth);
      auto games = pulse::load_lexicons(ev_games);
      auto sol = solution_arg(ev_solution);
      pulse::PipelineOptions opts;
      opts.solutions = {sol};
      auto report = pulse::evaluate(trace, games, opts, sol);
      with_output(ev_out, [&](std::ostream& o) { o << pulse::to_json(report).dump(2) << '\n'; });
      pulse::print_matrix(std::cerr, report.matrix);
      if (!ev_events.empty())
        with_output(ev_events, [&](std::ostream& o) {
          for (auto& e : report.matching.detected) o << pulse::to_json(e).dump() << '\n';
        });
    } else if (*roc) {
      auto thresholds = roc_thresholds.empty() ? pulse::default_roc_thresholds() : roc_thresholds;
      std::sort(thresholds.begin(), thresholds.end());
      auto modes = pulse::standard_window_modes();
      std::vector<pulse::RocCounts> counts;
      if (!roc_trace.empty()) {
        if (roc_games.empty()) throw pulse::ConfigError("roc: --games is required with --trace");
        counts = pulse::roc_counts(load_trace(roc_trace, roc_truth), pulse::load_lexicons(roc_games), {}, thresholds,
                                   modes);
      } else {
        for (auto& sc : pulse::bundled::regular_season_suite())
          pulse::accumulate(counts, pulse::roc_counts(pulse::simulate(sc), sc.lexicons(), {}, thresholds, modes));
      }
      with_output(roc_out, [&](std::ostream& o) { pulse::write_roc_csv(o, pulse::roc_points(counts)); });
    } else if (*lx) {
      std::vector<pulse::LabeledMessage> corpus;
      if (lx_corpus.empty()) {
        corpus = pulse::bundled::labeled_corpus();
      } else {
        std::ifstream in(lx_corpus);
        if (!in) throw pulse::ConfigError("cannot open " + lx_corpus);
        corpus = pulse::read_labeled_corpus(in);
      }
      auto games = lx_games.empty() ? pulse::bundled::regular_season_lexicons() : pulse::load_lexicons(lx_games);
      std::cout << pulse::to_json(pulse::score_lexicon(corpus, pulse::Classifier(games))).dump(2) << '\n';
    } else if (*ex) {
      if (ex_what == "corpus") {
        with_output(ex_out, [&](std::ostream& o) { pulse::write_labeled_corpus(o, pulse::bundled::labeled_corpus()); });
      } else {
        auto sc = pulse::bundled::scenario_by_name(ex_name);
        if (!sc) throw pulse::ConfigError("unknown bundled scenario '" + ex_name + "'");
        with_output(ex_out, [&](std::ostream& o) {
          if (ex_what == "scenario") pulse::write_scenario(o, *sc);
          else pulse::save_lexicons(o, sc->lexicons());
        });
      }
    } else if (*sv) {
      pulse::ServiceConfig cfg;
      try {
        cfg = pulse::load_service_config(sv_config);
      } catch (const pulse::ConfigError& e) {
        std::cerr << "pulse: config error: " << e.what() << '\n';
        return pulse::kExitConfig;
      }
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      return pulse::run_service(cfg, &g_stop);
    }
  } catch (const pulse::ConfigError& e) {
    std::cerr << "pulse: " << e.what() << '\n';
    return 2;
  } catch (const pulse::ParseError& e) {
    std::cerr << "pulse: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "pulse: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

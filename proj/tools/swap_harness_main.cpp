#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "swapbit/harness.hpp"

namespace {

using swapbit::harness::exit_parse;
using swapbit::harness::input_pattern;
using swapbit::harness::run_config;
using swapbit::harness::run_mode;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wait-free one-bit swap: exhaustive, stress, bench and check"};

  run_config cfg;
  std::string mode = "exhaustive";
  std::string backend = "atomic";
  unsigned init = 0;
  std::vector<std::string> pattern_names;
  std::string history_path;

  app.add_option("--mode", mode, "exhaustive | stress | bench | check")
      ->check(CLI::IsMember({"exhaustive", "stress", "bench", "check"}));
  app.add_option("--procs", cfg.procs, "processes (exhaustive) or threads (stress)");
  app.add_option("--ops", cfg.ops, "operations per process");
  app.add_option("--seed", cfg.seed, "random seed for stress and bench");
  app.add_option("--backend", backend, "atomic | regtree")
      ->check(CLI::IsMember({"atomic", "regtree"}));
  app.add_option("--init", init, "initial bit")->check(CLI::Range(0u, 1u));
  app.add_option("--capacity", cfg.capacity,
                 "round register capacity (regtree; 0 picks one that fits)");
  app.add_option("--out", cfg.out_path, "stress: write history and records here");
  app.add_flag("--force-large", cfg.force_large,
               "lift the exhaustive size guard");
  app.add_option("--patterns", pattern_names,
                 "input patterns: all-ones, all-zeros, alternating, mixed")
      ->delimiter(',');
  app.add_option("history", history_path, "history file to re-verify (check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_parse;
  }

  if (mode == "exhaustive") cfg.mode = run_mode::exhaustive;
  if (mode == "stress") cfg.mode = run_mode::stress;
  if (mode == "bench") cfg.mode = run_mode::bench;
  if (mode == "check") cfg.mode = run_mode::check;
  cfg.backend = backend == "regtree" ? swapbit::backend_kind::regtree
                                     : swapbit::backend_kind::atomic;
  cfg.init = static_cast<swapbit::bit_value>(init);
  cfg.check_path = history_path;

  for (const std::string& name : pattern_names) {
    const auto pattern = swapbit::harness::pattern_from_name(name);
    if (!pattern) {
      std::cerr << "unknown pattern: " << name << "\n";
      return exit_parse;
    }
    cfg.patterns.push_back(*pattern);
  }

  if (cfg.mode == run_mode::check && cfg.check_path.empty()) {
    std::cerr << "check mode needs a history file argument\n";
    return exit_parse;
  }

  return swapbit::harness::run(cfg, std::cout, std::cerr);
}

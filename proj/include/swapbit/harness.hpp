#pragma once

// Driver layer shared by the command-line tool and the test suites.  Four
// modes: exhaustive (enumerate every interleaving of small model programs and
// check each one two ways), stress (real threads against the live object,
// then verify the recorded run), bench (sequential timing and step counts),
// and check (re-verify history files recorded earlier).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swapbit/history.hpp"
#include "swapbit/max_register.hpp"
#include "swapbit/swap_object.hpp"

namespace swapbit::harness {

enum class run_mode : std::uint8_t { exhaustive, stress, bench, check };

enum class input_pattern : std::uint8_t {
  all_ones,
  all_zeros,
  alternating,
  mixed
};

std::string_view pattern_name(input_pattern p);
std::optional<input_pattern> pattern_from_name(std::string_view name);

// Input bit for operation k of process `proc` under a pattern.
bit_value pattern_input(input_pattern p, std::uint32_t proc, std::uint64_t k);

struct run_config {
  run_mode mode = run_mode::exhaustive;
  std::uint32_t procs = 2;
  std::uint64_t ops = 2;
  std::uint64_t seed = 1;
  backend_kind backend = backend_kind::atomic;
  bit_value init = 0;
  std::uint64_t capacity = 0;  // 0: pick a fitting power of two (regtree)
  std::string out_path;        // stress: write history + records here
  std::string check_path;      // check: history file to re-verify
  bool force_large = false;
  std::vector<input_pattern> patterns;  // empty: the mode's default
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_parse = 2;
inline constexpr int exit_refusal = 3;
inline constexpr int exit_verification = 4;

// A finished stress run, before any verdicts: the merged timestamped history
// and the per-operation records, in seq order.
struct stress_data {
  history hist;
  std::vector<swap_record> records;
  std::uint64_t final_round = 0;
  swap_metrics metrics;
};

stress_data run_stress_collect(const run_config& cfg);

struct bench_data {
  std::uint64_t completed = 0;
  bool capacity_exhausted = false;
  std::uint64_t two_step = 0;
  std::uint64_t three_step = 0;
  double p50_ns = 0;
  double p90_ns = 0;
  double p99_ns = 0;
  double max_ns = 0;
  bool reg_bound_ok = true;  // regtree: per-swap register ops within bound
};

bench_data run_bench_collect(const run_config& cfg);

// Mode drivers: print a report and return an exit code.
int run_exhaustive(const run_config& cfg, std::ostream& out);
int run_stress(const run_config& cfg, std::ostream& out);
int run_bench(const run_config& cfg, std::ostream& out);
int run_check(const run_config& cfg, std::ostream& out);

// Dispatches on cfg.mode and maps exceptions to exit codes.
int run(const run_config& cfg, std::ostream& out, std::ostream& err);

}  // namespace swapbit::harness

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "swapbit/history.hpp"
#include "swapbit/swap_object.hpp"

namespace swapbit {

// Sequential one-bit swap: each output is the state before the swap, and the
// state becomes the input. This is the semantic ground truth every checker
// replays against.
std::vector<bit_value> seq_swap_oracle(bit_value init,
                                       std::span<const bit_value> inputs);

struct lin_op_ref {
  std::uint32_t proc = 0;
  std::uint32_t op_id = 0;
};

struct brute_force_options {
  std::size_t max_completed_ops = 12;
};

struct brute_force_result {
  bool linearizable = false;
  // When linearizable: a witness order of all completed operations plus the
  // pending ones that were taken to have happened.
  std::vector<lin_op_ref> witness;
};

// General linearizability check by exhaustive search over total orders that
// respect real-time precedence, replaying candidates through the sequential
// oracle. Pending operations may be included or excluded. Refuses histories
// with more completed operations than the configured bound.
brute_force_result brute_force_linearizable(const history& h,
                                            const brute_force_options& opts = {});

// The explicit linearization: records grouped by their final round r,
// groups ordered by increasing r, records inside a group ordered by TAS
// ticket (the group's winner holds the smallest ticket by construction).
// The implicit initializer of group r = init is pre-execution state and has
// no record.
struct grouped_linearization {
  struct group {
    std::uint64_t round = 0;
    std::vector<swap_record> records;
  };
  std::vector<group> groups;

  std::vector<swap_record> flattened() const;
};

// Throws instrumentation_error on a duplicate (round, ticket) pair.
grouped_linearization explicit_linearize(std::span<const swap_record> records,
                                         bit_value init);

// Clause numbers reported by verify_explicit.
//   1: flattened order is real-time consistent with the history
//   2: oracle replay of the flattened order reproduces every response
//   3: every record's round matches its input's parity
//   4: rounds present are gap-free above init + 1
//   5: every group has exactly one TAS winner, except group init with none
struct verify_verdict {
  bool pass = false;
  int failed_clause = 0;  // 0 when pass
  std::string reason;
};

// Checks the round/ticket linearization of a complete history.
// `g` must be built from the records of exactly the operations in `h`.
verify_verdict verify_explicit(const grouped_linearization& g, const history& h,
                               bit_value init);

// Real-time round ordering: for every pair of operations where one's
// response precedes the other's invocation, the earlier one's round is <=
// the later one's. `pairs_checked` counts the ordered pairs covered.
struct realtime_round_result {
  bool ok = true;
  std::uint64_t pairs_checked = 0;
  std::string reason;
};

realtime_round_result check_realtime_rounds(const history& h,
                                            std::span<const swap_record> records);

}  // namespace swapbit

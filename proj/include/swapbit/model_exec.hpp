#pragma once

// Deterministic interleaving executor for the swap algorithm over model base
// objects.  Programs are per-process lists of operations; a schedule names
// which process takes the next base step.  One step performs at most one
// shared-memory access, so enumerating schedules enumerates exactly the
// interleavings that differ at base-object granularity.
//
// A single logical clock orders everything that happens: invoke events, base
// steps, and response events each take one tick.  TAS tickets are drawn from
// that clock, so tickets are globally unique and respect real-time order.
// Swap operations appear in the resulting history; raw register and TAS
// operations are recorded in a separate trace.

#include <cstdint>
#include <functional>
#include <vector>

#include "swapbit/base_objects.hpp"
#include "swapbit/history.hpp"
#include "swapbit/max_register.hpp"
#include "swapbit/swap_object.hpp"

namespace swapbit::model {

enum class model_op_kind : std::uint8_t { swap, write_max, read_max, tas };

struct model_op {
  model_op_kind kind = model_op_kind::swap;
  bit_value input = 0;     // swap only
  std::uint64_t arg = 0;   // write_max value, or tas slot index
};

inline model_op op_swap(bit_value v) { return {model_op_kind::swap, v, 0}; }
inline model_op op_write_max(std::uint64_t x) {
  return {model_op_kind::write_max, 0, x};
}
inline model_op op_read_max() { return {model_op_kind::read_max, 0, 0}; }
inline model_op op_tas(std::uint64_t slot) {
  return {model_op_kind::tas, 0, slot};
}

using process_program = std::vector<model_op>;
using schedule = std::vector<std::uint32_t>;

struct exec_config {
  bit_value init = 0;
  backend_kind backend = backend_kind::atomic;
  std::uint64_t capacity = 0;     // round register capacity, regtree only
  std::uint64_t step_bound = 24;  // refusal threshold for enumeration
};

// A raw (non-swap) base operation on the shared clock. start_seq is the tick
// of its first step, seq the tick of its completion; for write_max, result
// echoes the written value.
struct base_op_event {
  std::uint64_t start_seq = 0;
  std::uint64_t seq = 0;
  std::uint32_t proc = 0;
  std::uint32_t op_id = 0;
  model_op_kind kind = model_op_kind::read_max;
  std::uint64_t result = 0;
};

struct execution_outcome {
  history hist;                           // swap invokes and responses only
  std::vector<swap_record> records;       // one per completed swap
  std::vector<base_op_event> base_trace;  // raw register and TAS operations
  std::uint64_t final_round = 0;          // quiescent round register value
  bit_value final_value = 0;              // its parity: the stored bit
  std::uint64_t total_steps = 0;          // schedule length
};

// Worst-case base steps any schedule of these programs can take.  Used for
// the enumeration refusal check and exposed for tests.
std::uint64_t worst_case_steps(const std::vector<process_program>& programs,
                               const exec_config& cfg);

// Upper bound on the number of distinct maximal schedules, saturating at
// UINT64_MAX.
std::uint64_t schedule_upper_bound(const std::vector<process_program>& programs,
                                   const exec_config& cfg);

// Replays one complete schedule.  Throws contract_error if the schedule steps
// a finished process or stops before every program has run to completion.
execution_outcome run_schedule(const std::vector<process_program>& programs,
                               const schedule& order, const exec_config& cfg);

// Runs one schedule chosen uniformly at random among runnable processes.
// The same seed always produces the same schedule and outcome.
execution_outcome run_random(const std::vector<process_program>& programs,
                             const exec_config& cfg, std::uint64_t seed);

// Depth-first enumeration of every maximal schedule.  The visitor sees each
// schedule together with its outcome; the return value is the number of
// schedules visited.  Throws refusal_error up front when worst_case_steps
// exceeds cfg.step_bound, naming the step total and the schedule bound.
using explore_visitor =
    std::function<void(const schedule&, const execution_outcome&)>;
std::uint64_t explore(const std::vector<process_program>& programs,
                      const exec_config& cfg, const explore_visitor& visit);

}  // namespace swapbit::model

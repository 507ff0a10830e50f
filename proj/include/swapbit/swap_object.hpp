#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <span>
#include <utility>

#include "swapbit/max_register.hpp"

namespace swapbit {

// Instrumentation for one completed swap operation. proc/op_id identify the
// operation to the offline checkers; the caller that owns process identity
// fills them in.
struct swap_record {
  std::uint32_t proc = 0;
  std::uint32_t op_id = 0;
  bit_value input = 0;
  std::uint64_t round_read = 0;  // maxRound as first read
  std::uint64_t round = 0;       // final r: index of the TAS bit used
  bit_value tas_result = 0;
  std::uint64_t ticket = 0;
  std::uint32_t base_ops = 0;    // base-object operations, always 2 or 3
  std::uint32_t reg_ops = 0;     // backend-native units; == base_ops on atomic
  bit_value returned = 0;
};

// The per-record step rule: 2 base ops exactly when the parity test failed
// (the round already matched the input), 3 when the round was advanced.
inline bool step_rule_holds(const swap_record& rec) {
  if (rec.base_ops != 2 && rec.base_ops != 3) return false;
  const bool branch_taken = (rec.round_read & 1u) != rec.input;
  if (branch_taken) return rec.base_ops == 3 && rec.round == rec.round_read + 1;
  return rec.base_ops == 2 && rec.round == rec.round_read;
}

struct swap_metrics {
  std::uint64_t total_swaps = 0;
  std::uint64_t switch_count = 0;    // value changes: group winners above the initial round
  std::uint64_t max_round_final = 0;
};

// Wait-free one-bit swap object: a single max register holding the current
// round plus an unbounded array of test-and-set bits, one per round. A swap
// reads the round, advances it by one if its parity disagrees with the input,
// and does TAS on the round's bit; winning the TAS means the operation
// changed the value and returns the complement of its input.
//
// The bit array grows by publish-once segments of doubling size (segment s
// covers indices [2^s - 1, 2^(s+1) - 2]); racing publishers resolve by
// first-CAS-wins and losers discard their segment, so slot access stays
// wait-free. The bit for the initial value is preset at construction, as if
// a swap of the initial value had already won before the execution began.
class swap_object {
 public:
  explicit swap_object(bit_value initial,
                       backend_kind backend = backend_kind::atomic,
                       std::uint64_t capacity = 0);
  ~swap_object();

  swap_object(const swap_object&) = delete;
  swap_object& operator=(const swap_object&) = delete;

  bit_value initial_value() const { return initial_; }
  backend_kind backend() const { return round_.backend(); }

  // Returns the previous object value plus the filled record (proc/op_id
  // left to the caller). Thread safe; completes in at most 3 base ops.
  std::pair<bit_value, swap_record> swap(bit_value v);

  // Quiescent probe of maxRound (instrumentation, not counted anywhere).
  std::uint64_t read_round() const;

  // Aggregates completed records; requires quiescence for a meaningful
  // max_round_final.
  swap_metrics metrics(std::span<const swap_record> records) const;

  // Test access to the underlying bits.
  bool bit_is_set(std::uint64_t index) const;

 private:
  struct segment;

  tas_bit& slot(std::uint64_t index);
  segment* publish_segment(std::size_t seg_index);

  max_register round_;
  ticket_source tickets_;
  std::array<std::atomic<segment*>, 64> segments_{};
  bit_value initial_;
};

}  // namespace swapbit

#pragma once

#include <atomic>
#include <cstdint>

#include "swapbit/errors.hpp"

namespace swapbit {

// The swap object's value domain: a single bit, stored as 0 or 1.
using bit_value = std::uint8_t;

inline bit_value bit_not(bit_value v) { return static_cast<bit_value>(1u - v); }

inline void require_bit(bit_value v) {
  if (v > 1) throw contract_error("bit value must be 0 or 1");
}

// Counts base-object operations attributed to one high-level operation, in
// the backend's native unit: one per operation for machine-atomic objects,
// one per underlying register access for the register tree.
class step_counter {
 public:
  void add(std::uint64_t n = 1) { count_ += n; }
  std::uint64_t count() const { return count_; }
  void reset() { count_ = 0; }

 private:
  std::uint64_t count_ = 0;
};

// Atomic read-write register of a fixed bit width. Reads return the value of
// some completed or concurrently executing write, or 0 if none.
class register_cell {
 public:
  explicit register_cell(unsigned width_bits = 64) : width_(width_bits) {
    if (width_bits == 0 || width_bits > 64)
      throw contract_error("register width must be in [1, 64]");
  }

  // Non-atomic copy, for building cell arrays before they are shared.
  register_cell(const register_cell& other)
      : value_(other.value_.load()), width_(other.width_) {}
  register_cell& operator=(const register_cell&) = delete;

  std::uint64_t read(step_counter& steps) const {
    steps.add();
    return value_.load();
  }

  void write(std::uint64_t x, step_counter& steps) {
    if (width_ < 64 && (x >> width_) != 0)
      throw contract_error("register write exceeds cell width");
    steps.add();
    value_.store(x);
  }

  unsigned width() const { return width_; }

 private:
  std::atomic<std::uint64_t> value_{0};
  unsigned width_;
};

// Global monotone counter supplying TAS tickets. Tickets start at 1; ticket 0
// is reserved for preset bits, which are treated as set before the execution
// began.
class ticket_source {
 public:
  std::uint64_t draw() { return next_.fetch_add(1); }

 private:
  std::atomic<std::uint64_t> next_{1};
};

// One-shot test-and-set bit.
//
// The claim word encodes both the bit and the winning ticket: 0 means clear,
// k > 0 means set with winning ticket k - 1 (0 for preset bits). A caller
// that observes a nonzero claim, or loses the CAS, draws its ticket after
// the winner's claim is published, so within one bit the winner's ticket is
// strictly smallest and non-overlapping calls draw tickets in real-time
// order. A call performs at most two loop iterations: after any CAS failure
// the claim is nonzero forever.
class tas_bit {
 public:
  struct preset_t {};
  static constexpr preset_t preset{};

  struct outcome {
    bit_value previous;
    std::uint64_t ticket;
  };

  tas_bit() = default;
  explicit tas_bit(preset_t) : claim_(1) {}

  outcome test_and_set(ticket_source& tickets, step_counter& steps) {
    steps.add();
    std::uint64_t claimed = claim_.load();
    if (claimed != 0) return {1, tickets.draw()};
    std::uint64_t ticket = tickets.draw();
    std::uint64_t expected = 0;
    if (claim_.compare_exchange_strong(expected, ticket + 1)) return {0, ticket};
    return {1, tickets.draw()};
  }

  bool is_set() const { return claim_.load() != 0; }

  // Ticket of the call that set the bit; 0 for preset bits. Meaningful only
  // once is_set().
  std::uint64_t setter_ticket() const { return claim_.load() - 1; }

  // Turns a fresh bit into a preset one. Only valid before the bit is shared.
  void preset_before_sharing() { claim_.store(1); }

 private:
  std::atomic<std::uint64_t> claim_{0};
};

inline tas_bit preset_tas_bit() { return tas_bit(tas_bit::preset); }

// Max register backed by a single machine word and a CAS raise loop. The
// register counts as one base object, so a whole read or write_max is one
// step unit regardless of CAS retries.
//
// Values are 64-bit; at desk scale maxRound stays far below 2^64 (it is
// bounded by the initial value plus the number of swap operations), so the
// word is unbounded in practice.
class atomic_max_register {
 public:
  explicit atomic_max_register(std::uint64_t initial = 0) : value_(initial) {}

  std::uint64_t read(step_counter& steps) const {
    steps.add();
    return value_.load();
  }

  void write_max(std::uint64_t x, step_counter& steps) {
    steps.add();
    std::uint64_t current = value_.load();
    while (current < x && !value_.compare_exchange_weak(current, x)) {
    }
  }

 private:
  std::atomic<std::uint64_t> value_;
};

}  // namespace swapbit

#include "swapbit/maxreg_tree.hpp"

#include <array>
#include <bit>
#include <string>

namespace swapbit {

tree_max_register::tree_max_register(std::uint64_t capacity, std::uint64_t initial)
    : capacity_(capacity) {
  if (capacity == 0 || !std::has_single_bit(capacity))
    throw contract_error("tree capacity must be a power of two, got " +
                         std::to_string(capacity));
  depth_ = static_cast<unsigned>(std::bit_width(capacity) - 1);
  if (capacity > 1)
    switches_ = std::vector<register_cell>(capacity - 1, register_cell(1));
  if (initial != 0) {
    step_counter setup;
    write_max(initial, setup);
  }
}

std::uint64_t tree_max_register::read(step_counter& steps) const {
  std::uint64_t acc = 0;
  std::uint64_t node = 0;
  std::uint64_t cap = capacity_;
  while (cap > 1) {
    std::uint64_t half = cap / 2;
    if (switches_[node].read(steps) != 0) {
      acc += half;
      node = 2 * node + 2;
    } else {
      node = 2 * node + 1;
    }
    cap = half;
  }
  return acc;
}

void tree_max_register::write_max(std::uint64_t x, step_counter& steps) {
  if (x >= capacity_)
    throw capacity_error("write_max(" + std::to_string(x) +
                         ") exceeds tree capacity " + std::to_string(capacity_));
  // Switches guarding right turns are collected and set bottom-up after the
  // descent, so a reader never sees a switch before the subtree under it
  // holds the value.
  std::array<std::uint64_t, 64> to_set;
  std::size_t pending = 0;
  std::uint64_t node = 0;
  std::uint64_t cap = capacity_;
  std::uint64_t rest = x;
  while (cap > 1) {
    std::uint64_t half = cap / 2;
    if (rest >= half) {
      to_set[pending++] = node;
      node = 2 * node + 2;
      rest -= half;
    } else {
      if (switches_[node].read(steps) != 0) break;  // dominated by the right side
      node = 2 * node + 1;
    }
    cap = half;
  }
  while (pending > 0) switches_[to_set[--pending]].write(1, steps);
}

}  // namespace swapbit

#pragma once

// Reference checks shared across test suites, written against the intended
// behavior rather than the implementation under test.

#include <algorithm>
#include <string>

#include "swapbit/model_exec.hpp"

namespace swapbit::testing {

// Sandwich bounds for register operations in an enumerated interleaving:
// a read must return at least the largest value whose write completed before
// the read began, and at most the largest value whose write had started
// before the read completed (the initial value counts for both sides).
inline std::string check_register_sandwich(
    const model::execution_outcome& out, std::uint64_t initial) {
  for (const auto& read : out.base_trace) {
    if (read.kind != model::model_op_kind::read_max) continue;
    std::uint64_t lower = initial;
    std::uint64_t upper = initial;
    for (const auto& write : out.base_trace) {
      if (write.kind != model::model_op_kind::write_max) continue;
      if (write.seq < read.start_seq) lower = std::max(lower, write.result);
      if (write.start_seq < read.seq) upper = std::max(upper, write.result);
    }
    if (read.result < lower || read.result > upper)
      return "read by process " + std::to_string(read.proc) + " returned " +
             std::to_string(read.result) + ", outside [" +
             std::to_string(lower) + ", " + std::to_string(upper) + "]";
  }
  return "";
}

}  // namespace swapbit::testing

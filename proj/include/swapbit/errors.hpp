#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace swapbit {

// A caller broke an operation's precondition.
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

// A bounded backend ran out of room. Distinct from contract_error so the
// harness can report exhaustion separately from caller bugs.
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A request exceeded a configured size bound and was refused outright.
struct refusal_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input text did not match the expected file format. `line` is 1-based.
struct parse_error : std::runtime_error {
  parse_error(std::size_t line_no, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
        line(line_no) {}
  std::size_t line;
};

// Instrumentation data is internally inconsistent (e.g. duplicate tickets).
struct instrumentation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace swapbit

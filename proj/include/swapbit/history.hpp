#pragma once

#include <cstdint>
#include <vector>

#include "swapbit/base_objects.hpp"

namespace swapbit {

enum class event_kind : std::uint8_t { invoke, response };

// One timestamped history event. `value` is the operation's input on invoke
// and its result on response. `seq` comes from a single global clock, so
// comparing a response seq against an invoke seq decides real-time order.
struct event {
  std::uint64_t seq = 0;
  std::uint32_t proc = 0;
  std::uint32_t op_id = 0;
  event_kind kind = event_kind::invoke;
  bit_value value = 0;
};

// A recorded execution: the object's initial value plus invoke/response
// events ordered by seq. Pending invokes (without a response) may appear
// only as a process's last operation.
struct history {
  bit_value init = 0;
  std::vector<event> events;

  std::size_t completed_ops() const;
  std::size_t pending_ops() const;

  // Throws contract_error when the event sequence is not well-formed.
  void validate() const;
};

}  // namespace swapbit

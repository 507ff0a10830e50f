#pragma once

#include <cstdint>
#include <vector>

#include "swapbit/base_objects.hpp"

namespace swapbit {

// Bounded max register built from one-bit read-write registers arranged as a
// recursive binary tree of switches. Capacity must be a power of two; a
// capacity-1 tree is a leaf holding the constant 0 and needs no storage.
//
// write_max(x) on capacity c: if x >= c/2, write x - c/2 into the right
// subtree and then set the switch; otherwise read the switch and, if it is
// still 0, write x into the left subtree (a set switch means the value is
// already dominated and the write returns). read follows switches down:
// a set switch adds c/2 and descends right, a clear one descends left.
//
// Every operation touches at most one switch per level, so on capacity 2^k
// it performs at most k register accesses (bounded by k + 1). Switches are
// never unset.
class tree_max_register {
 public:
  explicit tree_max_register(std::uint64_t capacity, std::uint64_t initial = 0);

  std::uint64_t capacity() const { return capacity_; }
  unsigned depth() const { return depth_; }

  std::uint64_t read(step_counter& steps) const;

  // Throws capacity_error when x >= capacity.
  void write_max(std::uint64_t x, step_counter& steps);

 private:
  std::uint64_t capacity_;
  unsigned depth_;
  // Internal nodes in heap order (children of i at 2i+1, 2i+2); capacity - 1
  // one-bit cells, none for a leaf-only tree.
  std::vector<register_cell> switches_;
};

}  // namespace swapbit

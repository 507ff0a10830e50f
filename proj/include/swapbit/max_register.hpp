#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "swapbit/base_objects.hpp"
#include "swapbit/maxreg_tree.hpp"

namespace swapbit {

enum class backend_kind : std::uint8_t { atomic, regtree };

// Handle over the two max-register backends. Reads return the largest value
// of any completed write_max (never exceeding the largest started one) and
// are monotone per process; both backends keep that contract, they differ
// only in cost model and bounds.
class max_register {
 public:
  static max_register make_atomic(std::uint64_t initial = 0) {
    return max_register(std::in_place_type<atomic_max_register>, initial);
  }

  // Bounded tree backend; capacity must be a power of two, initial < capacity.
  static max_register make_tree(std::uint64_t capacity, std::uint64_t initial = 0) {
    return max_register(std::in_place_type<tree_max_register>, capacity, initial);
  }

  backend_kind backend() const {
    return std::holds_alternative<atomic_max_register>(backend_)
               ? backend_kind::atomic
               : backend_kind::regtree;
  }

  // Empty for the unbounded atomic backend.
  std::optional<std::uint64_t> capacity() const {
    if (const auto* tree = std::get_if<tree_max_register>(&backend_))
      return tree->capacity();
    return std::nullopt;
  }

  std::uint64_t read(step_counter& steps) const {
    return std::visit([&](const auto& reg) { return reg.read(steps); }, backend_);
  }

  void write_max(std::uint64_t x, step_counter& steps) {
    std::visit([&](auto& reg) { reg.write_max(x, steps); }, backend_);
  }

 private:
  template <class T, class... Args>
  explicit max_register(std::in_place_type_t<T> tag, Args&&... args)
      : backend_(tag, std::forward<Args>(args)...) {}

  std::variant<atomic_max_register, tree_max_register> backend_;
};

}  // namespace swapbit

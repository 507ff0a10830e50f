#include "swapbit/swap_object.hpp"

#include <bit>
#include <unordered_set>
#include <vector>

namespace swapbit {

struct swap_object::segment {
  explicit segment(std::size_t n) : bits(n) {}
  std::vector<tas_bit> bits;
};

namespace {

std::size_t segment_of(std::uint64_t index) {
  return static_cast<std::size_t>(std::bit_width(index + 1) - 1);
}

std::uint64_t offset_in_segment(std::uint64_t index, std::size_t seg) {
  return (index + 1) - (std::uint64_t{1} << seg);
}

max_register make_round_register(bit_value initial, backend_kind backend,
                                 std::uint64_t capacity) {
  if (backend == backend_kind::atomic) return max_register::make_atomic(initial);
  if (capacity == 0)
    throw contract_error("regtree backend needs an explicit capacity");
  return max_register::make_tree(capacity, initial);
}

}  // namespace

swap_object::swap_object(bit_value initial, backend_kind backend,
                         std::uint64_t capacity)
    : round_(make_round_register(initial, backend, capacity)), initial_(initial) {
  require_bit(initial);
  slot(initial).preset_before_sharing();
}

swap_object::~swap_object() {
  for (auto& ptr : segments_) delete ptr.load();
}

std::pair<bit_value, swap_record> swap_object::swap(bit_value v) {
  require_bit(v);
  swap_record rec;
  rec.input = v;
  step_counter base_ops;
  step_counter native;

  std::uint64_t r = round_.read(native);
  base_ops.add();
  rec.round_read = r;
  if ((r & 1u) != v) {
    r += 1;
    round_.write_max(r, native);
    base_ops.add();
  }
  rec.round = r;

  tas_bit::outcome tas = slot(r).test_and_set(tickets_, native);
  base_ops.add();
  rec.tas_result = tas.previous;
  rec.ticket = tas.ticket;
  rec.base_ops = static_cast<std::uint32_t>(base_ops.count());
  rec.reg_ops = static_cast<std::uint32_t>(native.count());
  rec.returned = tas.previous == 0 ? bit_not(v) : v;
  return {rec.returned, rec};
}

std::uint64_t swap_object::read_round() const {
  step_counter probe;
  return round_.read(probe);
}

swap_metrics swap_object::metrics(std::span<const swap_record> records) const {
  swap_metrics m;
  m.total_swaps = records.size();
  std::unordered_set<std::uint64_t> winner_rounds;
  for (const auto& rec : records)
    if (rec.tas_result == 0 && rec.round > initial_) winner_rounds.insert(rec.round);
  m.switch_count = winner_rounds.size();
  m.max_round_final = read_round();
  return m;
}

bool swap_object::bit_is_set(std::uint64_t index) const {
  std::size_t seg = segment_of(index);
  segment* published = segments_[seg].load(std::memory_order_acquire);
  if (published == nullptr) return false;
  return published->bits[offset_in_segment(index, seg)].is_set();
}

tas_bit& swap_object::slot(std::uint64_t index) {
  std::size_t seg = segment_of(index);
  segment* published = segments_[seg].load(std::memory_order_acquire);
  if (published == nullptr) published = publish_segment(seg);
  return published->bits[offset_in_segment(index, seg)];
}

swap_object::segment* swap_object::publish_segment(std::size_t seg_index) {
  auto* fresh = new segment(std::size_t{1} << seg_index);
  segment* expected = nullptr;
  if (segments_[seg_index].compare_exchange_strong(expected, fresh,
                                                   std::memory_order_acq_rel)) {
    return fresh;
  }
  delete fresh;  // lost the publish race
  return expected;
}

}  // namespace swapbit

#include "swapbit/lin_check.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "swapbit/errors.hpp"

namespace swapbit {

std::size_t history::completed_ops() const {
  std::size_t n = 0;
  for (const auto& ev : events)
    if (ev.kind == event_kind::response) ++n;
  return n;
}

std::size_t history::pending_ops() const {
  std::size_t invokes = 0;
  for (const auto& ev : events)
    if (ev.kind == event_kind::invoke) ++invokes;
  return invokes - completed_ops();
}

void history::validate() const {
  require_bit(init);
  struct proc_progress {
    bool pending = false;
    bool has_prev = false;
    std::uint32_t current_op = 0;
    std::uint32_t prev_op = 0;
  };
  std::unordered_map<std::uint32_t, proc_progress> procs;
  bool first = true;
  std::uint64_t prev_seq = 0;
  for (const auto& ev : events) {
    if (!first && ev.seq <= prev_seq)
      throw contract_error("history event seq must be strictly increasing");
    prev_seq = ev.seq;
    first = false;
    require_bit(ev.value);
    auto& progress = procs[ev.proc];
    if (ev.kind == event_kind::invoke) {
      if (progress.pending)
        throw contract_error("invoke while an operation is pending on process " +
                             std::to_string(ev.proc));
      if (progress.has_prev && ev.op_id <= progress.prev_op)
        throw contract_error("per-process op ids must increase");
      progress.pending = true;
      progress.current_op = ev.op_id;
    } else {
      if (!progress.pending || progress.current_op != ev.op_id)
        throw contract_error("response without a matching invoke (process " +
                             std::to_string(ev.proc) + ", op " +
                             std::to_string(ev.op_id) + ")");
      progress.pending = false;
      progress.has_prev = true;
      progress.prev_op = ev.op_id;
    }
  }
}

std::vector<bit_value> seq_swap_oracle(bit_value init,
                                       std::span<const bit_value> inputs) {
  require_bit(init);
  std::vector<bit_value> previous;
  previous.reserve(inputs.size());
  bit_value state = init;
  for (bit_value v : inputs) {
    require_bit(v);
    previous.push_back(state);
    state = v;
  }
  return previous;
}

namespace {

constexpr std::uint64_t kNoSeq = ~std::uint64_t{0};

struct flat_op {
  std::uint32_t proc = 0;
  std::uint32_t op_id = 0;
  bit_value input = 0;
  bit_value output = 0;           // meaningful only when completed
  bool completed = false;
  std::uint64_t inv_seq = 0;
  std::uint64_t res_seq = kNoSeq;  // pending ops never precede anything
};

// Pairs up invoke/response events. Assumes h.validate() passed.
std::vector<flat_op> collect_ops(const history& h) {
  std::vector<flat_op> ops;
  std::unordered_map<std::uint64_t, std::size_t> open;  // (proc,op_id) -> index
  auto key = [](std::uint32_t proc, std::uint32_t op_id) {
    return (std::uint64_t{proc} << 32) | op_id;
  };
  for (const auto& ev : h.events) {
    if (ev.kind == event_kind::invoke) {
      open[key(ev.proc, ev.op_id)] = ops.size();
      ops.push_back({ev.proc, ev.op_id, ev.value, 0, false, ev.seq, kNoSeq});
    } else {
      flat_op& op = ops[open.at(key(ev.proc, ev.op_id))];
      op.completed = true;
      op.output = ev.value;
      op.res_seq = ev.seq;
    }
  }
  return ops;
}

struct bf_search {
  const std::vector<flat_op>& ops;
  std::vector<std::uint64_t> preds;  // preds[j]: ops that must precede j
  std::uint64_t completed_mask = 0;
  std::vector<lin_op_ref> order;

  explicit bf_search(const std::vector<flat_op>& all) : ops(all), preds(all.size(), 0) {
    for (std::size_t j = 0; j < ops.size(); ++j) {
      if (ops[j].completed) completed_mask |= std::uint64_t{1} << j;
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (i != j && ops[i].res_seq < ops[j].inv_seq)
          preds[j] |= std::uint64_t{1} << i;
    }
  }

  bool search(std::uint64_t placed, bit_value state) {
    if ((completed_mask & ~placed) == 0) return true;  // leftovers are pending
    for (std::size_t j = 0; j < ops.size(); ++j) {
      const std::uint64_t bit = std::uint64_t{1} << j;
      if ((placed & bit) != 0) continue;
      if ((preds[j] & ~placed) != 0) continue;
      if (ops[j].completed && ops[j].output != state) continue;
      order.push_back({ops[j].proc, ops[j].op_id});
      if (search(placed | bit, ops[j].input)) return true;
      order.pop_back();
    }
    return false;
  }
};

}  // namespace

brute_force_result brute_force_linearizable(const history& h,
                                            const brute_force_options& opts) {
  h.validate();
  std::vector<flat_op> ops = collect_ops(h);
  std::size_t completed = 0;
  for (const auto& op : ops) completed += op.completed ? 1 : 0;
  if (completed > opts.max_completed_ops)
    throw refusal_error("history has " + std::to_string(completed) +
                        " completed operations, above the brute-force bound of " +
                        std::to_string(opts.max_completed_ops));
  if (ops.size() > 64)
    throw refusal_error("history has " + std::to_string(ops.size()) +
                        " operations, above the search mask width of 64");

  bf_search search(ops);
  brute_force_result result;
  result.linearizable = search.search(0, h.init);
  if (result.linearizable) result.witness = std::move(search.order);
  return result;
}

std::vector<swap_record> grouped_linearization::flattened() const {
  std::vector<swap_record> flat;
  for (const auto& g : groups)
    flat.insert(flat.end(), g.records.begin(), g.records.end());
  return flat;
}

grouped_linearization explicit_linearize(std::span<const swap_record> records,
                                         bit_value init) {
  require_bit(init);
  std::map<std::uint64_t, std::vector<swap_record>> by_round;
  for (const auto& rec : records) by_round[rec.round].push_back(rec);

  grouped_linearization g;
  g.groups.reserve(by_round.size());
  for (auto& [round, members] : by_round) {
    std::sort(members.begin(), members.end(),
              [](const swap_record& a, const swap_record& b) {
                return a.ticket < b.ticket;
              });
    for (std::size_t i = 1; i < members.size(); ++i)
      if (members[i].ticket == members[i - 1].ticket)
        throw instrumentation_error("duplicate ticket " +
                                    std::to_string(members[i].ticket) +
                                    " in round " + std::to_string(round));
    g.groups.push_back({round, std::move(members)});
  }
  return g;
}

verify_verdict verify_explicit(const grouped_linearization& g, const history& h,
                               bit_value init) {
  h.validate();
  require_bit(init);
  if (h.pending_ops() != 0)
    throw contract_error("verify_explicit requires a complete history");

  std::vector<flat_op> ops = collect_ops(h);
  std::unordered_map<std::uint64_t, const flat_op*> by_key;
  auto key = [](std::uint32_t proc, std::uint32_t op_id) {
    return (std::uint64_t{proc} << 32) | op_id;
  };
  for (const auto& op : ops) by_key.emplace(key(op.proc, op.op_id), &op);

  std::vector<swap_record> flat = g.flattened();
  if (flat.size() != ops.size())
    throw contract_error("record set does not match history operations (" +
                         std::to_string(flat.size()) + " records vs " +
                         std::to_string(ops.size()) + " ops)");
  std::unordered_set<std::uint64_t> seen;
  for (const auto& rec : flat) {
    if (by_key.find(key(rec.proc, rec.op_id)) == by_key.end())
      throw contract_error("record for unknown operation (process " +
                           std::to_string(rec.proc) + ", op " +
                           std::to_string(rec.op_id) + ")");
    if (!seen.insert(key(rec.proc, rec.op_id)).second)
      throw contract_error("duplicate record for one operation");
  }

  auto fail = [](int clause, std::string reason) {
    return verify_verdict{false, clause, std::move(reason)};
  };
  auto op_name = [](const flat_op& op) {
    return "process " + std::to_string(op.proc) + " op " + std::to_string(op.op_id);
  };

  // Clause 1: real-time consistency of the flattened order.
  std::uint64_t max_inv_seq = 0;
  bool have_earlier = false;
  for (const auto& rec : flat) {
    const flat_op& op = *by_key.at(key(rec.proc, rec.op_id));
    if (have_earlier && op.res_seq < max_inv_seq)
      return fail(1, "clause 1: " + op_name(op) +
                         " finished before an operation placed ahead of it began");
    max_inv_seq = std::max(max_inv_seq, op.inv_seq);
    have_earlier = true;
  }

  // Clause 2: replay through the sequential oracle.
  std::vector<bit_value> inputs;
  inputs.reserve(flat.size());
  for (const auto& rec : flat)
    inputs.push_back(by_key.at(key(rec.proc, rec.op_id))->input);
  std::vector<bit_value> expected = seq_swap_oracle(init, inputs);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const flat_op& op = *by_key.at(key(flat[i].proc, flat[i].op_id));
    if (op.output != expected[i])
      return fail(2, "clause 2: " + op_name(op) + " returned " +
                         std::to_string(op.output) + " but the linearization yields " +
                         std::to_string(expected[i]));
  }

  // Clause 3: round parity equals the input.
  for (const auto& rec : flat) {
    const flat_op& op = *by_key.at(key(rec.proc, rec.op_id));
    if ((rec.round & 1u) != op.input)
      return fail(3, "clause 3: " + op_name(op) + " has round " +
                         std::to_string(rec.round) + " with input " +
                         std::to_string(op.input));
  }

  // Clause 4: no gaps in the populated rounds above init + 1.
  std::unordered_set<std::uint64_t> rounds;
  for (const auto& grp : g.groups) rounds.insert(grp.round);
  for (const auto& grp : g.groups) {
    if (grp.round > std::uint64_t{init} + 1 && rounds.count(grp.round - 1) == 0)
      return fail(4, "clause 4: round " + std::to_string(grp.round) +
                         " is populated but round " + std::to_string(grp.round - 1) +
                         " is not");
  }

  // Clause 5: one TAS winner per group, none in the preset group.
  for (const auto& grp : g.groups) {
    std::size_t winners = 0;
    for (const auto& rec : grp.records) winners += rec.tas_result == 0 ? 1 : 0;
    if (grp.round == init && winners != 0)
      return fail(5, "clause 5: preset round " + std::to_string(grp.round) +
                         " has a TAS winner");
    if (grp.round != init && winners != 1)
      return fail(5, "clause 5: round " + std::to_string(grp.round) + " has " +
                         std::to_string(winners) + " TAS winners");
  }

  return {true, 0, ""};
}

realtime_round_result check_realtime_rounds(const history& h,
                                            std::span<const swap_record> records) {
  h.validate();
  std::unordered_map<std::uint64_t, std::uint64_t> round_of;
  auto key = [](std::uint32_t proc, std::uint32_t op_id) {
    return (std::uint64_t{proc} << 32) | op_id;
  };
  for (const auto& rec : records) round_of[key(rec.proc, rec.op_id)] = rec.round;

  realtime_round_result result;
  std::uint64_t completed = 0;
  std::uint64_t max_completed_round = 0;
  for (const auto& ev : h.events) {
    auto found = round_of.find(key(ev.proc, ev.op_id));
    if (found == round_of.end()) {
      if (ev.kind == event_kind::response)
        throw contract_error("completed operation without a record (process " +
                             std::to_string(ev.proc) + ", op " +
                             std::to_string(ev.op_id) + ")");
      continue;  // pending op without instrumentation
    }
    if (ev.kind == event_kind::invoke) {
      result.pairs_checked += completed;
      if (completed > 0 && found->second < max_completed_round) {
        result.ok = false;
        result.reason = "process " + std::to_string(ev.proc) + " op " +
                        std::to_string(ev.op_id) + " has round " +
                        std::to_string(found->second) +
                        " below an already-finished operation's round " +
                        std::to_string(max_completed_round);
        return result;
      }
    } else {
      ++completed;
      max_completed_round = std::max(max_completed_round, found->second);
    }
  }
  return result;
}

}  // namespace swapbit

#include "swapbit/model_exec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <string>
#include <utility>

#include "swapbit/errors.hpp"
#include "swapbit/rng.hpp"

namespace swapbit::model {

namespace {

constexpr std::size_t kMaxProcs = 16;
constexpr std::uint64_t kMaxSlots = 4096;

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
  return prod > ~std::uint64_t{0} ? ~std::uint64_t{0}
                                  : static_cast<std::uint64_t>(prod);
}

// C(n, k) with saturation at UINT64_MAX.  Exact while unsaturated: the
// running product c * (n - k + j) is always divisible by j.
std::uint64_t binomial_sat(std::uint64_t n, std::uint64_t k) {
  if (k > n - k) k = n - k;
  std::uint64_t c = 1;
  for (std::uint64_t j = 1; j <= k; ++j) {
    if (c == ~std::uint64_t{0}) return c;
    const unsigned __int128 t =
        static_cast<unsigned __int128>(c) * (n - k + j) / j;
    c = t > ~std::uint64_t{0} ? ~std::uint64_t{0} : static_cast<std::uint64_t>(t);
  }
  return c;
}

// Intra-operation continuation for the register-tree backend.  One scheduler
// step performs exactly one switch access; turns that touch no switch are
// advanced for free within the same step.
struct tree_walk {
  enum class mode : std::uint8_t { idle, descend_read, descend_write, set_phase };
  mode m = mode::idle;
  std::uint64_t node = 0;
  std::uint64_t half = 0;
  std::uint64_t acc = 0;
  std::uint64_t target = 0;
  std::uint32_t n_collected = 0;
  std::array<std::uint32_t, 64> collected{};
};

struct proc_state {
  std::uint32_t prog_index = 0;
  std::uint8_t stage = 0;  // within a swap: 0 read, 1 write_max, 2 TAS
  bool op_started = false;
  std::uint64_t r = 0;          // swap's working round
  std::uint64_t op_start = 0;   // clock tick of the op's first step
  tree_walk walk;
  swap_record rec;
};

std::uint64_t tree_depth(std::uint64_t capacity) {
  return std::uint64_t{std::bit_width(capacity)} - 1;
}

class engine {
 public:
  engine(const std::vector<process_program>& programs, const exec_config& cfg)
      : programs_(programs), cfg_(cfg) {
    require_bit(cfg.init);
    if (programs.size() > kMaxProcs)
      throw refusal_error("model supports at most " +
                          std::to_string(kMaxProcs) + " processes, got " +
                          std::to_string(programs.size()));
    if (cfg.backend == backend_kind::regtree) {
      if (cfg.capacity == 0 || !std::has_single_bit(cfg.capacity))
        throw contract_error("register-tree capacity must be a power of two");
      if (cfg.init >= cfg.capacity)
        throw capacity_error("initial round " + std::to_string(cfg.init) +
                             " does not fit capacity " +
                             std::to_string(cfg.capacity));
      capacity_ = cfg.capacity;
      switches_.assign(capacity_ - 1, 0);
      seed_tree(cfg.init);
    } else {
      max_round_ = cfg.init;
    }

    std::uint64_t highest = cfg.init;
    std::uint64_t total_swaps = 0;
    for (const auto& prog : programs) {
      for (const auto& op : prog) {
        if (op.kind == model_op_kind::swap)
          ++total_swaps;
        else if (op.kind != model_op_kind::read_max)
          highest = std::max(highest, op.arg);
      }
    }
    const std::uint64_t slots = highest + total_swaps + 2;
    if (slots > kMaxSlots)
      throw refusal_error("model TAS slot space of " + std::to_string(slots) +
                          " exceeds the limit of " + std::to_string(kMaxSlots));
    claims_.assign(slots, 0);
    claims_[cfg.init] = 1;  // preset bit, as set by a winner before time began

    procs_.resize(programs.size());
    out.hist.init = cfg.init;
  }

  std::uint32_t proc_count() const {
    return static_cast<std::uint32_t>(programs_.size());
  }

  bool finished(std::uint32_t p) const {
    return procs_[p].prog_index == programs_[p].size();
  }

  bool all_finished() const {
    for (std::uint32_t p = 0; p < proc_count(); ++p)
      if (!finished(p)) return false;
    return true;
  }

  // One base step of process p: at most one shared access, clock ticks for
  // the access and for any invoke/response/trace event emitted around it.
  void step(std::uint32_t p) {
    proc_state& ps = procs_[p];
    if (finished(p)) throw contract_error("stepping a finished process");
    const model_op& op = programs_[p][ps.prog_index];
    if (!ps.op_started) begin_op(p, ps, op);
    switch (op.kind) {
      case model_op_kind::swap:
        step_swap(p, ps, op);
        break;
      case model_op_kind::write_max:
        if (backend_write_step(ps, op.arg))
          complete_raw(p, ps, op.kind, op.arg);
        break;
      case model_op_kind::read_max: {
        std::uint64_t value = 0;
        if (backend_read_step(ps, value)) complete_raw(p, ps, op.kind, value);
        break;
      }
      case model_op_kind::tas: {
        ++clock_;
        ps.rec.reg_ops += 1;
        std::uint64_t& claim = claim_slot(op.arg);
        const std::uint64_t previous = claim == 0 ? 0 : 1;
        if (claim == 0) claim = clock_ + 1;
        complete_raw(p, ps, op.kind, previous);
        break;
      }
    }
  }

  void finalize(std::uint64_t steps) {
    out.final_round = quiescent_round();
    out.final_value = static_cast<bit_value>(out.final_round & 1u);
    out.total_steps = steps;
  }

  struct snapshot {
    std::uint64_t max_round = 0;
    std::uint64_t clock = 0;
    std::vector<std::uint8_t> switches;
    std::vector<std::uint64_t> claims;
    std::vector<proc_state> procs;
    std::size_t n_events = 0;
    std::size_t n_records = 0;
    std::size_t n_trace = 0;
  };

  snapshot save() const {
    return {max_round_,    clock_,         switches_,
            claims_,       procs_,         out.hist.events.size(),
            out.records.size(), out.base_trace.size()};
  }

  void restore(const snapshot& s) {
    max_round_ = s.max_round;
    clock_ = s.clock;
    switches_ = s.switches;
    claims_ = s.claims;
    procs_ = s.procs;
    out.hist.events.resize(s.n_events);
    out.records.resize(s.n_records);
    out.base_trace.resize(s.n_trace);
  }

  execution_outcome out;

 private:
  void seed_tree(std::uint64_t x) {
    std::uint64_t node = 0;
    std::uint64_t half = capacity_ >> 1;
    while (half != 0) {
      if ((x & half) != 0) {
        switches_[node] = 1;
        node = 2 * node + 2;
      } else {
        node = 2 * node + 1;
      }
      half >>= 1;
    }
  }

  std::uint64_t& claim_slot(std::uint64_t slot) {
    if (slot >= claims_.size())
      throw contract_error("model TAS slot bound exceeded");
    return claims_[slot];
  }

  void begin_op(std::uint32_t p, proc_state& ps, const model_op& op) {
    ps.op_started = true;
    ps.stage = 0;
    ps.op_start = clock_ + 1;  // the tick this step is about to take
    ps.rec = swap_record{};
    ps.rec.proc = p;
    ps.rec.op_id = ps.prog_index;
    if (op.kind == model_op_kind::swap) {
      ps.rec.input = op.input;
      ++clock_;
      out.hist.events.push_back(
          {clock_, p, ps.prog_index, event_kind::invoke, op.input});
      begin_backend_read(ps);
    } else if (op.kind == model_op_kind::read_max) {
      begin_backend_read(ps);
    } else if (op.kind == model_op_kind::write_max) {
      begin_backend_write(ps, op.arg);
    }
  }

  void advance(proc_state& ps) {
    ++ps.prog_index;
    ps.op_started = false;
    ps.stage = 0;
    ps.walk = tree_walk{};
  }

  void complete_raw(std::uint32_t p, proc_state& ps, model_op_kind kind,
                    std::uint64_t result) {
    ++clock_;
    out.base_trace.push_back({ps.op_start, clock_, p, ps.prog_index, kind, result});
    advance(ps);
  }

  void complete_swap(std::uint32_t p, proc_state& ps) {
    ++clock_;
    out.hist.events.push_back(
        {clock_, p, ps.prog_index, event_kind::response, ps.rec.returned});
    out.records.push_back(ps.rec);
    advance(ps);
  }

  void step_swap(std::uint32_t p, proc_state& ps, const model_op& op) {
    switch (ps.stage) {
      case 0: {  // read the current round
        std::uint64_t value = 0;
        if (!backend_read_step(ps, value)) return;
        ps.rec.base_ops += 1;
        ps.rec.round_read = value;
        ps.r = value;
        if ((value & 1u) != op.input) {
          ps.r = value + 1;
          ps.stage = 1;
          begin_backend_write(ps, ps.r);
        } else {
          ps.stage = 2;
        }
        ps.rec.round = ps.r;
        return;
      }
      case 1: {  // publish the bumped round
        if (!backend_write_step(ps, ps.r)) return;
        ps.rec.base_ops += 1;
        ps.stage = 2;
        return;
      }
      default: {  // claim this round's bit
        ++clock_;
        ps.rec.reg_ops += 1;
        ps.rec.base_ops += 1;
        std::uint64_t& claim = claim_slot(ps.r);
        if (claim == 0) {
          claim = clock_ + 1;
          ps.rec.tas_result = 0;
          ps.rec.ticket = clock_;
          ps.rec.returned = bit_not(op.input);
        } else {
          ps.rec.tas_result = 1;
          ps.rec.ticket = clock_;
          ps.rec.returned = op.input;
        }
        complete_swap(p, ps);
        return;
      }
    }
  }

  void begin_backend_read(proc_state& ps) {
    if (cfg_.backend == backend_kind::regtree) {
      ps.walk = tree_walk{};
      ps.walk.m = tree_walk::mode::descend_read;
      ps.walk.half = capacity_ >> 1;
    }
  }

  void begin_backend_write(proc_state& ps, std::uint64_t x) {
    if (cfg_.backend == backend_kind::regtree) {
      if (x >= capacity_)
        throw capacity_error("write of " + std::to_string(x) +
                             " does not fit capacity " +
                             std::to_string(capacity_));
      ps.walk = tree_walk{};
      ps.walk.m = tree_walk::mode::descend_write;
      ps.walk.half = capacity_ >> 1;
      ps.walk.target = x;
    }
  }

  // Returns true when the read has completed, with its value in value_out.
  bool backend_read_step(proc_state& ps, std::uint64_t& value_out) {
    if (cfg_.backend == backend_kind::atomic) {
      ++clock_;
      ps.rec.reg_ops += 1;
      value_out = max_round_;
      return true;
    }
    tree_walk& w = ps.walk;
    if (w.half == 0) {  // capacity 1: constant zero, no switch to touch
      value_out = 0;
      w.m = tree_walk::mode::idle;
      return true;
    }
    ++clock_;
    ps.rec.reg_ops += 1;
    if (switches_[w.node] != 0) {
      w.acc += w.half;
      w.node = 2 * w.node + 2;
    } else {
      w.node = 2 * w.node + 1;
    }
    w.half >>= 1;
    if (w.half == 0) {
      value_out = w.acc;
      w.m = tree_walk::mode::idle;
      return true;
    }
    return false;
  }

  // Returns true when the write has completed.
  bool backend_write_step(proc_state& ps, std::uint64_t x) {
    if (cfg_.backend == backend_kind::atomic) {
      ++clock_;
      ps.rec.reg_ops += 1;
      max_round_ = std::max(max_round_, x);
      return true;
    }
    tree_walk& w = ps.walk;
    bool accessed = false;
    while (true) {
      if (w.m == tree_walk::mode::descend_write) {
        if (w.half == 0) {
          w.m = tree_walk::mode::set_phase;
          continue;
        }
        if ((w.target & w.half) != 0) {  // right turn: remember, touch later
          w.collected[w.n_collected++] = static_cast<std::uint32_t>(w.node);
          w.node = 2 * w.node + 2;
          w.half >>= 1;
          continue;
        }
        if (accessed) return false;
        accessed = true;
        ++clock_;
        ps.rec.reg_ops += 1;
        const std::uint8_t s = switches_[w.node];
        w.node = 2 * w.node + 1;
        w.half >>= 1;
        if (s != 0) w.half = 0;  // existing value dominates this path
        continue;
      }
      // set phase: raise collected switches bottom-up
      if (w.n_collected == 0) {
        w.m = tree_walk::mode::idle;
        return true;
      }
      if (accessed) return false;
      accessed = true;
      ++clock_;
      ps.rec.reg_ops += 1;
      switches_[w.collected[--w.n_collected]] = 1;
    }
  }

  std::uint64_t quiescent_round() const {
    if (cfg_.backend == backend_kind::atomic) return max_round_;
    std::uint64_t node = 0;
    std::uint64_t half = capacity_ >> 1;
    std::uint64_t acc = 0;
    while (half != 0) {
      if (switches_[node] != 0) {
        acc += half;
        node = 2 * node + 2;
      } else {
        node = 2 * node + 1;
      }
      half >>= 1;
    }
    return acc;
  }

  const std::vector<process_program>& programs_;
  exec_config cfg_;
  std::uint64_t capacity_ = 0;
  std::uint64_t max_round_ = 0;
  std::vector<std::uint8_t> switches_;
  std::vector<std::uint64_t> claims_;
  std::uint64_t clock_ = 0;
  std::vector<proc_state> procs_;
};

std::uint64_t worst_op_steps(const model_op& op, const exec_config& cfg) {
  std::uint64_t unit = 1;
  if (cfg.backend == backend_kind::regtree)
    unit = std::max<std::uint64_t>(tree_depth(cfg.capacity), 1);
  switch (op.kind) {
    case model_op_kind::swap:
      return 2 * unit + 1;
    case model_op_kind::write_max:
    case model_op_kind::read_max:
      return unit;
    default:
      return 1;
  }
}

std::vector<std::uint64_t> worst_proc_steps(
    const std::vector<process_program>& programs, const exec_config& cfg) {
  std::vector<std::uint64_t> steps;
  steps.reserve(programs.size());
  for (const auto& prog : programs) {
    std::uint64_t total = 0;
    for (const auto& op : prog) total += worst_op_steps(op, cfg);
    steps.push_back(total);
  }
  return steps;
}

void dfs(engine& eng, schedule& order, std::uint64_t& count,
         const explore_visitor& visit) {
  if (eng.all_finished()) {
    ++count;
    eng.finalize(order.size());
    if (visit) visit(order, eng.out);
    return;
  }
  for (std::uint32_t p = 0; p < eng.proc_count(); ++p) {
    if (eng.finished(p)) continue;
    const engine::snapshot snap = eng.save();
    eng.step(p);
    order.push_back(p);
    dfs(eng, order, count, visit);
    order.pop_back();
    eng.restore(snap);
  }
}

}  // namespace

std::uint64_t worst_case_steps(const std::vector<process_program>& programs,
                               const exec_config& cfg) {
  std::uint64_t total = 0;
  for (std::uint64_t s : worst_proc_steps(programs, cfg)) total += s;
  return total;
}

std::uint64_t schedule_upper_bound(const std::vector<process_program>& programs,
                                   const exec_config& cfg) {
  std::uint64_t bound = 1;
  std::uint64_t placed = 0;
  for (std::uint64_t s : worst_proc_steps(programs, cfg)) {
    placed += s;
    bound = sat_mul(bound, binomial_sat(placed, s));
  }
  return bound;
}

execution_outcome run_schedule(const std::vector<process_program>& programs,
                               const schedule& order, const exec_config& cfg) {
  engine eng(programs, cfg);
  for (std::uint32_t p : order) {
    if (p >= eng.proc_count())
      throw contract_error("schedule names process " + std::to_string(p) +
                           " of " + std::to_string(eng.proc_count()));
    if (eng.finished(p))
      throw contract_error("schedule steps finished process " +
                           std::to_string(p));
    eng.step(p);
  }
  if (!eng.all_finished())
    throw contract_error("schedule ends before every program completes");
  eng.finalize(order.size());
  return std::move(eng.out);
}

execution_outcome run_random(const std::vector<process_program>& programs,
                             const exec_config& cfg, std::uint64_t seed) {
  engine eng(programs, cfg);
  xorshift64s rng(seed);
  std::uint64_t steps = 0;
  std::vector<std::uint32_t> runnable;
  while (!eng.all_finished()) {
    runnable.clear();
    for (std::uint32_t p = 0; p < eng.proc_count(); ++p)
      if (!eng.finished(p)) runnable.push_back(p);
    eng.step(runnable[rng.below(runnable.size())]);
    ++steps;
  }
  eng.finalize(steps);
  return std::move(eng.out);
}

std::uint64_t explore(const std::vector<process_program>& programs,
                      const exec_config& cfg, const explore_visitor& visit) {
  const std::uint64_t worst = worst_case_steps(programs, cfg);
  if (worst > cfg.step_bound) {
    const std::uint64_t bound = schedule_upper_bound(programs, cfg);
    const std::string bound_text =
        bound == ~std::uint64_t{0} ? "more than 10^19"
                                   : "up to " + std::to_string(bound);
    throw refusal_error("enumeration would interleave up to " +
                        std::to_string(worst) + " steps against a bound of " +
                        std::to_string(cfg.step_bound) + " (" + bound_text +
                        " schedules)");
  }
  engine eng(programs, cfg);
  schedule order;
  std::uint64_t count = 0;
  dfs(eng, order, count, visit);
  return count;
}

}  // namespace swapbit::model

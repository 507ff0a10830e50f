#include "swapbit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <bit>
#include <chrono>
#include <exception>
#include <filesystem>
#include <ostream>
#include <thread>
#include <utility>

#include "swapbit/errors.hpp"
#include "swapbit/history_io.hpp"
#include "swapbit/lin_check.hpp"
#include "swapbit/model_exec.hpp"
#include "swapbit/rng.hpp"

namespace swapbit::harness {

namespace {

constexpr std::uint32_t kMaxThreads = 1024;
constexpr std::uint64_t kMaxStressOps = 50'000'000;

// Smallest power-of-two round capacity with headroom for `total` swaps.
std::uint64_t fitting_capacity(bit_value init, std::uint64_t total) {
  return std::bit_ceil(std::uint64_t{init} + total + 2);
}

std::string render_schedule(const model::schedule& order) {
  std::string text;
  for (std::uint32_t p : order) {
    if (!text.empty()) text += ' ';
    text += std::to_string(p);
  }
  return text;
}

double percentile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  const auto index =
      static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
  return sorted[index];
}

}  // namespace

std::string_view pattern_name(input_pattern p) {
  switch (p) {
    case input_pattern::all_ones:
      return "all-ones";
    case input_pattern::all_zeros:
      return "all-zeros";
    case input_pattern::alternating:
      return "alternating";
    default:
      return "mixed";
  }
}

std::optional<input_pattern> pattern_from_name(std::string_view name) {
  if (name == "all-ones") return input_pattern::all_ones;
  if (name == "all-zeros") return input_pattern::all_zeros;
  if (name == "alternating") return input_pattern::alternating;
  if (name == "mixed") return input_pattern::mixed;
  return std::nullopt;
}

bit_value pattern_input(input_pattern p, std::uint32_t proc, std::uint64_t k) {
  switch (p) {
    case input_pattern::all_ones:
      return 1;
    case input_pattern::all_zeros:
      return 0;
    case input_pattern::alternating:
      return static_cast<bit_value>((proc + k) & 1u);
    default:
      switch (proc % 3) {
        case 0:
          return 1;
        case 1:
          return 0;
        default:
          return static_cast<bit_value>((proc + k) & 1u);
      }
  }
}

namespace {

// Every verdict the harness forms about one enumerated interleaving.
// Returns an empty string when the outcome is clean.
std::string check_leaf(const model::execution_outcome& outcome, bit_value init,
                       std::uint64_t total_swaps) {
  for (const auto& rec : outcome.records)
    if (!step_rule_holds(rec))
      return "step rule broken for process " + std::to_string(rec.proc) +
             " op " + std::to_string(rec.op_id);

  if (outcome.final_round > std::uint64_t{init} + total_swaps)
    return "final round " + std::to_string(outcome.final_round) +
           " above the bound " + std::to_string(std::uint64_t{init} + total_swaps);

  grouped_linearization g = explicit_linearize(outcome.records, init);
  const verify_verdict verdict = verify_explicit(g, outcome.hist, init);
  if (!verdict.pass) return "explicit verification failed: " + verdict.reason;

  if (outcome.hist.completed_ops() <= brute_force_options{}.max_completed_ops) {
    const brute_force_result bf = brute_force_linearizable(outcome.hist);
    if (!bf.linearizable)
      return "brute force found no linearization, but explicit verification passed";
  }
  return "";
}

}  // namespace

int run_exhaustive(const run_config& cfg, std::ostream& out) {
  if (!cfg.force_large) {
    if (cfg.procs > 3 || cfg.ops > 2)
      throw refusal_error(
          "exhaustive mode enumerates up to 3 processes x 2 ops each; pass "
          "--force-large to go beyond");
    if (cfg.backend == backend_kind::regtree)
      throw refusal_error(
          "register-tree enumeration multiplies every swap into switch steps; "
          "pass --force-large to run it");
  }

  const std::uint64_t total_swaps = std::uint64_t{cfg.procs} * cfg.ops;
  model::exec_config xc;
  xc.init = cfg.init;
  xc.backend = cfg.backend;
  xc.step_bound = cfg.force_large ? 96 : 24;
  if (cfg.backend == backend_kind::regtree)
    xc.capacity = cfg.capacity != 0 ? cfg.capacity
                                    : fitting_capacity(cfg.init, total_swaps);

  std::vector<input_pattern> patterns = cfg.patterns;
  if (patterns.empty())
    patterns = {input_pattern::all_ones, input_pattern::alternating};

  struct leaf_failure {
    std::string detail;
  };

  std::uint64_t grand_total = 0;
  for (input_pattern pat : patterns) {
    std::vector<model::process_program> programs(cfg.procs);
    for (std::uint32_t p = 0; p < cfg.procs; ++p)
      for (std::uint64_t k = 0; k < cfg.ops; ++k)
        programs[p].push_back(model::op_swap(pattern_input(pat, p, k)));

    try {
      const std::uint64_t count = model::explore(
          programs, xc,
          [&](const model::schedule& order,
              const model::execution_outcome& outcome) {
            const std::string detail = check_leaf(outcome, cfg.init, total_swaps);
            if (!detail.empty())
              throw leaf_failure{detail + " (pattern " +
                                 std::string(pattern_name(pat)) +
                                 ", schedule " + render_schedule(order) + ")"};
          });
      grand_total += count;
      out << "pattern " << pattern_name(pat) << ": " << count
          << " schedules, every history linearizable and verified\n";
    } catch (const leaf_failure& f) {
      out << "exhaustive: FAIL: " << f.detail << "\n";
      return exit_verification;
    }
  }
  out << "exhaustive: " << grand_total << " schedules across "
      << patterns.size() << " patterns, all clean\n";
  return exit_ok;
}

stress_data run_stress_collect(const run_config& cfg) {
  if (cfg.procs == 0) throw contract_error("stress needs at least one thread");
  if (cfg.procs > kMaxThreads)
    throw refusal_error("stress supports at most " +
                        std::to_string(kMaxThreads) + " threads");
  if (cfg.ops > kMaxStressOps / cfg.procs)
    throw refusal_error("stress run of " + std::to_string(cfg.procs) + " x " +
                        std::to_string(cfg.ops) +
                        " operations exceeds the in-memory record budget");

  const input_pattern pat =
      cfg.patterns.empty() ? input_pattern::alternating : cfg.patterns.front();
  const std::uint64_t total = std::uint64_t{cfg.procs} * cfg.ops;
  std::uint64_t capacity = cfg.capacity;
  if (cfg.backend == backend_kind::regtree && capacity == 0)
    capacity = fitting_capacity(cfg.init, total);

  swap_object object(cfg.init, cfg.backend, capacity);
  std::atomic<std::uint64_t> seq{0};

  struct thread_buffers {
    std::vector<event> events;
    std::vector<swap_record> records;
  };
  std::vector<thread_buffers> buffers(cfg.procs);
  std::vector<std::exception_ptr> failures(cfg.procs);
  std::barrier start(static_cast<std::ptrdiff_t>(cfg.procs));

  {
    std::vector<std::jthread> threads;
    threads.reserve(cfg.procs);
    for (std::uint32_t tid = 0; tid < cfg.procs; ++tid) {
      threads.emplace_back([&, tid] {
        thread_buffers& buf = buffers[tid];
        try {
          buf.events.reserve(2 * cfg.ops);
          buf.records.reserve(cfg.ops);
          start.arrive_and_wait();
          for (std::uint64_t k = 0; k < cfg.ops; ++k) {
            const auto op_id = static_cast<std::uint32_t>(k);
            const bit_value v = pattern_input(pat, tid, k);
            const std::uint64_t inv = seq.fetch_add(1) + 1;
            auto [returned, rec] = object.swap(v);
            const std::uint64_t res = seq.fetch_add(1) + 1;
            rec.proc = tid;
            rec.op_id = op_id;
            buf.events.push_back({inv, tid, op_id, event_kind::invoke, v});
            buf.events.push_back({res, tid, op_id, event_kind::response, returned});
            buf.records.push_back(rec);
          }
        } catch (...) {
          failures[tid] = std::current_exception();
        }
      });
    }
  }
  for (auto& failure : failures)
    if (failure) std::rethrow_exception(failure);

  stress_data data;
  data.hist.init = cfg.init;
  for (auto& buf : buffers) {
    data.hist.events.insert(data.hist.events.end(), buf.events.begin(),
                            buf.events.end());
    data.records.insert(data.records.end(), buf.records.begin(),
                        buf.records.end());
  }
  std::sort(data.hist.events.begin(), data.hist.events.end(),
            [](const event& a, const event& b) { return a.seq < b.seq; });
  data.final_round = object.read_round();
  data.metrics = object.metrics(data.records);
  return data;
}

int run_stress(const run_config& cfg, std::ostream& out) {
  stress_data data = run_stress_collect(cfg);
  data.hist.validate();

  const std::uint64_t total = data.records.size();
  out << "stress: " << cfg.procs << " threads x " << cfg.ops
      << " ops, backend "
      << (cfg.backend == backend_kind::atomic ? "atomic" : "regtree")
      << ", init " << unsigned{cfg.init} << "\n";

  for (const auto& rec : data.records) {
    if (!step_rule_holds(rec)) {
      out << "stress: FAIL: step rule broken for process "
          << rec.proc << " op " << rec.op_id << "\n";
      return exit_verification;
    }
  }

  grouped_linearization g = explicit_linearize(data.records, cfg.init);
  const verify_verdict verdict = verify_explicit(g, data.hist, cfg.init);
  if (!verdict.pass) {
    out << "stress: FAIL: " << verdict.reason << "\n";
    return exit_verification;
  }
  out << "explicit verification: pass (" << data.hist.events.size()
      << " events, " << g.groups.size() << " rounds)\n";

  const realtime_round_result rt = check_realtime_rounds(data.hist, data.records);
  if (!rt.ok) {
    out << "stress: FAIL: " << rt.reason << "\n";
    return exit_verification;
  }
  out << "real-time round order: pass (" << rt.pairs_checked << " pairs)\n";

  const std::uint64_t round_bound = std::uint64_t{cfg.init} + total;
  if (data.final_round > round_bound) {
    out << "stress: FAIL: final round " << data.final_round
        << " above the bound " << round_bound << "\n";
    return exit_verification;
  }
  out << "final round " << data.final_round << " (bound " << round_bound
      << "), " << data.metrics.switch_count << " value switches\n";

  if (!cfg.out_path.empty()) {
    save_history(cfg.out_path, data.hist);
    save_records(records_path_for(cfg.out_path), data.records);
    out << "wrote " << cfg.out_path << " and "
        << records_path_for(cfg.out_path) << "\n";
  }
  return exit_ok;
}

bench_data run_bench_collect(const run_config& cfg) {
  std::uint64_t capacity = cfg.capacity;
  if (cfg.backend == backend_kind::regtree && capacity == 0)
    capacity = fitting_capacity(cfg.init, cfg.ops);
  const std::uint64_t depth =
      capacity != 0 ? std::uint64_t{std::bit_width(capacity)} - 1 : 0;
  const std::uint64_t reg_bound = 2 * (depth + 1) + 1;

  swap_object object(cfg.init, cfg.backend, capacity);
  xorshift64s rng(cfg.seed);
  bench_data data;
  std::vector<double> latencies;
  latencies.reserve(cfg.ops);

  for (std::uint64_t i = 0; i < cfg.ops; ++i) {
    const auto v = static_cast<bit_value>(rng.below(2));
    const auto t0 = std::chrono::steady_clock::now();
    swap_record rec;
    try {
      rec = object.swap(v).second;
    } catch (const capacity_error&) {
      data.capacity_exhausted = true;
      break;
    }
    const auto t1 = std::chrono::steady_clock::now();
    latencies.push_back(
        std::chrono::duration<double, std::nano>(t1 - t0).count());
    if (rec.base_ops == 2)
      ++data.two_step;
    else if (rec.base_ops == 3)
      ++data.three_step;
    if (cfg.backend == backend_kind::regtree && rec.reg_ops > reg_bound)
      data.reg_bound_ok = false;
  }

  data.completed = latencies.size();
  std::sort(latencies.begin(), latencies.end());
  data.p50_ns = percentile(latencies, 0.50);
  data.p90_ns = percentile(latencies, 0.90);
  data.p99_ns = percentile(latencies, 0.99);
  data.max_ns = latencies.empty() ? 0 : latencies.back();
  return data;
}

int run_bench(const run_config& cfg, std::ostream& out) {
  const bench_data data = run_bench_collect(cfg);
  out << "bench: " << data.completed << " of " << cfg.ops
      << " swaps, backend "
      << (cfg.backend == backend_kind::atomic ? "atomic" : "regtree") << "\n";
  if (data.capacity_exhausted)
    out << "stopped early: round capacity exhausted after " << data.completed
        << " swaps\n";
  if (data.completed != 0) {
    out << "latency ns: p50 " << data.p50_ns << " p90 " << data.p90_ns
        << " p99 " << data.p99_ns << " max " << data.max_ns << "\n";
    out << "base ops per swap: 2-step " << data.two_step << ", 3-step "
        << data.three_step << "\n";
  }
  if (!data.reg_bound_ok) {
    out << "bench: FAIL: a swap exceeded the register access bound\n";
    return exit_verification;
  }
  return exit_ok;
}

int run_check(const run_config& cfg, std::ostream& out) {
  if (cfg.check_path.empty())
    throw contract_error("check mode needs a history file path");

  history h = load_history(cfg.check_path);
  try {
    h.validate();
  } catch (const contract_error& e) {
    out << "check: invalid history: " << e.what() << "\n";
    return exit_parse;
  }
  out << "check: " << cfg.check_path << ": " << h.events.size()
      << " events, " << h.completed_ops() << " completed ops, init "
      << unsigned{h.init} << "\n";

  bool anything_checked = false;

  const std::string rec_path = records_path_for(cfg.check_path);
  if (std::filesystem::exists(rec_path) && h.pending_ops() == 0) {
    anything_checked = true;
    const std::vector<swap_record> records = load_records(rec_path);
    try {
      grouped_linearization g = explicit_linearize(records, h.init);
      const verify_verdict verdict = verify_explicit(g, h, h.init);
      if (!verdict.pass) {
        out << "explicit verification: FAIL: " << verdict.reason << "\n";
        return exit_verification;
      }
      out << "explicit verification: pass\n";
      const realtime_round_result rt = check_realtime_rounds(h, records);
      if (!rt.ok) {
        out << "real-time round order: FAIL: " << rt.reason << "\n";
        return exit_verification;
      }
      out << "real-time round order: pass (" << rt.pairs_checked << " pairs)\n";
    } catch (const instrumentation_error& e) {
      out << "explicit verification: FAIL: " << e.what() << "\n";
      return exit_verification;
    } catch (const contract_error& e) {
      out << "check: records do not match the history: " << e.what() << "\n";
      return exit_parse;
    }
  }

  if (h.completed_ops() <= brute_force_options{}.max_completed_ops) {
    anything_checked = true;
    const brute_force_result bf = brute_force_linearizable(h);
    if (!bf.linearizable) {
      out << "brute force: FAIL: no linearization exists\n";
      return exit_verification;
    }
    out << "brute force: linearizable\n";
  }

  if (!anything_checked)
    throw refusal_error(
        "history is beyond the brute-force bound and has no records file; "
        "nothing to verify");
  return exit_ok;
}

int run(const run_config& cfg, std::ostream& out, std::ostream& err) {
  try {
    switch (cfg.mode) {
      case run_mode::exhaustive:
        return run_exhaustive(cfg, out);
      case run_mode::stress:
        return run_stress(cfg, out);
      case run_mode::bench:
        return run_bench(cfg, out);
      default:
        return run_check(cfg, out);
    }
  } catch (const parse_error& e) {
    err << "parse error: " << e.what() << "\n";
    return exit_parse;
  } catch (const refusal_error& e) {
    err << "refused: " << e.what() << "\n";
    return exit_refusal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_failure;
  }
}

}  // namespace swapbit::harness

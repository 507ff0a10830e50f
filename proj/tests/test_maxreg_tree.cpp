#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <thread>
#include <vector>

#include "support/oracles.hpp"
#include "swapbit/errors.hpp"
#include "swapbit/max_register.hpp"
#include "swapbit/maxreg_tree.hpp"
#include "swapbit/model_exec.hpp"
#include "swapbit/rng.hpp"

using namespace swapbit;

namespace {

std::uint64_t read_steps(const tree_max_register& tree) {
  step_counter steps;
  (void)tree.read(steps);
  return steps.count();
}

}  // namespace

TEST_CASE("construction validates capacity") {
  CHECK_THROWS_AS(tree_max_register(0), contract_error);
  CHECK_THROWS_AS(tree_max_register(6), contract_error);
  CHECK_THROWS_AS(tree_max_register(3), contract_error);
  CHECK_THROWS_AS(tree_max_register(8, 8), capacity_error);
  const tree_max_register tree(8, 5);
  CHECK(tree.capacity() == 8);
  CHECK(tree.depth() == 3);
  step_counter steps;
  CHECK(tree.read(steps) == 5);
}

TEST_CASE("capacity one is the constant zero register") {
  tree_max_register leaf(1);
  CHECK(leaf.depth() == 0);
  step_counter steps;
  CHECK(leaf.read(steps) == 0);
  leaf.write_max(0, steps);
  CHECK(steps.count() == 0);  // nothing to touch
  CHECK_THROWS_AS(leaf.write_max(1, steps), capacity_error);
}

TEST_CASE("capacity four: exact switch walks") {
  tree_max_register tree(4);
  step_counter steps;

  CHECK(tree.read(steps) == 0);
  CHECK(steps.count() == 2);  // one switch per level

  steps.reset();
  tree.write_max(2, steps);  // right at the root, then a left read
  CHECK(steps.count() == 2);
  CHECK(read_steps(tree) == 2);
  {
    step_counter s;
    CHECK(tree.read(s) == 2);
  }

  steps.reset();
  tree.write_max(1, steps);  // left at the root finds the switch set: dominated
  CHECK(steps.count() == 1);
  {
    step_counter s;
    CHECK(tree.read(s) == 2);
  }

  steps.reset();
  tree.write_max(3, steps);  // right, right: two switch sets, no reads
  CHECK(steps.count() == 2);
  {
    step_counter s;
    CHECK(tree.read(s) == 3);
  }

  CHECK_THROWS_AS(tree.write_max(4, steps), capacity_error);
}

TEST_CASE("every operation stays within depth accesses") {
  for (const std::uint64_t capacity : {2ull, 4ull, 32ull, 1024ull}) {
    tree_max_register tree(capacity);
    const std::uint64_t bound = tree.depth();
    xorshift64s rng(capacity);
    step_counter steps;
    for (int i = 0; i < 2'000; ++i) {
      steps.reset();
      if (rng.below(4) == 0) {
        (void)tree.read(steps);
      } else {
        tree.write_max(rng.next() % capacity, steps);
      }
      CHECK(steps.count() <= bound);
    }
  }
}

TEST_CASE("quiescent equivalence with a running-max oracle") {
  for (const std::uint64_t capacity : {2ull, 8ull, 64ull, 1024ull, 65536ull}) {
    tree_max_register tree(capacity);
    xorshift64s rng(capacity + 1);
    step_counter steps;
    std::uint64_t expected = 0;
    for (int i = 0; i < 10'000; ++i) {
      const std::uint64_t x = rng.next() % capacity;
      tree.write_max(x, steps);
      expected = std::max(expected, x);
      if (i % 53 == 0) CHECK(tree.read(steps) == expected);
    }
    CHECK(tree.read(steps) == expected);
  }
}

TEST_CASE("reads are monotone and converge under concurrent writers") {
  tree_max_register tree(1 << 16);
  constexpr int kThreads = 4;
  constexpr int kOps = 5'000;
  std::vector<std::uint64_t> local_max(kThreads, 0);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < kThreads; ++t) {
      threads.emplace_back([&, t] {
        xorshift64s rng(derive_stream_seed(11, static_cast<std::uint64_t>(t)));
        step_counter steps;
        std::uint64_t last_seen = 0;
        for (int i = 0; i < kOps; ++i) {
          const std::uint64_t x = rng.next() % (1 << 16);
          tree.write_max(x, steps);
          local_max[t] = std::max(local_max[t], x);
          const std::uint64_t seen = tree.read(steps);
          CHECK(seen >= last_seen);        // per-process monotone
          CHECK(seen >= local_max[t]);     // own completed writes visible
          last_seen = seen;
        }
      });
    }
  }
  step_counter steps;
  CHECK(tree.read(steps) ==
        *std::max_element(local_max.begin(), local_max.end()));
}

TEST_CASE("max_register handle selects backends") {
  max_register atomic = max_register::make_atomic(3);
  CHECK(atomic.backend() == backend_kind::atomic);
  CHECK_FALSE(atomic.capacity().has_value());
  max_register tree = max_register::make_tree(16, 3);
  CHECK(tree.backend() == backend_kind::regtree);
  CHECK(tree.capacity() == 16);
  step_counter steps;
  for (auto* reg : {&atomic, &tree}) {
    CHECK(reg->read(steps) == 3);
    reg->write_max(11, steps);
    CHECK(reg->read(steps) == 11);
  }
}

// Enumerates small concurrent programs over the model register tree and
// checks every interleaved read against sandwich bounds.
TEST_CASE("model interleavings satisfy register sandwich bounds") {
  using namespace swapbit::model;
  exec_config cfg;
  cfg.backend = backend_kind::regtree;
  cfg.capacity = 8;
  cfg.step_bound = 40;

  const std::vector<std::vector<process_program>> cases = {
      {{op_write_max(5), op_read_max()}, {op_write_max(3), op_read_max()}},
      {{op_write_max(1)}, {op_write_max(6)}, {op_read_max()}},
      {{op_write_max(7), op_read_max()}, {op_read_max(), op_write_max(2)}},
  };
  for (const auto& programs : cases) {
    std::uint64_t leaves = 0;
    std::uint64_t expected_final = 0;
    for (const auto& prog : programs)
      for (const auto& op : prog)
        if (op.kind == model_op_kind::write_max)
          expected_final = std::max(expected_final, op.arg);
    explore(programs, cfg,
            [&](const schedule&, const execution_outcome& out) {
              ++leaves;
              const std::string verdict =
                  swapbit::testing::check_register_sandwich(out, 0);
              if (!verdict.empty()) FAIL(verdict);
              CHECK(out.final_round == expected_final);
            });
    CHECK(leaves > 0);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <thread>
#include <vector>

#include "swapbit/base_objects.hpp"
#include "swapbit/rng.hpp"

using namespace swapbit;

TEST_CASE("bit helpers") {
  CHECK(bit_not(0) == 1);
  CHECK(bit_not(1) == 0);
  CHECK_NOTHROW(require_bit(0));
  CHECK_NOTHROW(require_bit(1));
  CHECK_THROWS_AS(require_bit(2), contract_error);
}

TEST_CASE("step counter accumulates and resets") {
  step_counter steps;
  CHECK(steps.count() == 0);
  steps.add();
  steps.add(3);
  CHECK(steps.count() == 4);
  steps.reset();
  CHECK(steps.count() == 0);
}

TEST_CASE("register cell width validation") {
  CHECK_THROWS_AS(register_cell(0), contract_error);
  CHECK_THROWS_AS(register_cell(65), contract_error);
  register_cell one(1);
  step_counter steps;
  one.write(1, steps);
  CHECK(one.read(steps) == 1);
  CHECK_THROWS_AS(one.write(2, steps), contract_error);
  CHECK(steps.count() == 2);  // the refused write counted nothing
}

TEST_CASE("register cell copies value before sharing") {
  register_cell cell(8);
  step_counter steps;
  cell.write(200, steps);
  register_cell copy(cell);
  CHECK(copy.read(steps) == 200);
  CHECK(copy.width() == 8);
}

TEST_CASE("atomic max register keeps the running maximum") {
  atomic_max_register reg(5);
  step_counter steps;
  CHECK(reg.read(steps) == 5);
  reg.write_max(3, steps);
  CHECK(reg.read(steps) == 5);
  reg.write_max(9, steps);
  CHECK(reg.read(steps) == 9);
  reg.write_max(9, steps);
  CHECK(reg.read(steps) == 9);
  CHECK(steps.count() == 7);  // one unit per operation, CAS retries free
}

TEST_CASE("atomic max register matches a running-max oracle") {
  atomic_max_register reg;
  step_counter steps;
  xorshift64s rng(42);
  std::uint64_t expected = 0;
  for (int i = 0; i < 100'000; ++i) {
    const std::uint64_t x = rng.next() % 1'000'000;
    reg.write_max(x, steps);
    expected = std::max(expected, x);
    if (i % 97 == 0) CHECK(reg.read(steps) == expected);
  }
  CHECK(reg.read(steps) == expected);
}

TEST_CASE("atomic max register under concurrent writers") {
  atomic_max_register reg;
  constexpr int kThreads = 8;
  constexpr int kOps = 20'000;
  std::vector<std::uint64_t> local_max(kThreads, 0);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < kThreads; ++t) {
      threads.emplace_back([&, t] {
        xorshift64s rng(derive_stream_seed(7, static_cast<std::uint64_t>(t)));
        step_counter steps;
        for (int i = 0; i < kOps; ++i) {
          const std::uint64_t x = rng.next() % 1'000'000'000;
          reg.write_max(x, steps);
          local_max[t] = std::max(local_max[t], x);
          // reads never go below this thread's own completed writes
          CHECK(reg.read(steps) >= local_max[t]);
        }
      });
    }
  }
  step_counter steps;
  CHECK(reg.read(steps) == *std::max_element(local_max.begin(), local_max.end()));
}

TEST_CASE("ticket source starts at one and increments") {
  ticket_source tickets;
  CHECK(tickets.draw() == 1);
  CHECK(tickets.draw() == 2);
  CHECK(tickets.draw() == 3);
}

TEST_CASE("tas bit first caller wins") {
  tas_bit bit;
  ticket_source tickets;
  step_counter steps;
  CHECK_FALSE(bit.is_set());
  const tas_bit::outcome first = bit.test_and_set(tickets, steps);
  CHECK(first.previous == 0);
  CHECK(first.ticket == 1);
  CHECK(bit.is_set());
  CHECK(bit.setter_ticket() == 1);
  const tas_bit::outcome second = bit.test_and_set(tickets, steps);
  CHECK(second.previous == 1);
  CHECK(second.ticket > first.ticket);
  CHECK(bit.setter_ticket() == first.ticket);
  CHECK(steps.count() == 2);
}

TEST_CASE("preset tas bit was won before time began") {
  tas_bit bit = preset_tas_bit();
  CHECK(bit.is_set());
  CHECK(bit.setter_ticket() == 0);
  ticket_source tickets;
  step_counter steps;
  const tas_bit::outcome out = bit.test_and_set(tickets, steps);
  CHECK(out.previous == 1);
  CHECK(out.ticket >= 1);

  tas_bit fresh;
  fresh.preset_before_sharing();
  CHECK(fresh.is_set());
  CHECK(fresh.setter_ticket() == 0);
}

TEST_CASE("tas bits under contention: one winner, winner ticket smallest") {
  constexpr std::size_t kBits = 512;
  constexpr int kThreads = 8;
  std::vector<tas_bit> bits(kBits);
  ticket_source tickets;

  struct attempt {
    bit_value previous;
    std::uint64_t ticket;
  };
  std::vector<std::vector<attempt>> results(
      kThreads, std::vector<attempt>(kBits));
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < kThreads; ++t) {
      threads.emplace_back([&, t] {
        step_counter steps;
        for (std::size_t i = 0; i < kBits; ++i) {
          const tas_bit::outcome out = bits[i].test_and_set(tickets, steps);
          results[t][i] = {out.previous, out.ticket};
        }
      });
    }
  }

  std::vector<std::uint64_t> all_tickets;
  for (std::size_t i = 0; i < kBits; ++i) {
    int winners = 0;
    std::uint64_t winner_ticket = 0;
    std::uint64_t smallest = ~std::uint64_t{0};
    for (int t = 0; t < kThreads; ++t) {
      const attempt& a = results[t][i];
      all_tickets.push_back(a.ticket);
      smallest = std::min(smallest, a.ticket);
      if (a.previous == 0) {
        ++winners;
        winner_ticket = a.ticket;
      }
    }
    CHECK(winners == 1);
    CHECK(bits[i].is_set());
    CHECK(bits[i].setter_ticket() == winner_ticket);
    CHECK(winner_ticket == smallest);
  }

  // All drawn tickets are globally unique.
  std::sort(all_tickets.begin(), all_tickets.end());
  CHECK(std::adjacent_find(all_tickets.begin(), all_tickets.end()) ==
        all_tickets.end());
}

TEST_CASE("rng streams are deterministic and distinct") {
  xorshift64s a(123);
  xorshift64s b(123);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  xorshift64s c(124);
  bool differs = false;
  xorshift64s a2(123);
  for (int i = 0; i < 100; ++i) differs |= a2.next() != c.next();
  CHECK(differs);
  CHECK(derive_stream_seed(9, 0) != derive_stream_seed(9, 1));
  for (int i = 0; i < 1000; ++i) {
    const std::uint32_t pick = xorshift64s(i).below(7);
    CHECK(pick < 7);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "swapbit/errors.hpp"
#include "swapbit/history_io.hpp"
#include "swapbit/model_exec.hpp"

using namespace swapbit;

namespace {

std::size_t line_of(const parse_error& e) { return e.line; }

history sample_history() {
  history h;
  h.init = 0;
  h.events = {{1, 0, 0, event_kind::invoke, 1},
              {2, 1, 0, event_kind::invoke, 0},
              {3, 0, 0, event_kind::response, 0},
              {4, 1, 0, event_kind::response, 1}};
  return h;
}

}  // namespace

TEST_CASE("golden encodings") {
  CHECK(encode_history(sample_history()) ==
        "# swap-history v1 init=0\n"
        "1 0 0 inv 1\n"
        "2 1 0 inv 0\n"
        "3 0 0 res 0\n"
        "4 1 0 res 1\n");

  history empty;
  CHECK(encode_history(empty) == "");
  empty.init = 1;
  CHECK(encode_history(empty) == "# swap-history v1 init=1\n");

  swap_record rec;
  rec.proc = 2;
  rec.op_id = 7;
  rec.round = 12;
  rec.tas_result = 0;
  rec.ticket = 40;
  rec.base_ops = 3;
  rec.returned = 1;
  CHECK(encode_records({&rec, 1}) == "2 7 12 0 40 3 1\n");
  CHECK(encode_records({}) == "");
}

TEST_CASE("decode inverts encode on generated histories") {
  using namespace swapbit::model;
  std::vector<process_program> programs = {
      {op_swap(1), op_swap(0)}, {op_swap(1)}, {op_swap(0)}};
  exec_config cfg;
  for (std::uint64_t seed : {3u, 17u, 88u}) {
    const execution_outcome out = run_random(programs, cfg, seed);
    const history back = decode_history(encode_history(out.hist));
    CHECK(back.init == out.hist.init);
    REQUIRE(back.events.size() == out.hist.events.size());
    for (std::size_t i = 0; i < back.events.size(); ++i) {
      CHECK(back.events[i].seq == out.hist.events[i].seq);
      CHECK(back.events[i].proc == out.hist.events[i].proc);
      CHECK(back.events[i].op_id == out.hist.events[i].op_id);
      CHECK(back.events[i].kind == out.hist.events[i].kind);
      CHECK(back.events[i].value == out.hist.events[i].value);
    }

    const std::vector<swap_record> recs =
        decode_records(encode_records(out.records));
    REQUIRE(recs.size() == out.records.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const swap_record& a = recs[i];
      const swap_record& b = out.records[i];
      CHECK(a.proc == b.proc);
      CHECK(a.op_id == b.op_id);
      CHECK(a.round == b.round);
      CHECK(a.round_read == b.round_read);
      CHECK(a.input == b.input);
      CHECK(a.tas_result == b.tas_result);
      CHECK(a.ticket == b.ticket);
      CHECK(a.base_ops == b.base_ops);
      CHECK(a.returned == b.returned);
    }
  }
}

TEST_CASE("encode inverts decode byte for byte") {
  const std::string text =
      "# swap-history v1 init=1\n"
      "5 3 0 inv 0\n"
      "9 3 0 res 1\n";
  CHECK(encode_history(decode_history(text)) == text);
  const std::string records = "0 0 1 0 1 3 0\n1 0 2 1 5 2 1\n";
  CHECK(encode_records(decode_records(records)) == records);
  CHECK(decode_history("").events.empty());
  CHECK(decode_records("").empty());
}

TEST_CASE("history parse errors name the offending line") {
  auto expect_error = [](std::string_view text, std::size_t line) {
    try {
      decode_history(text);
      FAIL("expected a parse error for: " << std::string(text));
    } catch (const parse_error& e) {
      CHECK(line_of(e) == line);
    }
  };
  expect_error("# swap-history v1 init=0", 1);     // no trailing newline
  expect_error("# swap-history v2 init=0\n", 1);   // wrong header
  expect_error("# swap-history v1 init=2\n", 1);   // bad init bit
  expect_error("# swap-history v1 init=0\n1 0 0 inv 1", 2);
  expect_error("# swap-history v1 init=0\n01 0 0 inv 1\n", 2);  // leading zero
  expect_error("# swap-history v1 init=0\n1  0 0 inv 1\n", 2);  // double space
  expect_error("# swap-history v1 init=0\n1 0 0 xyz 1\n", 2);   // bad kind
  expect_error("# swap-history v1 init=0\n1 0 0 inv 2\n", 2);   // bad value
  expect_error("# swap-history v1 init=0\n1 0 0 inv\n", 2);     // short line
  expect_error("# swap-history v1 init=0\n1 0 0 inv 1 9\n", 2); // long line
  expect_error(
      "# swap-history v1 init=0\n99999999999999999999 0 0 inv 1\n", 2);
  expect_error("# swap-history v1 init=0\n1 0 0 inv 1\n2 5000000000 1 inv 1\n",
               3);  // process id overflows 32 bits

  try {
    decode_history("# swap-history v1 init=0\n1 0 0 inv 2\n");
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    CHECK(std::string(e.what()).starts_with("line 2: "));
  }
}

TEST_CASE("record parse errors") {
  auto expect_error = [](std::string_view text, std::size_t line) {
    try {
      decode_records(text);
      FAIL("expected a parse error for: " << std::string(text));
    } catch (const parse_error& e) {
      CHECK(line_of(e) == line);
    }
  };
  expect_error("0 0 1 0 1 4 0\n", 1);  // steps out of range
  expect_error("0 0 0 0 1 3 0\n", 1);  // three steps cannot stay in round 0
  expect_error("0 0 1 2 1 2 0\n", 1);  // tas flag out of domain
  expect_error("0 0 1 0 1 2 0", 1);    // no trailing newline
  expect_error("0 0 1 0 1 2 0\nx 0 1 0 1 2 0\n", 2);

  const std::vector<swap_record> recs = decode_records("0 0 3 0 7 3 0\n");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].round_read == 2);  // a three-step swap advanced the round
  CHECK(recs[0].input == 1);
  CHECK(recs[0].reg_ops == 3);
}

TEST_CASE("file round trips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string hist_path = (dir / "swapbit_io_test.hist").string();
  const std::string rec_path = records_path_for(hist_path);
  CHECK(rec_path == hist_path + ".records");

  const history h = sample_history();
  save_history(hist_path, h);
  const history back = load_history(hist_path);
  CHECK(back.init == h.init);
  CHECK(back.events.size() == h.events.size());

  swap_record rec;
  rec.proc = 1;
  rec.op_id = 0;
  rec.round = 1;
  rec.tas_result = 0;
  rec.ticket = 2;
  rec.base_ops = 3;
  rec.returned = 0;
  save_records(rec_path, {&rec, 1});
  const std::vector<swap_record> recs = load_records(rec_path);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].ticket == 2);

  std::remove(hist_path.c_str());
  std::remove(rec_path.c_str());
  CHECK_THROWS_AS(load_history(hist_path), std::runtime_error);
}

#include "swapbit/history_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "swapbit/errors.hpp"

namespace swapbit {

namespace {

constexpr std::string_view kHeaderPrefix = "# swap-history v1 init=";

// Splits off the next token up to a single space (or line end). Canonical
// form: tokens are nonempty and separated by exactly one space.
std::string_view next_token(std::string_view& rest, std::size_t line_no) {
  if (rest.empty())
    throw parse_error(line_no, "missing field");
  const std::size_t space = rest.find(' ');
  std::string_view tok = rest.substr(0, space);
  rest = space == std::string_view::npos ? std::string_view{}
                                         : rest.substr(space + 1);
  if (tok.empty()) throw parse_error(line_no, "empty field");
  return tok;
}

std::uint64_t parse_u64(std::string_view tok, std::size_t line_no,
                        const char* what) {
  if (tok.empty() || (tok.size() > 1 && tok.front() == '0'))
    throw parse_error(line_no, std::string(what) + " is not a canonical number");
  std::uint64_t value = 0;
  for (char c : tok) {
    if (c < '0' || c > '9')
      throw parse_error(line_no, std::string(what) + " is not a number");
    const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
    if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10)
      throw parse_error(line_no, std::string(what) + " overflows 64 bits");
    value = value * 10 + digit;
  }
  return value;
}

std::uint32_t parse_u32(std::string_view tok, std::size_t line_no,
                        const char* what) {
  const std::uint64_t value = parse_u64(tok, line_no, what);
  if (value > std::numeric_limits<std::uint32_t>::max())
    throw parse_error(line_no, std::string(what) + " overflows 32 bits");
  return static_cast<std::uint32_t>(value);
}

bit_value parse_bit(std::string_view tok, std::size_t line_no,
                    const char* what) {
  if (tok == "0") return 0;
  if (tok == "1") return 1;
  throw parse_error(line_no, std::string(what) + " must be 0 or 1");
}

// Yields lines without their terminator; requires a trailing newline.
struct line_reader {
  std::string_view text;
  std::size_t line_no = 0;

  bool next(std::string_view& line) {
    if (text.empty()) return false;
    ++line_no;
    const std::size_t nl = text.find('\n');
    if (nl == std::string_view::npos)
      throw parse_error(line_no, "file must end with a newline");
    line = text.substr(0, nl);
    text = text.substr(nl + 1);
    return true;
  }
};

void require_line_end(std::string_view rest, std::size_t line_no) {
  if (!rest.empty()) throw parse_error(line_no, "trailing characters");
}

}  // namespace

std::string encode_history(const history& h) {
  if (h.events.empty() && h.init == 0) return "";
  std::string text(kHeaderPrefix);
  text += h.init == 0 ? "0\n" : "1\n";
  for (const auto& ev : h.events) {
    text += std::to_string(ev.seq);
    text += ' ';
    text += std::to_string(ev.proc);
    text += ' ';
    text += std::to_string(ev.op_id);
    text += ev.kind == event_kind::invoke ? " inv " : " res ";
    text += ev.value == 0 ? "0\n" : "1\n";
  }
  return text;
}

history decode_history(std::string_view text) {
  history h;
  if (text.empty()) return h;

  line_reader lines{text};
  std::string_view line;
  lines.next(line);
  if (!line.starts_with(kHeaderPrefix))
    throw parse_error(1, "expected header '# swap-history v1 init=<bit>'");
  h.init = parse_bit(line.substr(kHeaderPrefix.size()), 1, "init");

  while (lines.next(line)) {
    std::string_view rest = line;
    event ev;
    ev.seq = parse_u64(next_token(rest, lines.line_no), lines.line_no, "seq");
    ev.proc =
        parse_u32(next_token(rest, lines.line_no), lines.line_no, "process");
    ev.op_id =
        parse_u32(next_token(rest, lines.line_no), lines.line_no, "op id");
    const std::string_view kind = next_token(rest, lines.line_no);
    if (kind == "inv")
      ev.kind = event_kind::invoke;
    else if (kind == "res")
      ev.kind = event_kind::response;
    else
      throw parse_error(lines.line_no, "kind must be inv or res");
    ev.value =
        parse_bit(next_token(rest, lines.line_no), lines.line_no, "value");
    require_line_end(rest, lines.line_no);
    h.events.push_back(ev);
  }
  return h;
}

std::string encode_records(std::span<const swap_record> records) {
  std::string text;
  for (const auto& rec : records) {
    text += std::to_string(rec.proc);
    text += ' ';
    text += std::to_string(rec.op_id);
    text += ' ';
    text += std::to_string(rec.round);
    text += ' ';
    text += std::to_string(rec.tas_result);
    text += ' ';
    text += std::to_string(rec.ticket);
    text += ' ';
    text += std::to_string(rec.base_ops);
    text += ' ';
    text += rec.returned == 0 ? "0\n" : "1\n";
  }
  return text;
}

std::vector<swap_record> decode_records(std::string_view text) {
  std::vector<swap_record> records;
  line_reader lines{text};
  std::string_view line;
  while (lines.next(line)) {
    std::string_view rest = line;
    swap_record rec;
    rec.proc =
        parse_u32(next_token(rest, lines.line_no), lines.line_no, "process");
    rec.op_id =
        parse_u32(next_token(rest, lines.line_no), lines.line_no, "op id");
    rec.round =
        parse_u64(next_token(rest, lines.line_no), lines.line_no, "round");
    rec.tas_result =
        parse_bit(next_token(rest, lines.line_no), lines.line_no, "tas");
    rec.ticket =
        parse_u64(next_token(rest, lines.line_no), lines.line_no, "ticket");
    const std::uint64_t steps =
        parse_u64(next_token(rest, lines.line_no), lines.line_no, "steps");
    rec.returned =
        parse_bit(next_token(rest, lines.line_no), lines.line_no, "returned");
    require_line_end(rest, lines.line_no);
    if (steps != 2 && steps != 3)
      throw parse_error(lines.line_no, "steps must be 2 or 3");
    if (steps == 3 && rec.round == 0)
      throw parse_error(lines.line_no, "a three-step swap cannot sit in round 0");
    rec.base_ops = static_cast<std::uint32_t>(steps);
    rec.reg_ops = rec.base_ops;
    rec.input = static_cast<bit_value>(rec.round & 1u);
    rec.round_read = steps == 3 ? rec.round - 1 : rec.round;
    records.push_back(rec);
  }
  return records;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw std::runtime_error("cannot read " + path);
  return std::move(buffer).str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace

history load_history(const std::string& path) {
  return decode_history(read_file(path));
}

void save_history(const std::string& path, const history& h) {
  write_file(path, encode_history(h));
}

std::vector<swap_record> load_records(const std::string& path) {
  return decode_records(read_file(path));
}

void save_records(const std::string& path,
                  std::span<const swap_record> records) {
  write_file(path, encode_records(records));
}

std::string records_path_for(const std::string& history_path) {
  return history_path + ".records";
}

}  // namespace swapbit

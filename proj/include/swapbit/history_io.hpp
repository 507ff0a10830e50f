#pragma once

// Text formats for recorded runs.
//
// History file: one header line, then one line per event in seq order.
//
//   # swap-history v1 init=<bit>
//   <seq> <proc> <opId> <kind> <value>
//
// with kind either `inv` or `res`. Records file: no header, one line per
// completed swap.
//
//   <proc> <opId> <round> <tas> <ticket> <steps> <returned>
//
// Both formats are canonical: single spaces, no leading zeros, a trailing
// newline, nothing else. Decoding accepts exactly what encoding produces, so
// encode(decode(text)) is byte-identical. An empty file is the empty history
// (or record set).

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swapbit/history.hpp"
#include "swapbit/swap_object.hpp"

namespace swapbit {

std::string encode_history(const history& h);
history decode_history(std::string_view text);  // parse_error on bad input

std::string encode_records(std::span<const swap_record> records);
std::vector<swap_record> decode_records(std::string_view text);

// Whole-file helpers. Unreadable or unwritable paths raise std::runtime_error;
// malformed content raises parse_error.
history load_history(const std::string& path);
void save_history(const std::string& path, const history& h);
std::vector<swap_record> load_records(const std::string& path);
void save_records(const std::string& path, std::span<const swap_record> records);

// Records sit next to their history under this derived name.
std::string records_path_for(const std::string& history_path);

}  // namespace swapbit

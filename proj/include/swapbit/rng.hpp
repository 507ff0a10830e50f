#pragma once

#include <cstdint>

namespace swapbit {

// splitmix64 (Steele/Lea/Flood constants). Used to expand user seeds into
// generator state and to derive independent per-thread streams. Fixed
// constants so seeds reproduce across implementations.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// xorshift64* (Vigna). State must stay nonzero; the constructor maps any
// seed through splitmix64 and patches a zero state.
class xorshift64s {
 public:
  explicit constexpr xorshift64s(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
  }

  constexpr std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  // Uniform-enough pick in [0, n); n > 0. Modulo bias is irrelevant at the
  // fan-outs used here (n <= 16) and keeps the stream trivially portable.
  constexpr std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(next() % n);
  }

 private:
  std::uint64_t state_;
};

// Stream seed for worker `index` under user seed `seed`.
constexpr std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) + index + 1);
}

}  // namespace swapbit

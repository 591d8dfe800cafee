#pragma once

#include <cstdint>

namespace bugprobe {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive accumulation of 64-bit words.
class Hasher {
 public:
  explicit constexpr Hasher(std::uint64_t seed) : h_(mix64(seed)) {}
  constexpr void add(std::uint64_t word) {
    h_ = mix64(h_ ^ mix64(word + 0x243f6a8885a308d3ULL));
  }
  constexpr std::uint64_t value() const { return mix64(h_); }

 private:
  std::uint64_t h_;
};

}  // namespace bugprobe

#pragma once

#include <cstdint>
#include <initializer_list>

namespace rqmcis {

/// SplitMix64 finalizer; a bijection on 64-bit words with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a list of words; used to fan out seeds.
constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
  return h;
}

/// Maps 53 random bits to the open interval (0,1); never returns 0 or 1.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

/// Counter-based generator: the value at (key, counter) is a pure function,
/// so any stream position is random-access and thread-independent.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  constexpr std::uint64_t bits(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter + 0x632be59bd9b4e019ULL));
  }

  constexpr double uniform(std::uint64_t counter) const noexcept { return to_open_unit(bits(counter)); }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace rqmcis

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace cfprm {

/// 64-bit FNV-1a.
inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffsetBasis) noexcept {
  for (char ch : bytes) {
    state ^= static_cast<std::uint8_t>(ch);
    state *= kFnvPrime;
  }
  return state;
}

/// SplitMix64 stream. Unlike the standard distributions, every derived value
/// (uniform reals, bounded integers, shuffles) is specified here, so outputs
/// are bit-identical across standard libraries.
class Rng {
 public:
  explicit constexpr Rng(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n); n must be > 0. Rejection keeps it unbiased.
  constexpr std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  /// Uniform integer in [lo, hi].
  constexpr std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Fisher-Yates, back to front.
  template <typename T>
  constexpr void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// Independent child stream keyed by `key`; does not advance this stream.
  constexpr Rng split(std::uint64_t key) const noexcept {
    Rng mix(state_ ^ (key * 0xd6e8feb86659fd93ULL));
    mix.next();
    return Rng(mix.next());
  }

  constexpr Rng split(std::string_view tag) const noexcept { return split(fnv1a64(tag)); }

 private:
  std::uint64_t state_;
};

}  // namespace cfprm

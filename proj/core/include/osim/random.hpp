#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace osim {

// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for (parent, index). Distinct indices give statistically
// independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

// FNV-1a, for deriving seeds from labels such as scenario ids.
std::uint64_t hash_label(std::string_view label) noexcept;

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept;

// xoshiro256** seeded through SplitMix64. Satisfies UniformRandomBitGenerator,
// so it can drive <random> distributions.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform() noexcept;
  // Unit-rate exponential.
  double exponential() noexcept;
  // Gamma(shape, 1).
  double gamma(double shape);

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_;
};

}  // namespace osim

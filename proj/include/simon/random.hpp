#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace simon {

// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of stream `stream` under master seed `seed`. Replica r of any
// replicated computation uses derive_seed(seed, r).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

// Reproducible generator: std::mt19937_64 (whose output sequence is fixed by
// the standard) seeded from a derived stream seed. Floating-point and
// bounded-integer conversions are done here rather than through
// <random> distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view kGeneratorId = "mt19937_64+splitmix64-streams/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(derive_seed(seed, stream)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_open_low() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }
  // Uniform integer on [0, n), n >= 1, without modulo bias.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Exponential with the given rate.
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
};

}  // namespace simon

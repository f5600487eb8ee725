#include "simon/random.hpp"

#include <cmath>
#include <limits>

#include "simon/errors.hpp"

namespace simon {

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::below requires n >= 1");
  // Reject the partial block at the top so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
  return -std::log(uniform_open_low()) / rate;
}

}  // namespace simon

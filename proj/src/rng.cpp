#include "returnrec/rng.hpp"

#include <cmath>
#include <numbers>

namespace returnrec {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Rng::bounded(std::uint64_t n) {
  // Rejection sampling over the largest multiple of n, so every value in
  // [0, n) is exactly equally likely.
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

double Rng::normal(double mean, double stddev) {
  if (stddev == 0.0) return mean;
  // Box-Muller; u1 in (0, 1] keeps the log finite.
  const double u1 =
      (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform01();
  const double z =
      std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  return mean + stddev * z;
}

}  // namespace returnrec

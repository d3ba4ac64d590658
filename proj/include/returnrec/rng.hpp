#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace returnrec {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and up to three
// coordinates (stream tag, user id, prompt index, ...). Every source of
// randomness in the project is keyed this way, so results do not depend
// on evaluation order or worker count.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes);

// Stream tags keep per-purpose randomness independent under one run seed.
namespace stream {
inline constexpr std::uint64_t attack = 1;
inline constexpr std::uint64_t ensemble = 2;
inline constexpr std::uint64_t rd = 3;
inline constexpr std::uint64_t rop = 4;
inline constexpr std::uint64_t db_inject = 5;
inline constexpr std::uint64_t db_delete = 6;
inline constexpr std::uint64_t synth = 7;
}  // namespace stream

// mt19937_64 with the sampling transforms spelled out, so draws depend only
// on the seed and not on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

  std::uint64_t next() { return gen_(); }

  // Uniform integer in [0, n); n >= 1.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform real in [0, 1).
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Box-Muller; stddev 0 returns the mean exactly.
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 gen_;
};

}  // namespace returnrec

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace privaflow {

// Random source for keys, nonces and the simulator.
//
// Seeded instances run ChaCha20 under a key derived from (seed, stream), so
// distinct streams are independent and every run is reproducible. OS
// instances read the system entropy source and are what production keygen
// should use. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  static Rng seeded(std::uint64_t seed, std::uint64_t stream = 0);
  static Rng os();

  // Independent child stream; seeded parents give seeded children.
  Rng fork(std::uint64_t stream) const;

  void fill(std::span<std::uint8_t> out);
  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return p >= 1.0 || uniform() < p; }

  bool deterministic() const { return deterministic_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  Rng() = default;
  void refill();

  bool deterministic_ = true;
  std::array<std::uint8_t, 32> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, 256> buf_{};
  std::size_t pos_ = 256;
};

// Calls sodium_init once; throws if libsodium cannot initialize.
void ensure_sodium();

}  // namespace privaflow

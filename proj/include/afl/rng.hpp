#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace afl {

// One splitmix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Collapses (master_seed, round, client_id, ...) into a single stream seed.
// Pure function of its inputs, identical on every platform.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Deterministic random stream. Wraps std::mt19937_64, whose raw output is
// bit-exact per the standard, and does all value mapping itself because the
// std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform on (0, 1), endpoints excluded.
  double uniform_open01();

  // Uniform integer in [0, n); unbiased via rejection. n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal draw (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace afl

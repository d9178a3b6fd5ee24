#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace gfucb {

/// Mixes a parent seed with a purpose tag and an index into a child seed.
///
/// Seeds form a tree: run seed -> replication seed -> one stream per purpose
/// (environment, reward noise, initialization, exploration). Two algorithms
/// run on the same replication therefore draw identical contexts and noise.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view purpose,
                          std::uint64_t index = 0);

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// Distributions are implemented here instead of using <random>'s, whose
/// algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Child generator for a named purpose; does not advance this generator.
  Rng derive(std::string_view purpose, std::uint64_t index = 0) const {
    return Rng(derive_seed(seed_, purpose, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Unbiased integer in [0, n).
  std::size_t index(std::size_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace gfucb

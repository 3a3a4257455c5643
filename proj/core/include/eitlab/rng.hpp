#pragma once

#include <cstdint>
#include <initializer_list>

namespace eit {

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream key from a parent seed and a list of tags.
///
/// Every random quantity in the library is addressed by a path of tags from
/// the run's master seed, e.g. derive_seed(master, {split, sample}) for a
/// dataset sample and derive_seed(sample_seed, {kGrfStream, draw}) for its
/// field draws. The mapping is a SplitMix64 chain, so results never depend on
/// the order in which streams are consumed or on thread scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

/// Sequential generator (SplitMix64 state walk). Portable: identical output on
/// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller (consumes two uniforms per call).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

/// Counter-based generator: value(counter) is a pure function of (key, counter),
/// which makes per-coefficient draws order independent.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  double uniform(std::uint64_t counter) const;
  /// Standard normal for counter c, built from uniforms at 2c and 2c+1.
  double normal(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

}  // namespace eit

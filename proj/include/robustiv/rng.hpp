#pragma once

#include <cstdint>
#include <random>

namespace robustiv {

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Seeds for independent substreams are derived with SplitMix64
/// from (master seed, stream id), so a replicate's draws do not depend on how
/// work is split across threads. Normal variates use the Box-Muller transform
/// implemented here rather than std::normal_distribution, whose algorithm is
/// implementation-defined.
///
/// Version 1 of this scheme; changing any of the above changes every seeded
/// result and must bump kRngVersion.
class Rng {
 public:
  static constexpr int kRngVersion = 1;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace robustiv

#pragma once

#include <cstdint>
#include <random>

namespace monsel {

/// Seeded random stream with deterministic substreams.
///
/// Substream i of a stream depends only on the parent's seed and i, never on
/// how many numbers the parent has already produced, so work split across
/// threads by index reproduces the sequential result exactly.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Independent child stream keyed by index.
  RandomStream substream(std::uint64_t index) const;

  double normal();
  double uniform();  // [0, 1)
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace monsel

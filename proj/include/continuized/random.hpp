#pragma once

#include <cstdint>
#include <random>

namespace continuized {

/// Seeded random source owned by a single replicate.
///
/// A stream is identified by (seed, stream id); distinct ids give independent
/// sequences for the same seed, so a replicate can draw its jump clock and its
/// gradient noise from separate streams. Output depends only on the pair,
/// never on which thread consumes it.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// Uniform draw on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal draw.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace continuized

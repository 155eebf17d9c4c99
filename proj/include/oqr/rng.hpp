#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace oqr {

/// xoshiro256** seeded through splitmix64. The stream is single-owner; give
/// every concurrent replication its own.
class RngStream
{
public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  /// Raw state constructor, used to check against the reference sequence.
  static RngStream from_state(std::array<std::uint64_t, 4> const &state);

  std::uint64_t next_u64();
  std::uint64_t operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// [0, 1) with 53 random bits.
  double uniform01();
  /// Box-Muller; draws are produced in pairs and the second one is cached.
  double standard_normal();
  /// Marsaglia-Tsang, with the U^(1/shape) boost for shape < 1.
  double gamma(double shape);
  double chi_square(double k);

  std::uint64_t seed() const { return seed_; }

private:
  RngStream() = default;

  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline double uniform01(RngStream &rng) { return rng.uniform01(); }
inline double standard_normal(RngStream &rng) { return rng.standard_normal(); }
inline double chi_square(RngStream &rng, double k) { return rng.chi_square(k); }

} // namespace oqr

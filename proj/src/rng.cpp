#include "oqr/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "oqr/errors.hpp"

namespace oqr {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t splitmix64(std::uint64_t &x)
{
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

RngStream::RngStream(std::uint64_t seed)
  : seed_(seed)
{
  std::uint64_t x = seed;
  for (auto &w : s_) w = splitmix64(x);
}

RngStream RngStream::from_state(std::array<std::uint64_t, 4> const &state)
{
  RngStream r;
  r.s_ = state;
  return r;
}

std::uint64_t RngStream::next_u64()
{
  std::uint64_t const result = rotl(s_[1] * 5, 7) * 9;
  std::uint64_t const t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::standard_normal()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - U lies in (0, 1], so the log is finite.
  double const u1 = 1.0 - uniform01();
  double const u2 = uniform01();
  double const r = std::sqrt(-2.0 * std::log(u1));
  double const theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double RngStream::gamma(double shape)
{
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ConfigError("gamma: shape must be positive, got " + std::to_string(shape));
  }
  if (shape < 1.0) {
    double const g = gamma(shape + 1.0);
    double const u = 1.0 - uniform01();
    return g * std::pow(u, 1.0 / shape);
  }
  double const d = shape - 1.0 / 3.0;
  double const c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = standard_normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    double const u = 1.0 - uniform01();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::chi_square(double k)
{
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ConfigError("chi_square: degrees of freedom must be positive, got " + std::to_string(k));
  }
  return 2.0 * gamma(0.5 * k);
}

} // namespace oqr

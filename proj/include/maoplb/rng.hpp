#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace maoplb
{

//
// Portable random streams. The standard <random> distributions are implementation
// defined, so traces would differ across standard libraries; everything here is
// specified bit for bit:
//
//   splitmix64(x): x += 0x9E3779B97F4A7C15;
//                  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9;
//                  x = (x ^ (x >> 27)) * 0x94D049BB133111EB;
//                  return x ^ (x >> 31);
//   generator:     xoshiro256** (Blackman & Vigna), state seeded by four successive
//                  splitmix64 outputs starting from the seed.
//   uniform():     (next() >> 11) * 2^-53, in [0, 1).
//   normal():      Box-Muller on (1 - uniform(), uniform()), one value per call (the
//                  second value of each pair is discarded).
//   index(n):      Lemire's nearly-divisionless bounded integer, rejection on the
//                  low word.
//
inline std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replication r at sweep point j:
//   h = splitmix64(base); h = splitmix64(h ^ (j + 1)); h = splitmix64(h ^ ((r + 1) << 32))
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point, std::uint64_t rep)
{
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ (point + 1));
  h = splitmix64(h ^ ((rep + 1) << 32));
  return h;
}

class Rng
{
public:
  explicit Rng(std::uint64_t seed)
  {
    std::uint64_t x = seed;
    for (auto &w : s)
    {
      w = splitmix64(x);
      x += 0x9E3779B97F4A7C15ULL;
    }
  }

  std::uint64_t next()
  {
    const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal()
  {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform over {0, ..., n-1}; n >= 1.
  std::uint64_t index(std::uint64_t n)
  {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n)
    {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold)
      {
        m = static_cast<unsigned __int128>(next()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s{};
};

}  // namespace maoplb

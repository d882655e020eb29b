#pragma once

#include <cstdint>

namespace lawrisk {

/**
 * @brief Counter-based uniform variates.
 *
 * The i-th variate of a stream depends only on (seed, i), so a stream can be extended,
 * split across threads or replayed from any offset with identical results. Each draw is
 * the splitmix64 finalizer applied to a Weyl sequence started at a hash of the seed.
 */
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform on the open interval (0,1): midpoints of a 2^-53 lattice.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

} // namespace lawrisk

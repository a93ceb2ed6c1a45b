#pragma once

// Counter-based random streams. A stream is a Philox4x32-10 key derived from
// (seed, replication, role); every draw is addressed by a counter (t, lane,
// index), so draw sites never shift each other's values.

#include <array>
#include <cstdint>

namespace lunasim {

using Philox4x32 = std::array<std::uint32_t, 4>;

inline Philox4x32 philox4x32_10(Philox4x32 ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum class StreamRole : std::uint32_t { Supplier = 1, Demand = 2, Retailer = 3 };

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t rep, StreamRole role) {
    const std::uint64_t k =
        splitmix64(splitmix64(seed) ^ splitmix64(rep * 0x100000001B3ull + static_cast<std::uint64_t>(role)));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t t, std::uint32_t lane = 0, std::uint32_t idx = 0) const {
    const auto out = philox4x32_10({static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32), lane, idx}, key_);
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32 | out[1]) >> 11;
    return static_cast<double>(bits) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n, std::uint64_t t, std::uint32_t lane = 0, std::uint32_t idx = 0) const {
    const auto v = static_cast<std::uint64_t>(uniform(t, lane, idx) * static_cast<double>(n));
    return v < n ? v : n - 1;
  }

 private:
  std::array<std::uint32_t, 2> key_{};
};

}  // namespace lunasim

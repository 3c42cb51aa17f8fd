#pragma once

#include <cstdint>
#include <random>

namespace gwshield {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent sub-stream seeds from one
// master seed so that traffic, detector and service-time randomness do not
// share a generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base ^ splitmix64(stream));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t sub) {
  return splitmix64(derive_seed(base, stream) ^ splitmix64(sub + 0x51ed270b5df3dcabULL));
}

}  // namespace gwshield

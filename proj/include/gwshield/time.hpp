#pragma once

#include <cstdint>

namespace gwshield {

// All event timestamps are integer nanoseconds from trace start. Integer time
// keeps event ordering reproducible across runs.
using Nanos = std::int64_t;

inline constexpr Nanos kMicrosecond = 1'000;
inline constexpr Nanos kMillisecond = 1'000'000;
inline constexpr Nanos kSecond = 1'000'000'000;

inline constexpr double to_ms(Nanos t) { return static_cast<double>(t) / 1e6; }
inline constexpr double to_seconds(Nanos t) { return static_cast<double>(t) / 1e9; }

}  // namespace gwshield

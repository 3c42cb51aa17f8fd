#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gwshield/rng.hpp"
#include "gwshield/trace.hpp"

namespace gwshield::traffic {

// Distribution of the total flood size X. Constant is the default; replication
// experiments use Uniform(0.5*EX, 1.5*EX), see replication_default().
struct XDistribution {
  enum class Kind { Constant, Uniform, Geometric };

  Kind kind = Kind::Constant;
  std::int64_t constant_x = 1;
  std::int64_t uniform_lo = 1;
  std::int64_t uniform_hi = 1;
  double geometric_mean = 1.0;

  static XDistribution constant(std::int64_t x);
  static XDistribution uniform(std::int64_t lo, std::int64_t hi);
  static XDistribution geometric(double mean);  // support {1,2,...}, given mean
  static XDistribution replication_default(double expected_x);

  double expected_value() const;
  std::int64_t sample(Rng& rng) const;
  void validate() const;  // all parameters must describe at least 1 packet
};

enum class ArrivalProcess { Periodic, Poisson };

// Steady telemetry from one or more devices. Periodic sources are staggered
// evenly across one period; Poisson uses `period` as the mean interarrival.
struct BenignSourceConfig {
  Nanos period = kSecond;
  int source_count = 1;
  Nanos jitter = 0;  // uniform [0, jitter] added per packet
  ArrivalProcess process = ArrivalProcess::Periodic;

  void validate() const;
};

struct FloodConfig {
  static constexpr std::uint32_t kDefaultSourceId = 99;

  Nanos start_time = 0;
  XDistribution x_distribution;
  double attack_fraction_f = 1.0;  // in (0, 1]
  double attack_rate = 1000.0;     // packets per second during the burst
  std::uint32_t source_id = kDefaultSourceId;

  void validate() const;
  Nanos spacing() const;  // nanoseconds between consecutive burst packets
};

// All generators are pure functions of (config, seed): regenerating with the
// same arguments yields a bit-identical trace.
Trace generate_benign(const BenignSourceConfig& cfg, Nanos horizon, std::uint64_t seed);

struct FloodResult {
  Trace packets;
  std::int64_t realized_x = 0;
};

// Burst of realized_x packets spaced 1/attack_rate apart from start_time; each
// packet is Attack with probability f, independently.
FloodResult generate_flood(const FloodConfig& cfg, std::uint64_t seed);

// Stable k-way merge by arrival time; ties keep input order. Sequence numbers
// are reassigned contiguously from 0.
Trace merge_traces(const std::vector<Trace>& traces);

void write_trace_csv(std::ostream& os, const Trace& trace);
Trace read_trace_csv(std::istream& is, const std::string& source_name);

}  // namespace gwshield::traffic

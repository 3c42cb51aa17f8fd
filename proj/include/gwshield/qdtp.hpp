#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gwshield/trace.hpp"

namespace gwshield::qdtp {

// Pacing parameter D. D = 0 is the pass-through configuration used for
// baselines without a shaper.
struct QdtpConfig {
  Nanos d_spacing = 0;

  void validate() const;
};

// Running shaper state: last_departure is the departure time of the most
// recently forwarded packet and never decreases.
struct QdtpState {
  std::optional<Nanos> last_departure;
  std::optional<Nanos> last_arrival;
  std::uint64_t forwarded_count = 0;
};

// First packet departs on arrival; afterwards
//   departure = max(last_departure + D, arrival),
// so consecutive departures are always at least D apart.
Nanos forward_one(QdtpState& state, const QdtpConfig& cfg, Nanos arrival);

struct ShapedPacket {
  PacketRecord packet;
  Nanos departure = 0;
  Nanos delay = 0;  // departure - arrival
};

std::vector<ShapedPacket> shape_trace(const Trace& trace, const QdtpConfig& cfg);

// Shaping delay via the queueing recursion on interarrival gaps:
//   Q[0] = 0,  Q[n+1] = max(0, Q[n] + D - gap[n]).
// Output has interarrivals.size() + 1 entries and is identical to the delays
// shape_trace produces for the same trace.
std::vector<Nanos> delay_recursion(const std::vector<Nanos>& interarrivals,
                                   const QdtpConfig& cfg);

void write_shaped_csv(std::ostream& os, const std::vector<ShapedPacket>& shaped);
std::vector<ShapedPacket> read_shaped_csv(std::istream& is, const std::string& source_name);

}  // namespace gwshield::qdtp

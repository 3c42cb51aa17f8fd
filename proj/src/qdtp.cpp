#include "gwshield/qdtp.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

#include "csv_util.hpp"
#include "gwshield/errors.hpp"

namespace gwshield::qdtp {

void QdtpConfig::validate() const {
  if (d_spacing < 0) throw ConfigError("pacing spacing D must be non-negative");
}

Nanos forward_one(QdtpState& state, const QdtpConfig& cfg, Nanos arrival) {
  if (state.last_arrival && arrival < *state.last_arrival)
    throw OrderingError("forward_one: arrival precedes the previous arrival");

  Nanos departure = arrival;
  if (state.last_departure)
    departure = std::max(*state.last_departure + cfg.d_spacing, arrival);

  state.last_departure = departure;
  state.last_arrival = arrival;
  ++state.forwarded_count;
  return departure;
}

std::vector<ShapedPacket> shape_trace(const Trace& trace, const QdtpConfig& cfg) {
  cfg.validate();
  std::vector<ShapedPacket> shaped;
  shaped.reserve(trace.size());
  QdtpState state;
  for (const PacketRecord& p : trace) {
    Nanos departure = forward_one(state, cfg, p.arrival_time);
    shaped.push_back({p, departure, departure - p.arrival_time});
  }
  return shaped;
}

std::vector<Nanos> delay_recursion(const std::vector<Nanos>& interarrivals,
                                   const QdtpConfig& cfg) {
  cfg.validate();
  std::vector<Nanos> delays;
  delays.reserve(interarrivals.size() + 1);
  delays.push_back(0);
  Nanos q = 0;
  for (Nanos gap : interarrivals) {
    if (gap < 0) throw OrderingError("delay_recursion: negative interarrival");
    q = std::max<Nanos>(0, q + cfg.d_spacing - gap);
    delays.push_back(q);
  }
  return delays;
}

void write_shaped_csv(std::ostream& os, const std::vector<ShapedPacket>& shaped) {
  os << "seq,arrival_ns,departure_ns,delay_ns,label\n";
  for (const ShapedPacket& s : shaped) {
    os << s.packet.seq << ',' << s.packet.arrival_time << ',' << s.departure << ',' << s.delay
       << ',' << label_name(s.packet.label) << '\n';
  }
}

std::vector<ShapedPacket> read_shaped_csv(std::istream& is, const std::string& source_name) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(is, line)) throw ParseError(source_name, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "seq,arrival_ns,departure_ns,delay_ns,label")
    throw ParseError(source_name, 1,
                     "missing or wrong header, expected 'seq,arrival_ns,departure_ns,delay_ns,label'");

  std::vector<ShapedPacket> shaped;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csvutil::split_fields(line);
    if (fields.size() != 5) throw ParseError(source_name, lineno, "expected 5 fields");

    ShapedPacket s;
    s.packet.seq = csvutil::parse_int<std::uint64_t>(fields[0], source_name, lineno, "seq");
    s.packet.arrival_time = csvutil::parse_int<Nanos>(fields[1], source_name, lineno, "arrival_ns");
    s.departure = csvutil::parse_int<Nanos>(fields[2], source_name, lineno, "departure_ns");
    s.delay = csvutil::parse_int<Nanos>(fields[3], source_name, lineno, "delay_ns");
    try {
      s.packet.label = label_from_name(std::string(fields[4]));
    } catch (const InvalidInput& e) {
      throw ParseError(source_name, lineno, e.what());
    }
    shaped.push_back(s);
  }
  return shaped;
}

}  // namespace gwshield::qdtp

#include "gwshield/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "csv_util.hpp"
#include "gwshield/errors.hpp"

namespace gwshield {

const char* label_name(Label l) { return l == Label::Attack ? "ATTACK" : "BENIGN"; }

Label label_from_name(const std::string& s) {
  if (s == "ATTACK") return Label::Attack;
  if (s == "BENIGN") return Label::Benign;
  throw InvalidInput("unknown label '" + s + "'");
}

}  // namespace gwshield

namespace gwshield::traffic {

namespace {

constexpr std::uint64_t kBenignStream = 0x01;
constexpr std::uint64_t kFloodSizeStream = 0x02;
constexpr std::uint64_t kFloodLabelStream = 0x03;

void assign_seq(Trace& trace) {
  for (std::uint64_t i = 0; i < trace.size(); ++i) trace[i].seq = i;
}

}  // namespace

XDistribution XDistribution::constant(std::int64_t x) {
  XDistribution d;
  d.kind = Kind::Constant;
  d.constant_x = x;
  return d;
}

XDistribution XDistribution::uniform(std::int64_t lo, std::int64_t hi) {
  XDistribution d;
  d.kind = Kind::Uniform;
  d.uniform_lo = lo;
  d.uniform_hi = hi;
  return d;
}

XDistribution XDistribution::geometric(double mean) {
  XDistribution d;
  d.kind = Kind::Geometric;
  d.geometric_mean = mean;
  return d;
}

XDistribution XDistribution::replication_default(double expected_x) {
  return uniform(static_cast<std::int64_t>(std::llround(0.5 * expected_x)),
                 static_cast<std::int64_t>(std::llround(1.5 * expected_x)));
}

double XDistribution::expected_value() const {
  switch (kind) {
    case Kind::Constant:
      return static_cast<double>(constant_x);
    case Kind::Uniform:
      return 0.5 * static_cast<double>(uniform_lo + uniform_hi);
    case Kind::Geometric:
      return geometric_mean;
  }
  return 0;
}

std::int64_t XDistribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::Constant:
      return constant_x;
    case Kind::Uniform: {
      std::uniform_int_distribution<std::int64_t> dist(uniform_lo, uniform_hi);
      return dist(rng);
    }
    case Kind::Geometric: {
      // Shifted geometric on {1, 2, ...} with the requested mean.
      if (geometric_mean <= 1.0) return 1;
      std::geometric_distribution<std::int64_t> dist(1.0 / geometric_mean);
      return 1 + dist(rng);
    }
  }
  return 1;
}

void XDistribution::validate() const {
  switch (kind) {
    case Kind::Constant:
      if (constant_x < 1) throw ConfigError("constant flood size must be at least 1 packet");
      break;
    case Kind::Uniform:
      if (uniform_lo < 1 || uniform_hi < uniform_lo)
        throw ConfigError("uniform flood size bounds must satisfy 1 <= lo <= hi");
      break;
    case Kind::Geometric:
      if (geometric_mean < 1.0)
        throw ConfigError("geometric flood size mean must be at least 1 packet");
      break;
  }
}

void BenignSourceConfig::validate() const {
  if (period <= 0) throw ConfigError("benign period must be positive");
  if (source_count < 1) throw ConfigError("benign source_count must be at least 1");
  if (jitter < 0) throw ConfigError("benign jitter must be non-negative");
}

void FloodConfig::validate() const {
  x_distribution.validate();
  if (!(attack_fraction_f > 0.0 && attack_fraction_f <= 1.0))
    throw ConfigError("attack fraction must be in (0, 1]");
  if (!(attack_rate > 0.0)) throw ConfigError("attack rate must be positive");
  if (start_time < 0) throw ConfigError("flood start_time must be non-negative");
}

Nanos FloodConfig::spacing() const {
  Nanos gap = static_cast<Nanos>(std::llround(1e9 / attack_rate));
  return gap > 0 ? gap : 1;
}

Trace generate_benign(const BenignSourceConfig& cfg, Nanos horizon, std::uint64_t seed) {
  cfg.validate();
  if (horizon <= 0) throw ConfigError("horizon must be positive");

  std::vector<Trace> per_source;
  per_source.reserve(static_cast<std::size_t>(cfg.source_count));

  for (int s = 0; s < cfg.source_count; ++s) {
    Rng rng(derive_seed(seed, kBenignStream, static_cast<std::uint64_t>(s)));
    Trace pkts;
    if (cfg.process == ArrivalProcess::Periodic) {
      // Sources are staggered evenly across one period.
      Nanos offset = (cfg.period * s) / cfg.source_count;
      std::uniform_int_distribution<Nanos> jit(0, cfg.jitter);
      for (Nanos t = offset; t < horizon; t += cfg.period) {
        Nanos at = t + (cfg.jitter > 0 ? jit(rng) : 0);
        if (at >= horizon) continue;
        pkts.push_back({at, Label::Benign, static_cast<std::uint32_t>(s), 0});
      }
      std::stable_sort(pkts.begin(), pkts.end(),
                       [](const PacketRecord& a, const PacketRecord& b) {
                         return a.arrival_time < b.arrival_time;
                       });
    } else {
      std::exponential_distribution<double> gap(1.0 / static_cast<double>(cfg.period));
      double t = gap(rng);
      while (t < static_cast<double>(horizon)) {
        pkts.push_back({static_cast<Nanos>(std::llround(t)), Label::Benign,
                        static_cast<std::uint32_t>(s), 0});
        t += gap(rng);
      }
    }
    per_source.push_back(std::move(pkts));
  }

  return merge_traces(per_source);
}

FloodResult generate_flood(const FloodConfig& cfg, std::uint64_t seed) {
  cfg.validate();

  Rng size_rng(derive_seed(seed, kFloodSizeStream));
  const std::int64_t x = cfg.x_distribution.sample(size_rng);

  Rng label_rng(derive_seed(seed, kFloodLabelStream));
  std::bernoulli_distribution is_attack(cfg.attack_fraction_f);

  const Nanos gap = cfg.spacing();
  FloodResult result;
  result.realized_x = x;
  result.packets.reserve(static_cast<std::size_t>(x));
  for (std::int64_t i = 0; i < x; ++i) {
    Label label = is_attack(label_rng) ? Label::Attack : Label::Benign;
    result.packets.push_back(
        {cfg.start_time + i * gap, label, cfg.source_id, static_cast<std::uint64_t>(i)});
  }
  return result;
}

Trace merge_traces(const std::vector<Trace>& traces) {
  std::size_t total = 0;
  for (const Trace& t : traces) {
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i].arrival_time < t[i - 1].arrival_time)
        throw OrderingError("merge_traces: input trace is not sorted by arrival time");
    }
    total += t.size();
  }

  Trace merged;
  merged.reserve(total);
  for (const Trace& t : traces) merged.insert(merged.end(), t.begin(), t.end());

  // Stable sort keeps the (input index, original seq) order for equal stamps.
  std::stable_sort(merged.begin(), merged.end(),
                   [](const PacketRecord& a, const PacketRecord& b) {
                     return a.arrival_time < b.arrival_time;
                   });
  assign_seq(merged);
  return merged;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "seq,arrival_ns,label,source_id\n";
  for (const PacketRecord& p : trace) {
    os << p.seq << ',' << p.arrival_time << ',' << label_name(p.label) << ',' << p.source_id
       << '\n';
  }
}

Trace read_trace_csv(std::istream& is, const std::string& source_name) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(is, line)) throw ParseError(source_name, 1, "empty file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "seq,arrival_ns,label,source_id")
    throw ParseError(source_name, 1, "missing or wrong header, expected 'seq,arrival_ns,label,source_id'");

  Trace trace;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csvutil::split_fields(line);
    if (fields.size() != 4) throw ParseError(source_name, lineno, "expected 4 fields");

    PacketRecord p;
    p.seq = csvutil::parse_int<std::uint64_t>(fields[0], source_name, lineno, "seq");
    p.arrival_time = csvutil::parse_int<Nanos>(fields[1], source_name, lineno, "arrival_ns");
    try {
      p.label = label_from_name(std::string(fields[2]));
    } catch (const InvalidInput& e) {
      throw ParseError(source_name, lineno, e.what());
    }
    p.source_id = csvutil::parse_int<std::uint32_t>(fields[3], source_name, lineno, "source_id");

    if (p.seq != trace.size())
      throw ParseError(source_name, lineno, "seq values must be contiguous from 0");
    if (!trace.empty() && p.arrival_time < trace.back().arrival_time)
      throw ParseError(source_name, lineno, "arrival times must be non-decreasing");
    trace.push_back(p);
  }
  return trace;
}

}  // namespace gwshield::traffic

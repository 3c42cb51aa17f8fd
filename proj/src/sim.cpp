#include "gwshield/sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "csv_util.hpp"
#include "gwshield/errors.hpp"
#include "gwshield/rng.hpp"

namespace gwshield::sim {

namespace {

constexpr std::uint64_t kTrafficStream = 0x31;
constexpr std::uint64_t kServiceStream = 0x32;
constexpr std::uint64_t kRepStream = 0x33;
constexpr Nanos kSeriesCadence = 100 * kMillisecond;

struct QueueEvent {
  Nanos t = 0;
  std::int8_t queue = 0;  // 0 = shaper entrance, 1 = detector entrance
  std::int8_t delta = 0;
};

class ServiceClock {
 public:
  ServiceClock(const detector::DetectorConfig& det, double jitter, std::uint64_t seed)
      : tau_(det.tau_inspect), rng_(derive_seed(seed, kServiceStream)) {
    const Nanos spread = static_cast<Nanos>(std::llround(jitter * static_cast<double>(tau_)));
    if (spread > 0) dist_ = std::uniform_int_distribution<Nanos>(tau_ - spread, tau_ + spread);
  }

  Nanos next() { return dist_ ? (*dist_)(rng_) : tau_; }

 private:
  Nanos tau_;
  Rng rng_;
  std::optional<std::uniform_int_distribution<Nanos>> dist_;
};

aam::AamMachine::EpisodeSkipProvider make_adaptive_provider(const Scenario& s) {
  // Keyed on the packet that completed the alarming window: the window can
  // straddle the flood onset, but its last packet is always inside the flood.
  return [&s](const PacketRecord& alarm) -> int {
    const traffic::FloodConfig* match = nullptr;
    for (const auto& flood : s.floods) {
      if (flood.start_time <= alarm.arrival_time &&
          (match == nullptr || flood.start_time > match->start_time)) {
        match = &flood;
      }
    }
    if (match == nullptr) return s.mitigation->skip_m;

    costmodel::CostParams p;
    p.alpha = s.cost_alpha;
    p.beta = s.cost_beta;
    p.f = match->attack_fraction_f;
    p.expected_x = std::max(match->x_distribution.expected_value(),
                            static_cast<double>(s.det.window_w));
    p.tau = s.det.tau_inspect;
    p.w = s.det.window_w;
    return costmodel::optimal_m(p);
  };
}

}  // namespace

void Scenario::validate() const {
  det.validate();
  if (benign) benign->validate();
  for (const auto& flood : floods) {
    flood.validate();
    if (flood.start_time >= horizon)
      throw ConfigError("flood starts at or beyond the horizon");
  }
  if (shaper) shaper->validate();
  if (mitigation) {
    mitigation->validate();
    if (mitigation->window_w != det.window_w)
      throw ConfigError("mitigation window must equal the detector window");
  }
  if (adaptive_m) {
    if (!mitigation) throw ConfigError("adaptive m requires mitigation to be enabled");
    if (!(cost_alpha > 0.0)) throw ConfigError("adaptive m requires cost alpha > 0");
  }
  if (cost_alpha < 0.0 || cost_beta < 0.0)
    throw ConfigError("cost weights must be non-negative");
  if (service_jitter < 0.0 || service_jitter >= 1.0)
    throw ConfigError("service jitter must be in [0, 1)");
  if (horizon <= 0) throw ConfigError("horizon must be positive");
  if (!benign && floods.empty()) throw ConfigError("scenario has no traffic sources");
}

double realized_cost_ms(const aam::MitigationOutcome& outcome, const costmodel::CostParams& p) {
  if (p.w < 1) throw InvalidInput("w must be at least 1");
  if (p.tau <= 0) throw InvalidInput("tau must be positive");
  const std::uint64_t w = static_cast<std::uint64_t>(p.w);
  const std::uint64_t k_windows = (outcome.dropped_benign + w - 1) / w;
  const Nanos k_ns = static_cast<Nanos>(k_windows) * p.w * p.tau;
  return p.alpha * to_ms(k_ns) + p.beta * to_ms(outcome.inspection_time_omega);
}

costmodel::CostParams scenario_cost_params(const Scenario& s) {
  costmodel::CostParams p;
  p.alpha = s.cost_alpha;
  p.beta = s.cost_beta;
  p.tau = s.det.tau_inspect;
  p.w = s.det.window_w;
  if (!s.floods.empty()) {
    p.f = s.floods.front().attack_fraction_f;
    p.expected_x = s.floods.front().x_distribution.expected_value();
  }
  p.expected_x = std::max(p.expected_x, static_cast<double>(p.w));
  return p;
}

SimResult run_scenario(const Scenario& s) {
  s.validate();

  // Traffic generation. The horizon bounds generation only; queues drain past it.
  std::vector<Trace> parts;
  std::int64_t realized_x_total = 0;
  if (s.benign)
    parts.push_back(traffic::generate_benign(*s.benign, s.horizon, derive_seed(s.seed, kTrafficStream)));
  for (std::size_t i = 0; i < s.floods.size(); ++i) {
    auto flood = traffic::generate_flood(s.floods[i], derive_seed(s.seed, kTrafficStream, i + 1));
    realized_x_total += flood.realized_x;
    if (!flood.packets.empty() && flood.packets.back().arrival_time >= s.horizon)
      throw ConfigError("realized flood extends beyond the horizon");
    parts.push_back(std::move(flood.packets));
  }
  Trace trace = traffic::merge_traces(parts);

  SimResult result;
  result.realized_x_total = realized_x_total;
  result.total_packets = trace.size();

  std::vector<QueueEvent> events;
  events.reserve(trace.size() * 4 + 16);

  // Shaper stage: packets wait at the shaper entrance from arrival until
  // their paced departure, which is also their detector arrival instant.
  std::vector<Nanos> ad_arrival(trace.size());
  if (s.shaper) {
    qdtp::QdtpState state;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const Nanos dep = qdtp::forward_one(state, *s.shaper, trace[i].arrival_time);
      ad_arrival[i] = dep;
      events.push_back({trace[i].arrival_time, 0, +1});
      events.push_back({dep, 0, -1});
    }
  } else {
    for (std::size_t i = 0; i < trace.size(); ++i) ad_arrival[i] = trace[i].arrival_time;
  }

  // Detector stage: one inspection per tau. A packet occupies the entrance
  // queue from its detector arrival until its inspection completes, or until
  // the verdict that condemned it is out when it is dropped unseen.
  ServiceClock service(s.det, s.service_jitter, s.seed);
  std::vector<Nanos> ad_exit(trace.size());
  Nanos ad_free = 0;
  Nanos last_verdict = 0;

  if (s.mitigation) {
    aam::AamMachine machine(*s.mitigation, s.det);
    if (s.adaptive_m) machine.set_episode_skip_provider(make_adaptive_provider(s));
    Rng det_rng = aam::detector_rng(s.seed, s.det);

    for (std::size_t i = 0; i < trace.size(); ++i) {
      const Nanos r = ad_arrival[i];
      const auto actions = machine.step(trace[i], det_rng);
      bool window_done = false;
      for (const auto& a : actions) {
        if (a.kind == aam::ActionKind::WindowTested) window_done = true;
      }
      const bool dropped_unseen = !actions.empty() && !window_done;

      if (dropped_unseen) {
        ad_exit[i] = std::max(r, last_verdict);
      } else {
        const Nanos start = std::max(r, ad_free);
        const Nanos end = start + service.next();
        ad_free = end;
        ad_exit[i] = end;
        if (window_done) last_verdict = end;
      }
    }
    machine.finish(s.flush_residual);
    result.outcome = machine.outcome();
  } else {
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const Nanos start = std::max(ad_arrival[i], ad_free);
      const Nanos end = start + service.next();
      ad_free = end;
      ad_exit[i] = end;
    }
    result.outcome.consumed_total = trace.size();
    result.outcome.forwarded_total = trace.size();
    result.outcome.inspected_packets = trace.size();
    result.outcome.inspection_time_total =
        static_cast<Nanos>(trace.size()) * s.det.tau_inspect;
  }

  for (std::size_t i = 0; i < trace.size(); ++i) {
    events.push_back({ad_arrival[i], 1, +1});
    events.push_back({ad_exit[i], 1, -1});
    result.ad_drained_at = std::max(result.ad_drained_at, ad_exit[i]);
  }

  // Cadence ticks give the series a plottable backbone between bursts.
  const Nanos last_t = result.ad_drained_at;
  for (Nanos t = 0; t <= last_t; t += kSeriesCadence) events.push_back({t, 2, 0});

  // Exits sort before entries at equal stamps, ticks after both.
  std::sort(events.begin(), events.end(), [](const QueueEvent& a, const QueueEvent& b) {
    if (a.t != b.t) return a.t < b.t;
    const int ra = a.queue == 2 ? 2 : (a.delta < 0 ? 0 : 1);
    const int rb = b.queue == 2 ? 2 : (b.delta < 0 ? 0 : 1);
    return ra < rb;
  });

  std::int64_t sqf_len = 0;
  std::int64_t ad_len = 0;
  std::size_t i = 0;
  while (i < events.size()) {
    const Nanos t = events[i].t;
    while (i < events.size() && events[i].t == t) {
      if (events[i].queue == 0) sqf_len += events[i].delta;
      if (events[i].queue == 1) ad_len += events[i].delta;
      ++i;
    }
    result.queue_series.push_back({t, sqf_len, ad_len});
    result.peak_sqf_queue = std::max(result.peak_sqf_queue, sqf_len);
    result.peak_ad_queue = std::max(result.peak_ad_queue, ad_len);
  }

  result.realized_cost_ms = realized_cost_ms(result.outcome, scenario_cost_params(s));
  return result;
}

ReplicationResult run_replications(const Scenario& s, int reps) {
  if (reps < 1) throw InvalidInput("reps must be at least 1");

  ReplicationResult out;
  out.reps.reserve(static_cast<std::size_t>(reps));
  double sum = 0.0;
  double sum_sq = 0.0;

  const costmodel::CostParams p = scenario_cost_params(s);
  for (int rep = 0; rep < reps; ++rep) {
    Scenario rs = s;
    rs.seed = derive_seed(s.seed, kRepStream, static_cast<std::uint64_t>(rep));
    SimResult r = run_scenario(rs);

    RepSummary summary;
    summary.rep = rep;
    summary.seed = rs.seed;
    summary.realized_x = r.realized_x_total;
    summary.n_windows = r.outcome.mitigation_windows_n;
    summary.delta = r.outcome.dropped_total;
    summary.benign_dropped = r.outcome.dropped_benign;
    summary.omega_ms = to_ms(r.outcome.inspection_time_omega);
    const std::uint64_t w = static_cast<std::uint64_t>(p.w);
    summary.k_ms = to_ms(static_cast<Nanos>((r.outcome.dropped_benign + w - 1) / w) * p.w * p.tau);
    summary.cost_ms = r.realized_cost_ms;
    out.reps.push_back(summary);

    sum += summary.cost_ms;
    sum_sq += summary.cost_ms * summary.cost_ms;
  }

  out.mean_cost_ms = sum / reps;
  if (reps > 1) {
    const double var = std::max(0.0, (sum_sq - sum * sum / reps) / (reps - 1));
    out.ci95_ms = 1.96 * std::sqrt(var / reps);
  }
  return out;
}

void write_series_csv(std::ostream& os, const SimResult& result) {
  os << "t_ns,sqf_queue,ad_queue\n";
  for (const QueueSample& q : result.queue_series)
    os << q.t << ',' << q.sqf_len << ',' << q.ad_len << '\n';
}

void write_replication_csv(std::ostream& os, const ReplicationResult& result) {
  os << "rep,seed,realized_x,n,delta,benign_dropped,omega_ms,k_ms,cost_ms\n";
  for (const RepSummary& r : result.reps) {
    os << r.rep << ',' << r.seed << ',' << r.realized_x << ',' << r.n_windows << ',' << r.delta
       << ',' << r.benign_dropped << ',' << csvutil::fmt_ms(r.omega_ms) << ','
       << csvutil::fmt_ms(r.k_ms) << ',' << csvutil::fmt_ms(r.cost_ms) << '\n';
  }
}

}  // namespace gwshield::sim

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gwshield/aam.hpp"
#include "gwshield/costmodel.hpp"
#include "gwshield/detector.hpp"
#include "gwshield/qdtp.hpp"
#include "gwshield/traffic.hpp"

namespace gwshield::sim {

// A full experiment: traffic sources, optional shaper, detector, optional
// mitigation, cost weights and the master seed. The horizon bounds traffic
// generation; queues are always drained to the end regardless of it.
struct Scenario {
  std::optional<traffic::BenignSourceConfig> benign;
  std::vector<traffic::FloodConfig> floods;
  std::optional<qdtp::QdtpConfig> shaper;      // unset: baseline without the SQF
  detector::DetectorConfig det;
  std::optional<aam::AamConfig> mitigation;    // unset: detection only, no drops
  bool adaptive_m = false;                      // recompute the optimal m per episode
  double cost_alpha = 1.0;
  double cost_beta = 1.0;
  double service_jitter = 0.0;  // +/- fraction of tau, 0 disables
  bool flush_residual = false;
  Nanos horizon = kSecond;
  std::uint64_t seed = 0;

  void validate() const;
};

struct QueueSample {
  Nanos t = 0;
  std::int64_t sqf_len = 0;
  std::int64_t ad_len = 0;
};

struct SimResult {
  std::vector<QueueSample> queue_series;  // every event plus a 100 ms cadence
  aam::MitigationOutcome outcome;
  double realized_cost_ms = 0;
  std::int64_t peak_sqf_queue = 0;
  std::int64_t peak_ad_queue = 0;
  Nanos ad_drained_at = 0;  // when the detector entrance queue last empties
  std::int64_t realized_x_total = 0;
  std::uint64_t total_packets = 0;
};

SimResult run_scenario(const Scenario& s);

// Realized cost of one run: K = tau * W * ceil(benign_dropped / W) for the
// re-inspection of mistakenly dropped benign packets, Omega the inspection
// time of windows tested while mitigating. Returns alpha*K + beta*Omega in ms.
double realized_cost_ms(const aam::MitigationOutcome& outcome, const costmodel::CostParams& p);

struct RepSummary {
  int rep = 0;
  std::uint64_t seed = 0;
  std::int64_t realized_x = 0;
  std::uint64_t n_windows = 0;
  std::uint64_t delta = 0;
  std::uint64_t benign_dropped = 0;
  double omega_ms = 0;
  double k_ms = 0;
  double cost_ms = 0;
};

struct ReplicationResult {
  double mean_cost_ms = 0;
  double ci95_ms = 0;  // normal-approximation half width; 0 when reps == 1
  std::vector<RepSummary> reps;
};

// Runs `reps` independent replications with per-rep seeds derived from the
// scenario seed, and aggregates realized costs.
ReplicationResult run_replications(const Scenario& s, int reps);

void write_series_csv(std::ostream& os, const SimResult& result);
void write_replication_csv(std::ostream& os, const ReplicationResult& result);

// Cost parameters implied by a scenario: weights from the scenario, f and
// E[X] from its first flood, tau and W from the detector.
costmodel::CostParams scenario_cost_params(const Scenario& s);

}  // namespace gwshield::sim

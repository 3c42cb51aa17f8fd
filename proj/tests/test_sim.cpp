#include <sstream>

#include "doctest.h"
#include "gwshield/errors.hpp"
#include "gwshield/scenario_file.hpp"
#include "gwshield/sim.hpp"

using namespace gwshield;
using namespace gwshield::sim;

namespace {

Scenario underload_scenario() {
  Scenario s;
  traffic::BenignSourceConfig benign;
  benign.period = 100 * kMillisecond;
  benign.source_count = 1;
  s.benign = benign;
  s.shaper = qdtp::QdtpConfig{3 * kMillisecond};
  s.det.tpr = 1.0;
  s.det.tnr = 1.0;
  s.horizon = 5 * kSecond;
  s.seed = 3;
  return s;
}

Scenario flood_scenario(std::int64_t x, double rate_pps, bool with_shaper) {
  Scenario s;
  traffic::FloodConfig flood;
  flood.start_time = 0;
  flood.x_distribution = traffic::XDistribution::constant(x);
  flood.attack_fraction_f = 1.0;
  flood.attack_rate = rate_pps;
  s.floods.push_back(flood);
  if (with_shaper) s.shaper = qdtp::QdtpConfig{3 * kMillisecond};
  s.det.tpr = 1.0;
  s.det.tnr = 1.0;
  s.horizon = static_cast<Nanos>(static_cast<double>(x) / rate_pps * 1e9) + kSecond;
  s.seed = 17;
  return s;
}

}  // namespace

TEST_CASE("underloaded system keeps the detector queue at one") {
  SimResult r = run_scenario(underload_scenario());
  CHECK(r.peak_ad_queue <= 1);
  CHECK(r.outcome.dropped_total == 0);
  CHECK(r.realized_cost_ms == 0.0);
}

TEST_CASE("flood without shaper piles up near the fluid bound") {
  // 15000 packets in 1 s against a 3 ms service: backlog ~ 15000 - 333.
  SimResult res = run_scenario(flood_scenario(15000, 15000.0, false));
  const double fluid = 15000.0 - 1.0 / 3e-3;
  CHECK(std::abs(static_cast<double>(res.peak_ad_queue) - fluid) / fluid < 0.05);
  // Drain completes near x * tau.
  const double drain_s = to_seconds(res.ad_drained_at);
  CHECK(std::abs(drain_s - 45.0) / 45.0 < 0.05);
}

TEST_CASE("flood with shaper at D = tau keeps the detector queue at two or less") {
  SimResult r = run_scenario(flood_scenario(15000, 15000.0, true));
  CHECK(r.peak_ad_queue <= 2);
  CHECK(r.peak_sqf_queue > 10000);  // the backlog moved to the shaper entrance
}

TEST_CASE("identical scenarios give identical results") {
  Scenario s = flood_scenario(5000, 10000.0, true);
  s.service_jitter = 0.15;
  SimResult a = run_scenario(s);
  SimResult b = run_scenario(s);
  CHECK(a.peak_ad_queue == b.peak_ad_queue);
  CHECK(a.peak_sqf_queue == b.peak_sqf_queue);
  CHECK(a.ad_drained_at == b.ad_drained_at);
  REQUIRE(a.queue_series.size() == b.queue_series.size());
  CHECK(a.queue_series[a.queue_series.size() / 2].ad_len ==
        b.queue_series[b.queue_series.size() / 2].ad_len);
}

TEST_CASE("realized omega equals mitigating windows times W tau") {
  Scenario s = flood_scenario(2000, 5000.0, true);
  traffic::BenignSourceConfig benign;
  benign.period = 20 * kMillisecond;
  s.benign = benign;
  s.mitigation = aam::AamConfig{20, 80};
  s.horizon = 30 * kSecond;
  SimResult r = run_scenario(s);
  CHECK(r.outcome.inspection_time_omega ==
        static_cast<Nanos>(r.outcome.windows_tested_mitigating) * 20 * s.det.tau_inspect);
  CHECK(r.outcome.dropped_total > 0);
}

TEST_CASE("realized cost formula") {
  costmodel::CostParams p;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.tau = 3 * kMillisecond;
  p.w = 20;
  p.expected_x = 1000;
  p.f = 0.9;

  aam::MitigationOutcome none;
  CHECK(realized_cost_ms(none, p) == 0.0);

  aam::MitigationOutcome out;
  out.dropped_benign = 920;
  CHECK(realized_cost_ms(out, p) == doctest::Approx(2760.0));

  // doubling alpha doubles the reprocessing term exactly
  costmodel::CostParams doubled = p;
  doubled.alpha = 2.0;
  CHECK(realized_cost_ms(out, doubled) == doctest::Approx(2.0 * 2760.0));

  out.inspection_time_omega = 600 * kMillisecond;
  CHECK(realized_cost_ms(out, p) == doctest::Approx(2760.0 + 600.0));
}

TEST_CASE("replications: single rep has zero confidence width") {
  Scenario s = flood_scenario(500, 5000.0, true);
  s.mitigation = aam::AamConfig{20, 50};
  traffic::BenignSourceConfig benign;
  benign.period = 20 * kMillisecond;
  s.benign = benign;
  s.horizon = 10 * kSecond;

  ReplicationResult one = run_replications(s, 1);
  CHECK(one.reps.size() == 1);
  CHECK(one.ci95_ms == 0.0);
  CHECK(one.mean_cost_ms == doctest::Approx(one.reps[0].cost_ms));
}

TEST_CASE("replications: constant flood and perfect detector collapse the spread") {
  Scenario s = flood_scenario(600, 5000.0, true);
  s.mitigation = aam::AamConfig{20, 60};
  traffic::BenignSourceConfig benign;
  benign.period = 20 * kMillisecond;
  s.benign = benign;
  s.horizon = 15 * kSecond;

  ReplicationResult reps = run_replications(s, 8);
  for (const RepSummary& r : reps.reps) CHECK(r.cost_ms == doctest::Approx(reps.reps[0].cost_ms));
  CHECK(reps.ci95_ms == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("queue series is time sorted with non-negative lengths") {
  Scenario s = flood_scenario(3000, 10000.0, true);
  s.mitigation = aam::AamConfig{20, 100};
  traffic::BenignSourceConfig benign;
  benign.period = 50 * kMillisecond;
  s.benign = benign;
  s.horizon = 20 * kSecond;
  SimResult r = run_scenario(s);
  REQUIRE(!r.queue_series.empty());
  for (std::size_t i = 0; i < r.queue_series.size(); ++i) {
    CHECK(r.queue_series[i].sqf_len >= 0);
    CHECK(r.queue_series[i].ad_len >= 0);
    if (i > 0) CHECK(r.queue_series[i].t > r.queue_series[i - 1].t);
  }
  CHECK(r.queue_series.back().ad_len == 0);
}

TEST_CASE("scenario validation catches bad combinations") {
  Scenario s = underload_scenario();
  s.mitigation = aam::AamConfig{10, 5};  // detector window is 20
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = underload_scenario();
  s.adaptive_m = true;  // needs mitigation
  CHECK_THROWS_AS(s.validate(), ConfigError);

  s = underload_scenario();
  s.horizon = 0;
  CHECK_THROWS_AS(s.validate(), ConfigError);

  Scenario empty;
  empty.horizon = kSecond;
  CHECK_THROWS_AS(empty.validate(), ConfigError);

  s = flood_scenario(100, 1000.0, false);
  s.floods[0].start_time = 2 * s.horizon;
  CHECK_THROWS_AS(run_scenario(s), ConfigError);
}

TEST_CASE("series and replication CSV headers") {
  Scenario s = underload_scenario();
  SimResult r = run_scenario(s);
  std::stringstream ss;
  write_series_csv(ss, r);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "t_ns,sqf_queue,ad_queue");

  ReplicationResult reps = run_replications(s, 2);
  std::stringstream rs;
  write_replication_csv(rs, reps);
  std::getline(rs, header);
  CHECK(header == "rep,seed,realized_x,n,delta,benign_dropped,omega_ms,k_ms,cost_ms");
}

TEST_CASE("scenario files parse into runnable scenarios") {
  const char* text = R"(# comment
[benign]
period_ms = 100
source_count = 2

[flood]
start_s = 1
x = constant:500
attack_fraction = 0.9
rate_pps = 5000

[flood]
start_s = 10
x = uniform:100:300
rate_pps = 2000

[qdtp]
d_ms = 3

[detector]
tpr = 1.0
tnr = 1.0
tau_ms = 3
window = 20

[aam]
m = 80

[cost]
alpha = 1
beta = 0.5

[sim]
horizon_s = 20
seed = 42
)";
  std::stringstream in(text);
  Scenario s = scenario::load(in, "inline");
  CHECK(s.benign.has_value());
  CHECK(s.benign->source_count == 2);
  REQUIRE(s.floods.size() == 2);
  CHECK(s.floods[0].x_distribution.constant_x == 500);
  CHECK(s.floods[1].x_distribution.uniform_hi == 300);
  CHECK(s.shaper.has_value());
  CHECK(s.shaper->d_spacing == 3 * kMillisecond);
  REQUIRE(s.mitigation.has_value());
  CHECK(s.mitigation->skip_m == 80);
  CHECK(s.mitigation->window_w == 20);
  CHECK(s.cost_beta == doctest::Approx(0.5));
  CHECK(s.seed == 42);

  SimResult r = run_scenario(s);
  CHECK(r.total_packets > 500);
}

TEST_CASE("scenario parser reports bad input with line numbers") {
  std::stringstream bad1("[nonsense]\nkey = 1\n");
  CHECK_THROWS_AS(scenario::load(bad1, "inline"), ParseError);

  std::stringstream bad2("[sim]\nhorizon_s : 5\n");
  CHECK_THROWS_AS(scenario::load(bad2, "inline"), ParseError);

  std::stringstream bad3("[sim]\nwrong_key = 5\n");
  CHECK_THROWS_AS(scenario::load(bad3, "inline"), ParseError);

  std::stringstream bad4("[flood]\nx = pareto:5\n");
  CHECK_THROWS_AS(scenario::load(bad4, "inline"), ParseError);

  std::stringstream bad5("key_without_section = 5\n");
  CHECK_THROWS_AS(scenario::load(bad5, "inline"), ParseError);

  try {
    std::stringstream bad("[sim]\nhorizon_s = 5\nbogus = 1\n");
    scenario::load(bad, "inline");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("scenario overrides rewrite existing keys and add new ones") {
  const char* text = R"([flood]
start_s = 0
x = constant:100
rate_pps = 1000

[detector]
tpr = 1.0
tnr = 1.0

[sim]
horizon_s = 2
seed = 1
)";
  std::stringstream in(text);
  Scenario s = scenario::load(in, "inline", {"flood.x=constant:250", "sim.seed=9", "qdtp.d_ms=3"});
  REQUIRE(s.floods.size() == 1);
  CHECK(s.floods[0].x_distribution.constant_x == 250);
  CHECK(s.seed == 9);
  REQUIRE(s.shaper.has_value());
  CHECK(s.shaper->d_spacing == 3 * kMillisecond);

  std::stringstream in2(text);
  CHECK_THROWS_AS(scenario::load(in2, "inline", {"noequals"}), ConfigError);
}

TEST_CASE("adaptive mitigation recomputes m per flood") {
  Scenario s;
  traffic::BenignSourceConfig benign;
  benign.period = 50 * kMillisecond;
  s.benign = benign;

  traffic::FloodConfig f1;
  f1.start_time = 2 * kSecond;
  f1.x_distribution = traffic::XDistribution::constant(2000);
  f1.attack_rate = 5000.0;
  traffic::FloodConfig f2 = f1;
  f2.start_time = 30 * kSecond;
  f2.x_distribution = traffic::XDistribution::constant(8000);
  s.floods = {f1, f2};

  s.shaper = qdtp::QdtpConfig{3 * kMillisecond};
  s.det.tpr = 1.0;
  s.det.tnr = 1.0;
  s.mitigation = aam::AamConfig{20, 50};
  s.adaptive_m = true;
  s.cost_alpha = 1.0;
  s.cost_beta = 1.0;
  s.horizon = 80 * kSecond;
  s.seed = 21;

  SimResult r = run_scenario(s);
  REQUIRE(r.outcome.episodes.size() == 2);
  costmodel::CostParams p1 = scenario_cost_params(s);
  p1.expected_x = 2000;
  costmodel::CostParams p2 = p1;
  p2.expected_x = 8000;
  CHECK(r.outcome.episodes[0].m_used == costmodel::optimal_m(p1));
  CHECK(r.outcome.episodes[1].m_used == costmodel::optimal_m(p2));
  CHECK(r.outcome.episodes[0].m_used < r.outcome.episodes[1].m_used);
}

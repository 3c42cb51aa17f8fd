#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "gwshield/costmodel.hpp"
#include "gwshield/errors.hpp"

using namespace gwshield;
using namespace gwshield::costmodel;

namespace {

CostParams reference_params() {
  CostParams p;
  p.alpha = 1.0;
  p.beta = 1.0;
  p.f = 0.9;
  p.expected_x = 1000.0;
  p.tau = 3 * kMillisecond;
  p.w = 20;
  return p;
}

}  // namespace

TEST_CASE("expected window count") {
  CostParams p = reference_params();
  CHECK(expected_windows(p, 80) == doctest::Approx(10.3));

  p.expected_x = 20;
  CHECK(expected_windows(p, 80) == doctest::Approx(0.5));

  p.expected_x = 1000;
  CHECK(expected_windows(p, 1'000'000'000) == doctest::Approx(0.5).epsilon(1e-6));

  CHECK_THROWS_AS(expected_windows(p, 0), InvalidInput);
}

TEST_CASE("exact window count") {
  CHECK(exact_windows(1000, 20, 80) == 10);
  CHECK(exact_windows(20, 20, 80) == 0);
  CHECK(exact_windows(120, 20, 80) == 1);
  CHECK_THROWS_AS(exact_windows(10, 20, 80), InvalidInput);
}

TEST_CASE("expected inspection overhead") {
  CostParams p = reference_params();
  CHECK(expected_overhead_ms(p, 80) == doctest::Approx(618.0));

  p.expected_x = 20;
  CHECK(expected_overhead_ms(p, 80) == doctest::Approx(to_ms(p.tau) * 20 / 2.0));

  CostParams tiny;
  tiny.w = 1;
  tiny.tau = kMillisecond;
  tiny.expected_x = 101;
  CHECK(expected_overhead_ms(tiny, 99) == doctest::Approx(1.5));
}

TEST_CASE("expected drops") {
  CostParams p = reference_params();
  CHECK(expected_drops(p, 80) == doctest::Approx(1050.0));

  CostParams tiny;
  tiny.w = 1;
  tiny.expected_x = 1;
  CHECK(expected_drops(tiny, 1) == doctest::Approx(2.0));

  // grows linearly in m
  double prev = expected_drops(p, 1);
  for (int m = 2; m < 100; ++m) {
    double cur = expected_drops(p, m);
    CHECK(cur > prev);
    CHECK(cur - prev == doctest::Approx(0.5));
    prev = cur;
  }
}

TEST_CASE("expected reprocessing time") {
  CostParams p = reference_params();
  CHECK(expected_reprocessing_ms(p, 80) == doctest::Approx(2880.0));

  p.f = 1.0;
  CHECK(expected_reprocessing_ms(p, 80) ==
        doctest::Approx(to_ms(p.tau) * (p.expected_x + 40 + 20)));
}

TEST_CASE("exact reprocessing time matches the ceiling form") {
  // ceil((0.9*1000 + 1020 - 1000)/20) = ceil(46) = 46 windows of 20 * 3 ms.
  CHECK(exact_reprocessing_ms(1000, 1020, 0.9, 20, 3 * kMillisecond) == doctest::Approx(2760.0));
}

TEST_CASE("total cost combines both terms") {
  CostParams p = reference_params();
  CostReport r = total_cost(p, 80);
  CHECK(r.e_k_ms == doctest::Approx(2880.0));
  CHECK(r.e_omega_ms == doctest::Approx(618.0));
  CHECK(r.c_total_ms == doctest::Approx(3498.0));
  CHECK(r.at_m == 80);
  CHECK(r.c_total_ms == doctest::Approx(p.alpha * r.e_k_ms + p.beta * r.e_omega_ms));
}

TEST_CASE("single-term degeneracies are monotone in m") {
  CostParams p = reference_params();
  p.beta = 0.0;
  double prev = total_cost(p, 1).c_total_ms;
  for (int m = 2; m <= 300; ++m) {
    double cur = total_cost(p, m).c_total_ms;
    CHECK(cur > prev);
    prev = cur;
  }

  p = reference_params();
  p.alpha = 0.0;
  prev = total_cost(p, 1).c_total_ms;
  for (int m = 2; m <= 300; ++m) {
    double cur = total_cost(p, m).c_total_ms;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("closed-form optimum at the reference point") {
  CostParams p = reference_params();
  CHECK(optimal_m(p) == 178);
  CHECK_FALSE(optimal_m_clamped(p));

  p.expected_x = 20;  // formula gives -W, clamps to 1
  CHECK(optimal_m(p) == 1);
  CHECK(optimal_m_clamped(p));

  p.expected_x = 10;
  CHECK_THROWS_AS(optimal_m(p), InvalidInput);
}

TEST_CASE("optimal cost evaluates the closed form") {
  CostParams p = reference_params();
  CHECK(optimal_cost_ms(p) == doctest::Approx(3353.97).epsilon(1e-3));
  // agrees with the discrete cost at the rounded optimum, within rounding
  CHECK(optimal_cost_ms(p) == doctest::Approx(total_cost(p, 178).c_total_ms).epsilon(1e-4));
}

TEST_CASE("optimal cost lower-bounds the integer sweep") {
  CostParams p = reference_params();
  SweepBest best = brute_force_m(p, 2000);
  CHECK(optimal_cost_ms(p) <= best.c_best_ms + 1e-9);
  CHECK(std::abs(best.m_best - 178) <= 1);
}

TEST_CASE("brute force degeneracies") {
  CostParams p = reference_params();
  p.alpha = 0.0;
  CHECK(brute_force_m(p, 500).m_best == 500);  // overhead only: larger skips always win
  p = reference_params();
  p.beta = 0.0;
  CHECK(brute_force_m(p, 500).m_best == 1);  // reprocessing only: skip as little as possible
}

TEST_CASE("property: closed form tracks the sweep within 1") {
  Rng rng(13579);
  std::uniform_real_distribution<double> log_weight(std::log(0.1), std::log(10.0));
  std::uniform_int_distribution<int> w_dist(2, 100);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int checked = 0;
  for (int iter = 0; iter < 60; ++iter) {
    CostParams p;
    p.alpha = std::exp(log_weight(rng));
    p.beta = std::exp(log_weight(rng));
    p.w = w_dist(rng);
    p.expected_x = std::exp(std::log(static_cast<double>(p.w)) +
                            u01(rng) * (std::log(2e5) - std::log(static_cast<double>(p.w))));
    p.f = 0.1 + 0.9 * u01(rng);

    if (optimal_m_clamped(p)) continue;
    const int mstar = optimal_m(p);
    const int m_max = 3 * mstar + p.w + 100;
    SweepBest best = brute_force_m(p, m_max);
    REQUIRE(best.m_best < m_max);  // boundary must not bind
    CHECK(std::abs(best.m_best - mstar) <= 1);
    ++checked;
  }
  CHECK(checked > 30);
}

TEST_CASE("derivative sign: cost falls before the optimum and rises after") {
  CostParams p = reference_params();
  const int mstar = optimal_m(p);
  for (int m = 1; m + 1 < mstar; ++m)
    CHECK(total_cost(p, m).c_total_ms > total_cost(p, m + 1).c_total_ms);
  for (int m = mstar + 1; m < 3 * mstar; ++m)
    CHECK(total_cost(p, m).c_total_ms < total_cost(p, m + 1).c_total_ms);
}

TEST_CASE("the optimum does not depend on tau or f") {
  CostParams p = reference_params();
  const int base = optimal_m(p);
  for (Nanos tau : {kMillisecond / 3, kMillisecond, 3 * kMillisecond, 30 * kMillisecond}) {
    for (double f : {0.05, 0.3, 0.7, 1.0}) {
      p.tau = tau;
      p.f = f;
      CHECK(optimal_m(p) == base);
      CHECK(brute_force_m(p, 500).m_best == brute_force_m(reference_params(), 500).m_best);
    }
  }
}

TEST_CASE("m* curve values and monotonicity") {
  std::vector<double> exs = {100, 1000, 10000};
  auto curve = mstar_curve(20, 1.0, exs);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].second == 37);
  CHECK(curve[1].second == 178);
  CHECK(curve[2].second == 612);

  std::vector<double> dense;
  for (double ex = 20; ex <= 1e6; ex *= 1.37) dense.push_back(ex);
  auto full = mstar_curve(20, 0.7, dense);
  for (std::size_t i = 1; i < full.size(); ++i) CHECK(full[i].second >= full[i - 1].second);
  CHECK(mstar_curve(20, 1.0, std::vector<double>{20.0}).front().second == 1);
}

TEST_CASE("scaling: m* + W follows the square root of E[X] - W") {
  std::vector<double> exs;
  for (double ex = 1e3; ex <= 1e6 + 1; ex *= 10) exs.push_back(ex);
  auto curve = mstar_curve(20, 1.0, exs);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [ex, m] : curve) {
    const double x = std::log(ex - 20.0);
    const double y = std::log(static_cast<double>(m) + 20.0);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(curve.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("Monte-Carlo window count validates the first-order approximation") {
  CostParams p = reference_params();
  p.expected_x = 5000;
  const int m = 180;  // m + W = 200 <= (E[X] - W)/5
  Rng rng(777);
  auto dist = traffic::XDistribution::replication_default(p.expected_x);
  double acc = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i)
    acc += static_cast<double>(exact_windows(std::max<std::int64_t>(p.w, dist.sample(rng)), p.w, m));
  const double mc = acc / draws;
  const double approx = expected_windows(p, m);
  CHECK(std::abs(mc - approx) / approx < 0.05);
}

TEST_CASE("Monte-Carlo sweep stays near the closed form in its validity region") {
  CostParams p = reference_params();
  p.expected_x = 2000;
  auto dist = traffic::XDistribution::replication_default(p.expected_x);
  SweepBest mc = brute_force_m_mc(p, 800, dist, 4000, 99);
  const int mstar = optimal_m(p);
  CHECK(std::abs(mc.m_best - mstar) <= mstar / 4);
}

TEST_CASE("weight validation permits zero but rejects negatives") {
  CostParams p = reference_params();
  p.alpha = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = reference_params();
  p.alpha = 0.0;
  CHECK_NOTHROW(p.validate());
  CHECK_THROWS_AS(optimal_m(p), InvalidInput);  // closed form needs alpha > 0
  p = reference_params();
  p.f = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("sweep CSV carries the documented header and matches total_cost") {
  CostParams p = reference_params();
  std::vector<int> ms = {20, 80, 178};
  std::stringstream ss;
  write_sweep_csv(ss, p, ms);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "m,e_n,e_omega_ms,e_k_ms,c_total_ms");
  std::string row;
  std::getline(ss, row);
  CHECK(row.substr(0, 3) == "20,");

  std::stringstream curve;
  std::vector<double> ratios = {0.5, 1.0};
  std::vector<double> exs = {1000.0};
  write_curve_csv(curve, 20, ratios, exs);
  std::getline(curve, header);
  CHECK(header == "ex,beta_over_alpha,m_star");
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "gwshield/time.hpp"
#include "gwshield/traffic.hpp"

namespace gwshield::costmodel {

// Inputs of the mitigation cost model. alpha weighs the reprocessing of
// benign packets dropped by mistake, beta the inspection overhead while an
// attack is in progress.
struct CostParams {
  double alpha = 1.0;
  double beta = 1.0;
  double f = 1.0;           // attack fraction within the flood, in (0, 1]
  double expected_x = 0.0;  // expected flood size E[X], at least w
  Nanos tau = 3 * kMillisecond;
  int w = 20;

  void validate() const;  // alpha, beta >= 0; the closed-form optimum also needs alpha > 0
};

struct CostReport {
  double e_n = 0;         // expected detection windows per attack
  double e_omega_ms = 0;  // expected in-attack inspection overhead
  double e_delta = 0;     // expected packets dropped
  double e_k_ms = 0;      // expected reprocessing time
  double c_total_ms = 0;  // alpha * E[K] + beta * E[Omega]
  int at_m = 0;
};

// E[N] ~= (E[X] - W) / (m + W) + 1/2. First-order approximation, accurate
// while m + W is small against E[X] - W.
double expected_windows(const CostParams& p, int m);

// N = ceil((x - w) / (m + w)), exact for a known flood size x >= w.
std::int64_t exact_windows(std::int64_t x, int w, int m);

// E[Omega] = tau * W * E[N], in milliseconds.
double expected_overhead_ms(const CostParams& p, int m);

// E[delta] ~= E[X] + (m + W) / 2.
double expected_drops(const CostParams& p, int m);

// E[K] ~= tau * (f * E[X] + m/2 + W), in milliseconds.
double expected_reprocessing_ms(const CostParams& p, int m);

// Exact counterpart K = tau * W * ceil((f*x + delta - x) / W) for a realized
// flood of x packets with delta total drops.
double exact_reprocessing_ms(std::int64_t x, std::int64_t delta, double f, int w, Nanos tau);

CostReport total_cost(const CostParams& p, int m);

// Closed-form optimum round(sqrt(2 (beta/alpha) W (E[X] - W)) - W), clamped
// below at 1 since at least one packet must be skipped.
int optimal_m(const CostParams& p);
bool optimal_m_clamped(const CostParams& p);

// Cost at the continuous optimum, in milliseconds.
double optimal_cost_ms(const CostParams& p);

struct SweepBest {
  int m_best = 1;
  double c_best_ms = 0;
};

// Exhaustive integer sweep of total_cost over [1, m_max]; ties resolve to the
// smallest m. Independent check of the closed form.
SweepBest brute_force_m(const CostParams& p, int m_max);

// Monte-Carlo sweep using the exact window count per draw of X instead of the
// first-order approximation. Recommended when m + W is not small against
// E[X] - W. Draws are shared across m values.
SweepBest brute_force_m_mc(const CostParams& p, int m_max, const traffic::XDistribution& x_dist,
                           int draws, std::uint64_t seed);

// Tabulates the optimal m across expected flood sizes; nondecreasing in E[X].
std::vector<std::pair<double, int>> mstar_curve(int w, double beta_over_alpha,
                                                std::span<const double> ex_values);

void write_sweep_csv(std::ostream& os, const CostParams& p, std::span<const int> m_values);
void write_curve_csv(std::ostream& os, int w, std::span<const double> ratios,
                     std::span<const double> ex_values);

}  // namespace gwshield::costmodel

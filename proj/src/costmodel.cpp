#include "gwshield/costmodel.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "csv_util.hpp"
#include "gwshield/errors.hpp"
#include "gwshield/rng.hpp"

namespace gwshield::costmodel {

namespace {

constexpr std::uint64_t kMcStream = 0x21;

double tau_ms(const CostParams& p) { return to_ms(p.tau); }

void require_m(int m) {
  if (m < 1) throw InvalidInput("m must be at least 1");
}

}  // namespace

void CostParams::validate() const {
  if (alpha < 0.0 || beta < 0.0) throw ConfigError("cost weights must be non-negative");
  if (!(f > 0.0 && f <= 1.0)) throw ConfigError("attack fraction f must be in (0, 1]");
  if (w < 1) throw ConfigError("window w must be at least 1");
  if (expected_x < static_cast<double>(w))
    throw InvalidInput("expected flood size must be at least the window size");
  if (tau <= 0) throw ConfigError("tau must be positive");
}

double expected_windows(const CostParams& p, int m) {
  p.validate();
  require_m(m);
  return (p.expected_x - p.w) / static_cast<double>(m + p.w) + 0.5;
}

std::int64_t exact_windows(std::int64_t x, int w, int m) {
  require_m(m);
  if (w < 1) throw InvalidInput("w must be at least 1");
  if (x < w) throw InvalidInput("flood size must be at least the window size");
  const std::int64_t stride = m + w;
  return (x - w + stride - 1) / stride;
}

double expected_overhead_ms(const CostParams& p, int m) {
  return tau_ms(p) * p.w * expected_windows(p, m);
}

double expected_drops(const CostParams& p, int m) {
  p.validate();
  require_m(m);
  return p.expected_x + 0.5 * (m + p.w);
}

double expected_reprocessing_ms(const CostParams& p, int m) {
  p.validate();
  require_m(m);
  return tau_ms(p) * (p.f * p.expected_x + 0.5 * m + p.w);
}

double exact_reprocessing_ms(std::int64_t x, std::int64_t delta, double f, int w, Nanos tau) {
  if (w < 1) throw InvalidInput("w must be at least 1");
  const double resent = f * static_cast<double>(x) + static_cast<double>(delta - x);
  const double windows = std::ceil(resent / w);
  return to_ms(tau) * w * (windows > 0 ? windows : 0);
}

CostReport total_cost(const CostParams& p, int m) {
  CostReport r;
  r.at_m = m;
  r.e_n = expected_windows(p, m);
  r.e_omega_ms = expected_overhead_ms(p, m);
  r.e_delta = expected_drops(p, m);
  r.e_k_ms = expected_reprocessing_ms(p, m);
  r.c_total_ms = p.alpha * r.e_k_ms + p.beta * r.e_omega_ms;
  return r;
}

namespace {

double mstar_continuous(const CostParams& p) {
  return std::sqrt(2.0 * (p.beta / p.alpha) * p.w * (p.expected_x - p.w)) - p.w;
}

}  // namespace

int optimal_m(const CostParams& p) {
  p.validate();
  if (!(p.alpha > 0.0)) throw InvalidInput("closed-form optimum needs alpha > 0");
  const double raw = mstar_continuous(p);
  const long rounded = std::lround(raw);
  return rounded < 1 ? 1 : static_cast<int>(rounded);
}

bool optimal_m_clamped(const CostParams& p) {
  p.validate();
  if (!(p.alpha > 0.0)) throw InvalidInput("closed-form optimum needs alpha > 0");
  return std::lround(mstar_continuous(p)) < 1;
}

double optimal_cost_ms(const CostParams& p) {
  p.validate();
  if (!(p.alpha > 0.0)) throw InvalidInput("closed-form optimum needs alpha > 0");
  const double root = std::sqrt(2.0 * (p.beta / p.alpha) * p.w * (p.expected_x - p.w));
  const double k_term =
      p.alpha * tau_ms(p) *
      (p.f * p.expected_x + std::sqrt(0.5 * (p.beta / p.alpha) * p.w * (p.expected_x - p.w)) +
       0.5 * p.w);
  const double omega_term =
      p.beta * tau_ms(p) * p.w *
      ((root > 0.0 ? (p.expected_x - p.w) / root : 0.0) + 0.5);
  return k_term + omega_term;
}

SweepBest brute_force_m(const CostParams& p, int m_max) {
  p.validate();
  require_m(m_max);
  SweepBest best{1, std::numeric_limits<double>::infinity()};
  for (int m = 1; m <= m_max; ++m) {
    const double c = p.alpha * expected_reprocessing_ms(p, m) + p.beta * expected_overhead_ms(p, m);
    if (c < best.c_best_ms) best = {m, c};
  }
  return best;
}

SweepBest brute_force_m_mc(const CostParams& p, int m_max, const traffic::XDistribution& x_dist,
                           int draws, std::uint64_t seed) {
  p.validate();
  require_m(m_max);
  if (draws < 1) throw InvalidInput("draws must be at least 1");

  // One shared set of draws across all m keeps the sweep comparison smooth.
  Rng rng(derive_seed(seed, kMcStream));
  std::vector<std::int64_t> xs(static_cast<std::size_t>(draws));
  for (auto& x : xs) x = std::max<std::int64_t>(p.w, x_dist.sample(rng));

  SweepBest best{1, std::numeric_limits<double>::infinity()};
  for (int m = 1; m <= m_max; ++m) {
    double acc = 0.0;
    for (std::int64_t x : xs) {
      const std::int64_t n = exact_windows(x, p.w, m);
      const std::int64_t delta = p.w + n * (m + p.w);
      const double k_ms = exact_reprocessing_ms(x, delta, p.f, p.w, p.tau);
      const double omega_ms = static_cast<double>(n) * p.w * tau_ms(p);
      acc += p.alpha * k_ms + p.beta * omega_ms;
    }
    const double c = acc / draws;
    if (c < best.c_best_ms) best = {m, c};
  }
  return best;
}

std::vector<std::pair<double, int>> mstar_curve(int w, double beta_over_alpha,
                                                std::span<const double> ex_values) {
  if (w < 1) throw InvalidInput("w must be at least 1");
  if (!(beta_over_alpha > 0.0)) throw InvalidInput("beta/alpha must be positive");

  std::vector<std::pair<double, int>> curve;
  curve.reserve(ex_values.size());
  for (double ex : ex_values) {
    CostParams p;
    p.alpha = 1.0;
    p.beta = beta_over_alpha;
    p.w = w;
    p.expected_x = ex;
    curve.emplace_back(ex, optimal_m(p));
  }
  return curve;
}

void write_sweep_csv(std::ostream& os, const CostParams& p, std::span<const int> m_values) {
  os << "m,e_n,e_omega_ms,e_k_ms,c_total_ms\n";
  for (int m : m_values) {
    CostReport r = total_cost(p, m);
    os << m << ',' << csvutil::fmt_real(r.e_n) << ',' << csvutil::fmt_ms(r.e_omega_ms) << ','
       << csvutil::fmt_ms(r.e_k_ms) << ',' << csvutil::fmt_ms(r.c_total_ms) << '\n';
  }
}

void write_curve_csv(std::ostream& os, int w, std::span<const double> ratios,
                     std::span<const double> ex_values) {
  os << "ex,beta_over_alpha,m_star\n";
  for (double ratio : ratios) {
    auto curve = mstar_curve(w, ratio, ex_values);
    for (auto [ex, m] : curve) {
      os << csvutil::fmt_real(ex) << ',' << csvutil::fmt_real(ratio) << ',' << m << '\n';
    }
  }
}

}  // namespace gwshield::costmodel

// gwshield: traffic shaping, flood mitigation and cost optimization toolkit.
//
// Subcommands:
//   shape     apply the pacing rule to a trace CSV
//   optimize  evaluate the cost model, the optimal skip length and sweeps
//   simulate  run a scenario end to end, emit queue series and summaries
//   sweep     cost versus skip length, analytic and simulated side by side
//
// Exit codes: 0 success, 2 configuration error, 3 input parse error,
// 4 verification failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gwshield/aam.hpp"
#include "gwshield/costmodel.hpp"
#include "gwshield/errors.hpp"
#include "gwshield/qdtp.hpp"
#include "gwshield/scenario_file.hpp"
#include "gwshield/sim.hpp"
#include "gwshield/traffic.hpp"

namespace {

using namespace gwshield;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitVerify = 4;

struct CommonOpts {
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  return out;
}

std::vector<int> parse_grid(const std::string& spec) {
  // "lo:hi:step" or a comma list "20,40,80".
  std::vector<int> grid;
  if (spec.find(':') != std::string::npos) {
    int lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0 || lo < 1 ||
        hi < lo)
      throw ConfigError("grid must be lo:hi:step with lo >= 1, got '" + spec + "'");
    for (int m = lo; m <= hi; m += step) grid.push_back(m);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) grid.push_back(std::stoi(item));
  }
  if (grid.empty()) throw ConfigError("empty m grid");
  for (int m : grid)
    if (m < 1) throw ConfigError("grid values must be at least 1");
  return grid;
}

std::vector<double> parse_double_list(const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

int cmd_shape(const std::string& in_path, const std::string& out_path, double d_ms) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("cannot open trace file '" + in_path + "'");
  Trace trace = traffic::read_trace_csv(in, in_path);

  qdtp::QdtpConfig cfg{static_cast<Nanos>(std::llround(d_ms * 1e6))};
  auto shaped = qdtp::shape_trace(trace, cfg);

  Nanos max_delay = 0;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < shaped.size(); ++i) {
    max_delay = std::max(max_delay, shaped[i].delay);
    if (i > 0 && shaped[i].departure - shaped[i - 1].departure < cfg.d_spacing) ++violations;
  }

  auto out = open_out(out_path);
  qdtp::write_shaped_csv(out, shaped);

  std::cout << "shaped " << shaped.size() << " packets with D = " << to_ms(cfg.d_spacing)
            << " ms\n"
            << "max delay: " << to_ms(max_delay) << " ms\n"
            << "spacing violations: " << violations << "\n";
  return violations == 0 ? kExitOk : kExitVerify;
}

int cmd_optimize(double alpha, double beta, double f, double ex, double tau_ms_v, int w,
                 int m_max, bool verify, bool use_mc, int mc_draws, std::uint64_t seed,
                 const std::string& sweep_out, const std::string& curve_ex,
                 const std::string& curve_ratios, const std::string& curve_out) {
  costmodel::CostParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.f = f;
  p.expected_x = ex;
  p.tau = static_cast<Nanos>(std::llround(tau_ms_v * 1e6));
  p.w = w;

  const int mstar = costmodel::optimal_m(p);
  if (costmodel::optimal_m_clamped(p))
    std::cerr << "warning: closed form gave m < 1, clamped to 1\n";
  const double cstar = costmodel::optimal_cost_ms(p);
  const costmodel::CostReport at_star = costmodel::total_cost(p, mstar);

  std::cout << "m* = " << mstar << "\n"
            << "C*(AAM) = " << cstar << " ms (closed form)\n"
            << "C(m*)   = " << at_star.c_total_ms << " ms (cost model at the rounded m*)\n"
            << "E[N] = " << at_star.e_n << ", E[Omega] = " << at_star.e_omega_ms
            << " ms, E[K] = " << at_star.e_k_ms << " ms, E[delta] = " << at_star.e_delta << "\n";

  if (!sweep_out.empty()) {
    std::vector<int> ms;
    const int lo = std::max(1, mstar / 4);
    const int hi = std::max(lo + 1, 3 * mstar);
    const int step = std::max(1, (hi - lo) / 120);
    for (int m = lo; m <= hi; m += step) ms.push_back(m);
    auto out = open_out(sweep_out);
    costmodel::write_sweep_csv(out, p, ms);
    std::cout << "sweep written to " << sweep_out << "\n";
  }

  if (!curve_out.empty()) {
    auto exs = parse_double_list(curve_ex);
    auto ratios = parse_double_list(curve_ratios);
    if (exs.empty() || ratios.empty())
      throw ConfigError("--curve-out needs --curve-ex and --curve-ratios");
    auto out = open_out(curve_out);
    costmodel::write_curve_csv(out, w, ratios, exs);
    std::cout << "m* curve written to " << curve_out << "\n";
  }

  if (verify) {
    const int limit = m_max > 0 ? m_max : std::max(1000, 4 * mstar + 100);
    costmodel::SweepBest best =
        use_mc ? costmodel::brute_force_m_mc(
                     p, limit, traffic::XDistribution::replication_default(ex), mc_draws, seed)
               : costmodel::brute_force_m(p, limit);
    std::cout << "brute force argmin: m = " << best.m_best << " (C = " << best.c_best_ms
              << " ms, m_max = " << limit << (use_mc ? ", exact-N Monte Carlo" : "") << ")\n";
    const int tolerance = use_mc ? std::max(2, mstar / 4) : 1;
    if (std::abs(best.m_best - mstar) > tolerance && !costmodel::optimal_m_clamped(p)) {
      std::cerr << "verification failed: |m* - argmin| = " << std::abs(best.m_best - mstar)
                << " exceeds " << tolerance << "\n";
      return kExitVerify;
    }
    std::cout << "verification passed\n";
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, int reps, const std::string& out_dir,
                 const CommonOpts& common, bool flush) {
  sim::Scenario s = scenario::load_file(scenario_path, common.overrides);
  if (common.seed) s.seed = *common.seed;
  if (flush) s.flush_residual = true;

  std::filesystem::create_directories(out_dir);
  sim::SimResult base = sim::run_scenario(s);

  {
    auto out = open_out(out_dir + "/timeseries.csv");
    sim::write_series_csv(out, base);
  }
  {
    auto out = open_out(out_dir + "/episodes.csv");
    aam::write_episode_csv(out, base.outcome);
  }

  std::cout << "packets: " << base.total_packets << " (flood total " << base.realized_x_total
            << ")\n"
            << "peak queues: shaper entrance " << base.peak_sqf_queue << ", detector entrance "
            << base.peak_ad_queue << "\n"
            << "detector entrance drained at " << to_seconds(base.ad_drained_at) << " s\n"
            << "forwarded " << base.outcome.forwarded_total << ", dropped "
            << base.outcome.dropped_total << " (benign " << base.outcome.dropped_benign << ")\n"
            << "episodes: " << base.outcome.episodes.size() << "\n";
  for (std::size_t i = 0; i < base.outcome.episodes.size(); ++i) {
    const aam::Episode& ep = base.outcome.episodes[i];
    std::cout << "  episode " << i + 1 << ": start_seq=" << ep.start_seq
              << " end_seq=" << ep.end_seq << " n=" << ep.n_windows << " delta="
              << ep.delta_dropped << " benign=" << ep.benign_dropped << " m=" << ep.m_used
              << (ep.complete ? "" : " (truncated)") << "\n";
  }
  std::cout << "realized cost: " << base.realized_cost_ms << " ms\n";

  if (reps > 1) {
    sim::ReplicationResult agg = sim::run_replications(s, reps);
    auto out = open_out(out_dir + "/replications.csv");
    sim::write_replication_csv(out, agg);
    std::cout << "mean cost over " << reps << " replications: " << agg.mean_cost_ms
              << " ms +/- " << agg.ci95_ms << " ms (95% CI)\n";
  }
  return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& grid_spec, int reps,
              const std::string& out_path, const CommonOpts& common) {
  sim::Scenario s = scenario::load_file(scenario_path, common.overrides);
  if (common.seed) s.seed = *common.seed;
  if (!s.mitigation) throw ConfigError("sweep needs a scenario with an [aam] section");

  const std::vector<int> grid = parse_grid(grid_spec);
  const costmodel::CostParams p = sim::scenario_cost_params(s);

  auto out = open_out(out_path);
  out << "m,c_analytic_ms,c_sim_mean_ms,c_sim_ci95_ms\n";

  int best_m = grid.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (int m : grid) {
    sim::Scenario run = s;
    run.mitigation->skip_m = m;
    run.adaptive_m = false;
    sim::ReplicationResult agg = sim::run_replications(run, reps);
    const double analytic = costmodel::total_cost(p, m).c_total_ms;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f\n", m, analytic, agg.mean_cost_ms,
                  agg.ci95_ms);
    out << buf;
    std::cout << "m = " << m << ": analytic " << analytic << " ms, simulated "
              << agg.mean_cost_ms << " ms\n";
    if (agg.mean_cost_ms < best_cost) {
      best_cost = agg.mean_cost_ms;
      best_m = m;
    }
  }

  std::cout << "simulated argmin: m = " << best_m << " (" << best_cost << " ms); closed form m* = "
            << costmodel::optimal_m(p) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gateway flood mitigation toolkit"};
  app.require_subcommand(1);

  CommonOpts common;

  // shape
  std::string shape_in, shape_out = "shaped.csv";
  double shape_d_ms = 3.0;
  CLI::App* shape = app.add_subcommand("shape", "pace a trace CSV");
  shape->add_option("--in", shape_in, "input trace CSV")->required();
  shape->add_option("--out", shape_out, "output shaped CSV");
  shape->add_option("--d-ms", shape_d_ms, "minimum departure spacing D in ms");

  // optimize
  double alpha = 1.0, beta = 1.0, f = 0.9, ex = 1000.0, tau_ms_v = 3.0;
  int w = 20, m_max = 0, mc_draws = 10000;
  bool verify = false, use_mc = false;
  std::uint64_t opt_seed = 1;
  std::string sweep_out, curve_ex, curve_ratios = "0.5,1,2", curve_out;
  CLI::App* optimize = app.add_subcommand("optimize", "evaluate the cost model");
  optimize->add_option("--alpha", alpha, "reprocessing weight");
  optimize->add_option("--beta", beta, "in-attack overhead weight");
  optimize->add_option("--f", f, "attack fraction in (0,1]");
  optimize->add_option("--ex", ex, "expected flood size E[X]")->required();
  optimize->add_option("--tau-ms", tau_ms_v, "inspection time per packet, ms");
  optimize->add_option("--w", w, "detection window size");
  optimize->add_option("--m-max", m_max, "brute force sweep bound (default: auto)");
  optimize->add_flag("--verify", verify, "check the closed form against a brute force sweep");
  optimize->add_flag("--mc", use_mc, "verify with exact-N Monte Carlo instead of the approximation");
  optimize->add_option("--mc-draws", mc_draws, "Monte Carlo draws for --mc");
  optimize->add_option("--seed", opt_seed, "Monte Carlo seed")->envname("GATEWAY_SHIELD_SEED");
  optimize->add_option("--sweep-out", sweep_out, "write an m sweep CSV here");
  optimize->add_option("--curve-ex", curve_ex, "comma list of E[X] values for the m* curve");
  optimize->add_option("--curve-ratios", curve_ratios, "comma list of beta/alpha ratios");
  optimize->add_option("--curve-out", curve_out, "write the m* curve CSV here");

  // simulate
  std::string sim_scenario, sim_out = "out";
  int sim_reps = 1;
  bool sim_flush = false;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario");
  simulate->add_option("--scenario", sim_scenario, "scenario file")->required();
  simulate->add_option("--reps", sim_reps, "replication count");
  simulate->add_option("--out", sim_out, "output directory");
  simulate->add_flag("--flush", sim_flush, "forward the trailing partial window untested");
  simulate->add_option("--seed", sim_seed, "override the scenario seed")
      ->envname("GATEWAY_SHIELD_SEED")
      ->trigger_on_parse()
      ->each([&](const std::string&) { sim_seed_set = true; });
  simulate->add_option("--set", common.overrides, "override scenario keys: section.key=value");

  // sweep
  std::string swp_scenario, swp_grid, swp_out = "sweep.csv";
  int swp_reps = 30;
  std::uint64_t swp_seed = 0;
  bool swp_seed_set = false;
  CLI::App* sweep = app.add_subcommand("sweep", "cost versus skip length");
  sweep->add_option("--scenario", swp_scenario, "scenario file")->required();
  sweep->add_option("--m-grid", swp_grid, "grid: lo:hi:step or comma list")->required();
  sweep->add_option("--reps", swp_reps, "replications per grid point");
  sweep->add_option("--out", swp_out, "output CSV");
  sweep->add_option("--seed", swp_seed, "override the scenario seed")
      ->envname("GATEWAY_SHIELD_SEED")
      ->trigger_on_parse()
      ->each([&](const std::string&) { swp_seed_set = true; });
  sweep->add_option("--set", common.overrides, "override scenario keys: section.key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*shape) return cmd_shape(shape_in, shape_out, shape_d_ms);
    if (*optimize)
      return cmd_optimize(alpha, beta, f, ex, tau_ms_v, w, m_max, verify, use_mc, mc_draws,
                          opt_seed, sweep_out, curve_ex, curve_ratios, curve_out);
    if (*simulate) {
      if (sim_seed_set) common.seed = sim_seed;
      return cmd_simulate(sim_scenario, sim_reps, sim_out, common, sim_flush);
    }
    if (*sweep) {
      if (swp_seed_set) common.seed = swp_seed;
      return cmd_sweep(swp_scenario, swp_grid, swp_reps, swp_out, common);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const OrderingError& e) {
    std::cerr << "input ordering error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

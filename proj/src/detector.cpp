#include "gwshield/detector.hpp"

#include "gwshield/errors.hpp"

namespace gwshield::detector {

void DetectorConfig::validate() const {
  if (tpr < 0.0 || tpr > 1.0) throw ConfigError("tpr must be in [0, 1]");
  if (tnr < 0.0 || tnr > 1.0) throw ConfigError("tnr must be in [0, 1]");
  if (tau_inspect <= 0) throw ConfigError("tau_inspect must be positive");
  if (window_w < 1) throw ConfigError("window_w must be at least 1");
}

Label classify_packet(const DetectorConfig& cfg, Label truth, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double draw = u(rng);
  if (truth == Label::Attack) return draw < cfg.tpr ? Label::Attack : Label::Benign;
  return draw < cfg.tnr ? Label::Benign : Label::Attack;
}

WindowVerdict window_verdict(const DetectorConfig& cfg, std::span<const Label> truths,
                             Rng& rng, std::uint64_t window_start_seq) {
  if (truths.size() != static_cast<std::size_t>(cfg.window_w))
    throw InvalidInput("window_verdict: got " + std::to_string(truths.size()) +
                       " truths, window is " + std::to_string(cfg.window_w));

  WindowVerdict v;
  v.window_start_seq = window_start_seq;
  v.inspection_cost = static_cast<Nanos>(cfg.window_w) * cfg.tau_inspect;
  for (Label truth : truths) {
    if (classify_packet(cfg, truth, rng) == Label::Attack) ++v.attack_votes;
  }
  // Strict majority; ties fail open so a borderline window is forwarded.
  v.verdict = v.attack_votes > cfg.window_w / 2 ? Verdict::Attack : Verdict::NoAttack;
  return v;
}

}  // namespace gwshield::detector

#include "gwshield/aam.hpp"

#include <ostream>
#include <string>

#include "gwshield/errors.hpp"
#include "gwshield/rng.hpp"

namespace gwshield::aam {

namespace {
constexpr std::uint64_t kDetectorStream = 0x11;
}

// Shared by run_mitigation and the timed engine so that one seed yields one
// verdict stream regardless of which driver runs the machine.
Rng detector_rng(std::uint64_t seed, const detector::DetectorConfig& det) {
  return Rng(derive_seed(seed, kDetectorStream, det.seed));
}

void AamConfig::validate() const {
  if (window_w < 1) throw ConfigError("window_w must be at least 1");
  if (skip_m < 1) throw ConfigError("skip_m must be at least 1");
}

AamMachine::AamMachine(const AamConfig& cfg, const detector::DetectorConfig& det)
    : cfg_(cfg), det_(det) {
  cfg_.validate();
  det_.validate();
  if (cfg_.window_w != det_.window_w)
    throw ConfigError("mitigation and detector window sizes must match");
  state_.pending_window.reserve(static_cast<std::size_t>(cfg_.window_w));
}

void AamMachine::set_episode_skip_provider(EpisodeSkipProvider provider) {
  skip_provider_ = std::move(provider);
}

void AamMachine::drop_packet(std::vector<Action>& actions, const PacketRecord& p,
                             bool inspected) {
  ++outcome_.dropped_total;
  if (p.label == Label::Benign) ++outcome_.dropped_benign;
  if (open_episode_) {
    ++open_episode_->delta_dropped;
    if (p.label == Label::Benign) ++open_episode_->benign_dropped;
  }
  actions.push_back({ActionKind::Drop, p, inspected, {}});
}

void AamMachine::close_episode(std::uint64_t end_seq, bool complete) {
  open_episode_->end_seq = end_seq;
  open_episode_->complete = complete;
  open_episode_->omega_ns = static_cast<Nanos>(open_episode_->windows_mitigating) *
                            cfg_.window_w * det_.tau_inspect;
  outcome_.episodes.push_back(*open_episode_);
  open_episode_.reset();
}

void AamMachine::test_window(std::vector<Action>& actions, Rng& rng) {
  std::vector<Label> truths;
  truths.reserve(state_.pending_window.size());
  for (const PacketRecord& p : state_.pending_window) truths.push_back(p.label);

  detector::WindowVerdict verdict =
      detector::window_verdict(det_, truths, rng, state_.pending_window.front().seq);

  ++outcome_.windows_tested_total;
  outcome_.inspected_packets += static_cast<std::uint64_t>(cfg_.window_w);
  outcome_.inspection_time_total += verdict.inspection_cost;
  const bool was_mitigating = state_.mode == Mode::Mitigating;
  if (was_mitigating) {
    ++outcome_.windows_tested_mitigating;
    outcome_.inspection_time_omega += verdict.inspection_cost;
    if (open_episode_) ++open_episode_->windows_mitigating;
  }

  actions.push_back({ActionKind::WindowTested, {}, true, verdict});

  if (verdict.verdict == detector::Verdict::Attack) {
    if (!was_mitigating) {
      // First alarming window: the episode starts here and owns its packets.
      Episode ep;
      ep.start_seq = state_.pending_window.front().seq;
      ep.consumed = state_.pending_window.size();
      episode_m_ = skip_provider_ ? skip_provider_(state_.pending_window.back()) : cfg_.skip_m;
      if (episode_m_ < 1) episode_m_ = 1;
      ep.m_used = episode_m_;
      open_episode_ = ep;
    }
    ++outcome_.mitigation_windows_n;
    if (open_episode_) ++open_episode_->n_windows;

    for (const PacketRecord& p : state_.pending_window) drop_packet(actions, p, true);
    state_.mode = Mode::Mitigating;
    state_.skip_remaining = episode_m_;
  } else {
    for (const PacketRecord& p : state_.pending_window) {
      ++outcome_.forwarded_total;
      actions.push_back({ActionKind::Forward, p, true, {}});
    }
    if (was_mitigating) {
      close_episode(state_.pending_window.back().seq, true);
      state_.mode = Mode::Normal;
      state_.skip_remaining = 0;
    }
  }
  state_.pending_window.clear();
}

std::vector<Action> AamMachine::step(const PacketRecord& packet, Rng& rng) {
  if (finished_) throw OrderingError("step after finish");
  if (state_.last_seq && packet.seq <= *state_.last_seq)
    throw OrderingError("packets must arrive in increasing seq order");
  state_.last_seq = packet.seq;
  ++outcome_.consumed_total;
  if (open_episode_) ++open_episode_->consumed;

  std::vector<Action> actions;
  if (state_.mode == Mode::Mitigating && state_.skip_remaining > 0) {
    --state_.skip_remaining;
    drop_packet(actions, packet, false);
    return actions;
  }

  state_.pending_window.push_back(packet);
  if (state_.pending_window.size() == static_cast<std::size_t>(cfg_.window_w))
    test_window(actions, rng);
  return actions;
}

std::vector<Action> AamMachine::finish(bool flush_residual) {
  if (finished_) return {};
  finished_ = true;

  std::vector<Action> actions;
  if (flush_residual) {
    for (const PacketRecord& p : state_.pending_window) {
      ++outcome_.forwarded_total;
      actions.push_back({ActionKind::Forward, p, false, {}});
    }
    state_.pending_window.clear();
  }
  outcome_.residual_buffered = state_.pending_window.size();

  if (open_episode_) close_episode(state_.last_seq.value_or(0), false);
  return actions;
}

MitigationOutcome run_mitigation(const Trace& trace, const AamConfig& cfg,
                                 const detector::DetectorConfig& det, std::uint64_t seed,
                                 bool flush_residual) {
  AamMachine machine(cfg, det);
  Rng rng = detector_rng(seed, det);
  for (const PacketRecord& p : trace) machine.step(p, rng);
  machine.finish(flush_residual);
  return machine.outcome();
}

void write_episode_csv(std::ostream& os, const MitigationOutcome& outcome) {
  os << "episode,start_seq,end_seq,n_windows,delta_dropped,benign_dropped,omega_ns\n";
  std::size_t idx = 0;
  for (const Episode& ep : outcome.episodes) {
    os << ++idx << ',' << ep.start_seq << ',' << ep.end_seq << ',' << ep.n_windows << ','
       << ep.delta_dropped << ',' << ep.benign_dropped << ',' << ep.omega_ns << '\n';
  }
}

}  // namespace gwshield::aam

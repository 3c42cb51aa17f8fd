#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "gwshield/detector.hpp"
#include "gwshield/trace.hpp"

namespace gwshield::aam {

struct AamConfig {
  int window_w = 20;  // must match the detector's window
  int skip_m = 1;     // packets dropped unseen after each attack verdict, m > 0

  void validate() const;
};

enum class Mode : std::uint8_t { Normal, Mitigating };

struct AamState {
  Mode mode = Mode::Normal;
  std::vector<PacketRecord> pending_window;  // at most W packets
  int skip_remaining = 0;                    // > 0 only while Mitigating
  std::optional<std::uint64_t> last_seq;
};

enum class ActionKind : std::uint8_t { Forward, Drop, WindowTested };

struct Action {
  ActionKind kind = ActionKind::Forward;
  PacketRecord packet{};                // Forward / Drop
  bool inspected = false;               // Drop: tested-window packet vs skipped unseen
  detector::WindowVerdict verdict{};    // WindowTested
};

// One detected attack, from the window that raised the alarm to the window
// that cleared it.
struct Episode {
  std::uint64_t start_seq = 0;
  std::uint64_t end_seq = 0;
  std::uint64_t n_windows = 0;           // windows that returned ATTACK, including the opening one
  std::uint64_t windows_mitigating = 0;  // windows tested while in Mitigating mode
  std::uint64_t delta_dropped = 0;
  std::uint64_t benign_dropped = 0;
  std::uint64_t consumed = 0;
  Nanos omega_ns = 0;  // windows_mitigating * W * tau
  int m_used = 0;
  bool complete = false;  // a NO-ATTACK window ended it before the stream ran out
};

struct MitigationOutcome {
  std::uint64_t consumed_total = 0;
  std::uint64_t forwarded_total = 0;
  std::uint64_t dropped_total = 0;   // realized delta
  std::uint64_t dropped_benign = 0;
  std::uint64_t windows_tested_total = 0;       // Normal + Mitigating
  std::uint64_t windows_tested_mitigating = 0;
  std::uint64_t mitigation_windows_n = 0;       // realized N over all episodes
  std::uint64_t inspected_packets = 0;
  Nanos inspection_time_total = 0;   // inspected_packets * tau, exact
  Nanos inspection_time_omega = 0;   // windows_tested_mitigating * W * tau
  std::uint64_t residual_buffered = 0;
  std::vector<Episode> episodes;
};

// Window-test / drop / skip state machine.
//
// Normal mode: packets are buffered into W-packet windows that tile the
// stream; every window is tested. A NO-ATTACK verdict forwards the window; an
// ATTACK verdict drops it, opens an episode and switches to Mitigating with
// skip_remaining = m. Mitigating mode: the next m packets are dropped unseen,
// then the next W are buffered and tested. ATTACK drops them and resets the
// skip; NO-ATTACK forwards them and closes the episode.
class AamMachine {
 public:
  // Chooses m when an episode opens, given the packet that completed the
  // alarming window. Unset means the configured skip_m is always used.
  using EpisodeSkipProvider = std::function<int(const PacketRecord&)>;

  AamMachine(const AamConfig& cfg, const detector::DetectorConfig& det);

  void set_episode_skip_provider(EpisodeSkipProvider provider);

  // Packets must be supplied in strictly increasing seq order.
  std::vector<Action> step(const PacketRecord& packet, Rng& rng);

  // Finalizes counters. With flush_residual the trailing partial window is
  // forwarded untested; otherwise it is reported as buffered.
  std::vector<Action> finish(bool flush_residual);

  const AamState& state() const { return state_; }
  const MitigationOutcome& outcome() const { return outcome_; }

 private:
  void test_window(std::vector<Action>& actions, Rng& rng);
  void drop_packet(std::vector<Action>& actions, const PacketRecord& p, bool inspected);
  void close_episode(std::uint64_t end_seq, bool complete);

  AamConfig cfg_;
  detector::DetectorConfig det_;
  AamState state_;
  MitigationOutcome outcome_;
  EpisodeSkipProvider skip_provider_;
  std::optional<Episode> open_episode_;
  int episode_m_ = 0;
  bool finished_ = false;
};

// Detector RNG for a run seed. One seed yields one verdict stream no matter
// which driver feeds the machine.
Rng detector_rng(std::uint64_t seed, const detector::DetectorConfig& det);

// Drives an AamMachine over a whole trace with a detector RNG seeded from
// `seed` and the detector's own stream salt.
MitigationOutcome run_mitigation(const Trace& trace, const AamConfig& cfg,
                                 const detector::DetectorConfig& det, std::uint64_t seed,
                                 bool flush_residual = false);

void write_episode_csv(std::ostream& os, const MitigationOutcome& outcome);

}  // namespace gwshield::aam

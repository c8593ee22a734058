#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "psr/baselines.hpp"
#include "psr/events.hpp"
#include "psr/procedure.hpp"

namespace psr {

/// Detection-stream noise and timing parameters. The defaults describe a
/// noiseless detector: every frame carries the true state at confidence 1.
struct SimConfig {
  std::uint64_t seed = 0;
  double fps = 10.0;
  double dwell_mean_s = 5.0;    // time spent in each state
  double dwell_jitter_s = 1.0;  // uniform +/- jitter on the dwell time
  double detect_prob = 1.0;
  double conf_mean = 1.0;
  double conf_spread = 0.0;  // confidence ~ U(mean - spread, mean + spread), clipped to [0, 1]
  double misclass_prob = 0.0;
  double error_fp_rate = 0.0;  // error states detected as their nearest correct state

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

std::vector<Diagnostic> validate_sim_config(const SimConfig& cfg);

struct ErrorInjection {
  std::vector<std::string> omit;
  std::vector<std::string> incorrect;  // completed with status -1
  std::vector<std::pair<std::string, std::string>> swaps;  // exchange positions in the order

  bool empty() const { return omit.empty() && incorrect.empty() && swaps.empty(); }

  friend bool operator==(const ErrorInjection&, const ErrorInjection&) = default;
};

std::vector<Diagnostic> validate_injection(const ErrorInjection& inj, const ProcedureSpec& spec);

struct TimelineSegment {
  std::int64_t frame = 0;  // first frame of the segment
  AssemblyState state;

  friend bool operator==(const TimelineSegment&, const TimelineSegment&) = default;
};

/// Contiguous state segments covering frames [0, end_frame).
struct Timeline {
  std::vector<TimelineSegment> segments;
  std::int64_t end_frame = 0;

  const AssemblyState& state_at(std::int64_t frame) const;

  friend bool operator==(const Timeline&, const Timeline&) = default;
};

struct Execution {
  StepSequence ground_truth;  // errors included; see correct_only()
  Timeline timeline;
};

/// Samples an execution order uniformly among the prerequisite-respecting
/// orders of the non-omitted actions, applies the injected errors and
/// assigns dwell times.
Execution sample_execution(const ProcedureSpec& spec, const ErrorInjection& inj, std::uint64_t seed,
                           const SimConfig& cfg = {}, std::string recording_id = "sim");

/// One frame per timeline frame with per-frame independent detector noise.
std::vector<DetectionFrame> render_stream(const Timeline& timeline, const SimConfig& cfg, std::uint64_t seed);

struct Scenario {
  std::string recording_id;
  StepSequence ground_truth;
  Timeline timeline;
  std::vector<DetectionFrame> stream;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// sample_execution followed by render_stream, both driven by cfg.seed.
Scenario simulate(const ProcedureSpec& spec, const ErrorInjection& inj, const SimConfig& cfg,
                  std::string recording_id = "sim");

/// Random valid procedure: `components` components, one INSTALL action per
/// component, each depending on a random subset of earlier actions.
ProcedureSpec random_procedure(std::uint64_t seed, std::size_t components, double edge_prob = 0.3);

}  // namespace psr

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "psr/events.hpp"
#include "psr/procedure.hpp"
#include "psr/state.hpp"

namespace psr {

/// Axis-aligned box in normalized image coordinates.
struct Box {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  friend bool operator==(const Box&, const Box&) = default;
};

/// One assembly-state detection within a frame.
struct Detection {
  AssemblyState state;
  double confidence = 0.0;  // in [0, 1]
  std::optional<Box> box;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectionFrame {
  std::int64_t frame = 0;
  double time_s = 0.0;  // frame / fps
  std::vector<Detection> detections;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

/// Highest-confidence detection, first one on ties; nullptr for an empty frame.
const Detection* select_top_detection(const DetectionFrame& frame);

enum class Variant { B1, B2, B3 };

std::string_view to_string(Variant v);
std::optional<Variant> variant_from_string(std::string_view text);

struct BaselineConfig {
  Variant variant = Variant::B3;
  double detection_threshold = 0.5;     // B1
  double accumulation_threshold = 8.0;  // B2, B3
  double decay = 0.75;                  // B2, B3

  static BaselineConfig defaults(Variant v) { return BaselineConfig{v}; }
};

/// Streaming procedure-step recognizer. Frames are fed one at a time in
/// increasing frame order; memory stays bounded by the component count plus
/// the number of emitted steps.
///
/// B1 emits every change of the top detection above the detection threshold.
/// B2 accumulates per-component confidence for conflicting detections and
/// emits once the accumulated value reaches the threshold; agreeing
/// detections decay the accumulator. B3 behaves like B2 but only emits when
/// the resulting state is one of the procedure's expected states.
class Recognizer {
 public:
  Recognizer(BaselineConfig config, ProcedureSpec spec);

  /// Processes one frame and returns the steps it completes.
  std::vector<StepEvent> step(const DetectionFrame& frame);

  /// Takes the top detection of `frame` as the current state without
  /// emitting anything (B1/B2). No-op for empty frames and for B3.
  void initialize_from(const DetectionFrame& frame);

  bool initialized() const { return initialized_; }
  const AssemblyState& current() const { return current_; }
  std::span<const double> accumulated() const { return confs_; }
  std::span<const ComponentStatus> pending() const { return pending_; }
  const BaselineConfig& config() const { return config_; }
  const ProcedureSpec& spec() const { return spec_; }
  std::size_t emitted_count() const { return emitted_.size(); }

 private:
  StepEvent make_event(std::size_t component, Transition t, const DetectionFrame& frame, double confidence) const;
  bool admissible(const AssemblyState& candidate) const;
  void step_b1(const Detection& top, const DetectionFrame& frame, std::vector<StepEvent>& out);
  void step_accumulate(const Detection& top, const DetectionFrame& frame, std::vector<StepEvent>& out);
  bool emit(StepEvent e, std::vector<StepEvent>& out);

  BaselineConfig config_;
  ProcedureSpec spec_;
  std::shared_ptr<const StateSet> expected_;  // B3 only
  std::vector<std::array<std::string, 3>> ids_;  // action id per (component, transition)

  bool initialized_ = false;
  std::optional<std::int64_t> last_frame_;
  AssemblyState current_;
  std::vector<double> confs_;
  std::vector<ComponentStatus> pending_;
  std::unordered_set<std::string> emitted_;
};

/// Recognizer ready for streaming; B1/B2 take their current state from
/// `first_frame` when it carries a detection, B3 starts at the spec's
/// initial state.
Recognizer init_recognizer(const BaselineConfig& config, const ProcedureSpec& spec,
                           const DetectionFrame* first_frame = nullptr);

/// Runs a recognizer over a whole stream.
StepSequence run_baseline(const BaselineConfig& config, const ProcedureSpec& spec,
                          std::span<const DetectionFrame> stream, double fps, std::string recording_id = {});

}  // namespace psr

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psr/procedure.hpp"
#include "psr/state.hpp"

namespace psr {

enum class EventSource : std::uint8_t { Recognized, Inferred, GroundTruth };

std::string_view to_string(EventSource s);
std::optional<EventSource> event_source_from_string(std::string_view text);

/// Completion of one procedure step, either observed (ground truth) or
/// predicted by a recognizer.
struct StepEvent {
  std::string action_id;
  std::size_t component = 0;
  Transition transition = Transition::Install;
  double time_s = 0.0;
  std::int64_t frame = 0;
  double confidence = 1.0;  // accumulated confidences may exceed 1
  EventSource source = EventSource::GroundTruth;

  friend bool operator==(const StepEvent&, const StepEvent&) = default;
};

/// Ordered step completions of one recording, sorted by (time_s, component),
/// at most one event per action id.
struct StepSequence {
  std::string recording_id;
  double fps = 10.0;
  std::vector<StepEvent> events;
  /// State the recording starts from; the procedure's initial state if unset.
  std::optional<AssemblyState> initial_state;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }

  friend bool operator==(const StepSequence&, const StepSequence&) = default;
};

/// Throws psr::Error when events are out of order or an action id repeats.
void check_sequence(const StepSequence& seq);

/// Action ids in event order.
std::vector<std::string> execution_order(const StepSequence& seq);

/// Keeps the correctly completed procedure steps only: events whose
/// (component, transition) pair is an action of `spec`.
StepSequence correct_only(const StepSequence& seq, const ProcedureSpec& spec);

StepSequence filter_by_source(const StepSequence& seq, EventSource source);

/// True when the (errors-included) ground truth shows an incorrect
/// completion, an omitted action, or a prerequisite-order violation.
bool has_procedure_errors(const StepSequence& ground_truth, const ProcedureSpec& spec);

/// True when the sequence contains an INCORRECT transition.
bool has_execution_errors(const StepSequence& seq);

}  // namespace psr

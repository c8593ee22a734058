#include "psr/events.hpp"

#include <algorithm>
#include <unordered_set>

namespace psr {

std::string_view to_string(EventSource s) {
  switch (s) {
    case EventSource::Recognized: return "recognized";
    case EventSource::Inferred: return "inferred";
    case EventSource::GroundTruth: return "ground_truth";
  }
  return "?";
}

std::optional<EventSource> event_source_from_string(std::string_view text) {
  if (text == "recognized") return EventSource::Recognized;
  if (text == "inferred") return EventSource::Inferred;
  if (text == "ground_truth") return EventSource::GroundTruth;
  return std::nullopt;
}

void check_sequence(const StepSequence& seq) {
  if (!(seq.fps > 0.0)) throw Error("sequence '" + seq.recording_id + "' has non-positive fps");
  std::unordered_set<std::string_view> ids;
  for (std::size_t i = 0; i < seq.events.size(); ++i) {
    const auto& e = seq.events[i];
    if (i > 0 && e.time_s < seq.events[i - 1].time_s) {
      throw Error("sequence '" + seq.recording_id + "': event " + std::to_string(i) + " ('" + e.action_id +
                  "') is earlier than its predecessor");
    }
    if (!ids.insert(e.action_id).second) {
      throw Error("sequence '" + seq.recording_id + "': duplicate action '" + e.action_id + "'");
    }
  }
}

std::vector<std::string> execution_order(const StepSequence& seq) {
  std::vector<std::string> out;
  out.reserve(seq.events.size());
  for (const auto& e : seq.events) out.push_back(e.action_id);
  return out;
}

StepSequence correct_only(const StepSequence& seq, const ProcedureSpec& spec) {
  StepSequence out = seq;
  std::erase_if(out.events, [&](const StepEvent& e) { return !spec.find_action(e.component, e.transition); });
  return out;
}

StepSequence filter_by_source(const StepSequence& seq, EventSource source) {
  StepSequence out = seq;
  std::erase_if(out.events, [&](const StepEvent& e) { return e.source != source; });
  return out;
}

bool has_execution_errors(const StepSequence& seq) {
  return std::ranges::any_of(seq.events, [](const StepEvent& e) { return e.transition == Transition::Incorrect; });
}

bool has_procedure_errors(const StepSequence& ground_truth, const ProcedureSpec& spec) {
  if (has_execution_errors(ground_truth)) return true;

  std::unordered_set<std::string> completed;
  for (const auto& e : ground_truth.events) {
    const auto* action = spec.find_action(e.component, e.transition);
    if (!action) continue;
    for (const auto& p : action->prerequisites) {
      if (!completed.contains(p)) return true;  // order violation
    }
    completed.insert(action->id);
  }
  return std::ranges::any_of(spec.actions, [&](const ProceduralAction& a) { return !completed.contains(a.id); });
}

}  // namespace psr

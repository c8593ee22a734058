#pragma once

// Shared builders for the unit and acceptance tests.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "psr/events.hpp"
#include "psr/procedure.hpp"

namespace psr::testing {

/// `n` components a0..a{n-1}, one install each, no prerequisites.
inline ProcedureSpec flat_spec(std::size_t n, std::string id = "flat") {
  ProcedureSpec spec;
  spec.id = std::move(id);
  for (std::size_t i = 0; i < n; ++i) {
    spec.components.push_back({i, "part " + std::to_string(i)});
    spec.actions.push_back({"a" + std::to_string(i), i, Transition::Install, {}, ""});
  }
  spec.initial_state = AssemblyState(n);
  return spec;
}

/// Sequence of installs "a<k>" at the given times; component = k.
inline StepSequence installs(std::vector<std::pair<int, double>> steps, std::string id = "rec", double fps = 10.0,
                             EventSource source = EventSource::GroundTruth) {
  StepSequence seq;
  seq.recording_id = std::move(id);
  seq.fps = fps;
  for (const auto& [k, t] : steps) {
    StepEvent e;
    e.action_id = "a" + std::to_string(k);
    e.component = static_cast<std::size_t>(k);
    e.transition = Transition::Install;
    e.time_s = t;
    e.frame = std::llround(t * fps);
    e.source = source;
    seq.events.push_back(std::move(e));
  }
  return seq;
}

/// Ground truth and the five predictions of the metric demonstration table.
struct MetricTable {
  StepSequence truth = installs({{0, 5}, {1, 10}, {2, 15}, {3, 20}});
  std::vector<StepSequence> predictions{
      installs({{0, 5}, {1, 10}, {2, 15}, {3, 20}}, "rec", 10, EventSource::Recognized),
      installs({{0, 5}, {1, 10}, {3, 20}, {2, 25}}, "rec", 10, EventSource::Recognized),
      installs({{0, 5}, {1, 10}, {3, 20}}, "rec", 10, EventSource::Recognized),
      installs({{3, 20}, {2, 25}, {1, 30}, {0, 35}}, "rec", 10, EventSource::Recognized),
      installs({{0, 5}, {1, 5}, {2, 10}, {3, 15}}, "rec", 10, EventSource::Recognized),
  };
};

}  // namespace psr::testing

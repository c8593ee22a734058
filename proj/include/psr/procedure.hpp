#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "psr/state.hpp"

namespace psr {

struct Component {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const Component&, const Component&) = default;
};

/// One action of the procedure: a single component transition, gated by
/// the actions listed in `prerequisites`.
struct ProceduralAction {
  std::string id;
  std::size_t component = 0;
  Transition transition = Transition::Install;
  std::vector<std::string> prerequisites;
  std::string description;

  friend bool operator==(const ProceduralAction&, const ProceduralAction&) = default;
};

struct ProcedureSpec {
  std::string id;
  std::vector<Component> components;
  std::vector<ProceduralAction> actions;
  AssemblyState initial_state;

  std::size_t component_count() const { return components.size(); }

  const ProceduralAction* find_action(std::string_view action_id) const;
  const ProceduralAction* find_action(std::size_t component, Transition transition) const;

  friend bool operator==(const ProcedureSpec&, const ProcedureSpec&) = default;
};

struct Diagnostic {
  std::string code;     // short machine-readable tag, e.g. "cycle"
  std::string message;  // names the offending element
};

/// Empty iff every ProcedureSpec invariant holds.
std::vector<Diagnostic> validate_procedure(const ProcedureSpec& spec);

/// Throws psr::Error carrying the first diagnostic if the spec is invalid.
void require_valid(const ProcedureSpec& spec);

using StateSet = std::unordered_set<AssemblyState>;

/// All states reachable from the initial state by applying actions in any
/// prerequisite-respecting order, initial and final state included.
StateSet expected_states(const ProcedureSpec& spec);

/// State after every action has been applied in a topological order.
AssemblyState final_state(const ProcedureSpec& spec);

/// Action ids in one prerequisite-respecting order (ties by declaration order).
std::vector<std::string> topological_order(const ProcedureSpec& spec);

/// Identifier of the step that a (component, transition) pair completes.
/// Pairs without a matching action get a synthetic id: "<install id>:incorrect"
/// for a faulty install of a component the spec installs, otherwise
/// "c<index>:<transition>".
std::string action_id_for(const ProcedureSpec& spec, std::size_t component, Transition transition);

AssemblyState parse_state(std::string_view text, const ProcedureSpec& spec);

}  // namespace psr

#include "psr/procedure.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <unordered_map>

namespace psr {

const ProceduralAction* ProcedureSpec::find_action(std::string_view action_id) const {
  auto it = std::ranges::find(actions, action_id, &ProceduralAction::id);
  return it == actions.end() ? nullptr : &*it;
}

const ProceduralAction* ProcedureSpec::find_action(std::size_t component, Transition transition) const {
  auto it = std::ranges::find_if(
      actions, [&](const ProceduralAction& a) { return a.component == component && a.transition == transition; });
  return it == actions.end() ? nullptr : &*it;
}

namespace {

// Indices of prerequisites per action; unknown ids are skipped (reported by validation).
std::vector<std::vector<std::size_t>> prerequisite_indices(const ProcedureSpec& spec) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < spec.actions.size(); ++i) index.emplace(spec.actions[i].id, i);
  std::vector<std::vector<std::size_t>> out(spec.actions.size());
  for (std::size_t i = 0; i < spec.actions.size(); ++i) {
    for (const auto& p : spec.actions[i].prerequisites) {
      if (auto it = index.find(p); it != index.end()) out[i].push_back(it->second);
    }
  }
  return out;
}

// Kahn's algorithm; actions left over are on (or behind) a cycle.
std::vector<std::size_t> kahn_order(const std::vector<std::vector<std::size_t>>& prereqs,
                                    std::vector<std::size_t>* blocked) {
  const std::size_t n = prereqs.size();
  std::vector<std::size_t> pending(n);
  std::vector<std::vector<std::size_t>> dependants(n);
  for (std::size_t i = 0; i < n; ++i) {
    pending[i] = prereqs[i].size();
    for (auto p : prereqs[i]) dependants[p].push_back(i);
  }
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  // Repeatedly take the lowest-indexed ready action for a stable order.
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && pending[i] == 0) {
        pick = i;
        break;
      }
    }
    if (pick == n) break;
    done[pick] = true;
    order.push_back(pick);
    for (auto d : dependants[pick]) --pending[d];
  }
  if (blocked) {
    blocked->clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i]) blocked->push_back(i);
    }
  }
  return order;
}

}  // namespace

std::vector<Diagnostic> validate_procedure(const ProcedureSpec& spec) {
  std::vector<Diagnostic> out;
  const std::size_t n = spec.component_count();

  if (spec.id.empty()) out.push_back({"missing-id", "procedure has no id"});
  if (n == 0) out.push_back({"no-components", "procedure defines no components"});
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    if (spec.components[i].index != i) {
      out.push_back({"component-index", "component '" + spec.components[i].name + "' has index " +
                                            std::to_string(spec.components[i].index) + ", expected " +
                                            std::to_string(i)});
    }
  }
  if (spec.initial_state.size() != n) {
    out.push_back({"initial-state-length", "initial state has " + std::to_string(spec.initial_state.size()) +
                                               " components, expected " + std::to_string(n)});
  }

  std::map<std::string, std::size_t> seen_ids;
  std::map<std::pair<std::size_t, Transition>, std::string> seen_pairs;
  for (const auto& a : spec.actions) {
    if (a.id.empty()) out.push_back({"missing-action-id", "action without id"});
    if (!seen_ids.emplace(a.id, 0).second) out.push_back({"duplicate-action-id", "action id '" + a.id + "' repeated"});
    if (a.component >= n) {
      out.push_back({"component-range", "action '" + a.id + "' references component " + std::to_string(a.component) +
                                            " of a " + std::to_string(n) + "-component procedure"});
    }
    if (a.transition == Transition::Incorrect) {
      out.push_back({"action-transition", "action '" + a.id + "' must be install or remove"});
    }
    auto [it, inserted] = seen_pairs.emplace(std::pair{a.component, a.transition}, a.id);
    if (!inserted) {
      out.push_back({"duplicate-transition", "actions '" + it->second + "' and '" + a.id + "' both " +
                                                 std::string(to_string(a.transition)) + " component " +
                                                 std::to_string(a.component)});
    }
  }
  for (const auto& a : spec.actions) {
    for (const auto& p : a.prerequisites) {
      if (p == a.id) {
        out.push_back({"cycle", "action '" + a.id + "' requires itself"});
      } else if (!spec.find_action(p)) {
        out.push_back({"unknown-prerequisite", "action '" + a.id + "' requires unknown action '" + p + "'"});
      }
    }
  }

  std::vector<std::size_t> blocked;
  kahn_order(prerequisite_indices(spec), &blocked);
  if (!blocked.empty()) {
    std::string names;
    for (auto i : blocked) names += (names.empty() ? "" : ", ") + spec.actions[i].id;
    // self-loops were already reported above
    bool only_self = std::ranges::all_of(blocked, [&](std::size_t i) {
      return std::ranges::find(spec.actions[i].prerequisites, spec.actions[i].id) !=
             spec.actions[i].prerequisites.end();
    });
    if (!only_self) out.push_back({"cycle", "prerequisite cycle among actions: " + names});
  }
  return out;
}

void require_valid(const ProcedureSpec& spec) {
  auto diags = validate_procedure(spec);
  if (!diags.empty()) {
    throw Error("invalid procedure '" + spec.id + "': " + diags.front().message +
                (diags.size() > 1 ? " (+" + std::to_string(diags.size() - 1) + " more)" : ""));
  }
}

std::vector<std::string> topological_order(const ProcedureSpec& spec) {
  require_valid(spec);
  std::vector<std::string> out;
  for (auto i : kahn_order(prerequisite_indices(spec), nullptr)) out.push_back(spec.actions[i].id);
  return out;
}

StateSet expected_states(const ProcedureSpec& spec) {
  require_valid(spec);
  const std::size_t n = spec.actions.size();
  if (n > 64) throw Error("expected_states supports at most 64 actions");

  const auto prereqs = prerequisite_indices(spec);
  std::vector<std::uint64_t> need(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto p : prereqs[i]) need[i] |= std::uint64_t{1} << p;
  }

  // Breadth-first over downsets of the prerequisite order. Unordered actions
  // touching the same component make one downset map to several states, so
  // states are tracked per downset.
  StateSet states;
  std::unordered_map<std::uint64_t, std::vector<AssemblyState>> visited;
  std::deque<std::pair<std::uint64_t, AssemblyState>> queue;
  queue.emplace_back(0, spec.initial_state);
  visited[0].push_back(spec.initial_state);
  states.insert(spec.initial_state);

  while (!queue.empty()) {
    auto [done, state] = std::move(queue.front());
    queue.pop_front();
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if ((done & bit) || (need[i] & ~done)) continue;
      AssemblyState next = state;
      next.set(spec.actions[i].component, target_status(spec.actions[i].transition));
      auto& seen = visited[done | bit];
      if (std::ranges::find(seen, next) != seen.end()) continue;
      seen.push_back(next);
      states.insert(next);
      queue.emplace_back(done | bit, std::move(next));
    }
  }
  return states;
}

AssemblyState final_state(const ProcedureSpec& spec) {
  AssemblyState s = spec.initial_state;
  for (const auto& id : topological_order(spec)) {
    const auto* a = spec.find_action(id);
    s.set(a->component, target_status(a->transition));
  }
  return s;
}

std::string action_id_for(const ProcedureSpec& spec, std::size_t component, Transition transition) {
  if (const auto* a = spec.find_action(component, transition)) return a->id;
  if (transition == Transition::Incorrect) {
    if (const auto* a = spec.find_action(component, Transition::Install)) return a->id + ":incorrect";
  }
  return "c" + std::to_string(component) + ":" + std::string(to_string(transition));
}

AssemblyState parse_state(std::string_view text, const ProcedureSpec& spec) {
  return parse_state(text, spec.component_count());
}

}  // namespace psr

#include "psr/state.hpp"

#include <algorithm>

namespace psr {

std::optional<ComponentStatus> status_from_int(int value) {
  switch (value) {
    case -1: return ComponentStatus::Incorrect;
    case 0: return ComponentStatus::Absent;
    case 1: return ComponentStatus::Installed;
    default: return std::nullopt;
  }
}

std::string_view to_string(Transition t) {
  switch (t) {
    case Transition::Install: return "install";
    case Transition::Remove: return "remove";
    case Transition::Incorrect: return "incorrect";
  }
  return "?";
}

std::optional<Transition> transition_from_string(std::string_view text) {
  if (text == "install") return Transition::Install;
  if (text == "remove") return Transition::Remove;
  if (text == "incorrect") return Transition::Incorrect;
  return std::nullopt;
}

ComponentStatus target_status(Transition t) {
  switch (t) {
    case Transition::Install: return ComponentStatus::Installed;
    case Transition::Remove: return ComponentStatus::Absent;
    case Transition::Incorrect: return ComponentStatus::Incorrect;
  }
  return ComponentStatus::Absent;
}

AssemblyState::AssemblyState(std::initializer_list<int> values) {
  statuses_.reserve(values.size());
  for (int v : values) {
    auto s = status_from_int(v);
    if (!s) throw Error("component status must be -1, 0 or 1, got " + std::to_string(v));
    statuses_.push_back(*s);
  }
}

AssemblyState parse_state(std::string_view text, std::size_t expected_components) {
  if (text.empty()) throw Error("empty state string");

  std::vector<ComponentStatus> statuses;
  if (text.find(',') != std::string_view::npos) {
    std::size_t pos = 0;
    while (true) {
      auto next = text.find(',', pos);
      auto token = text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      if (token.empty()) throw Error("malformed state '" + std::string(text) + "': empty field");
      if (token == "1") {
        statuses.push_back(ComponentStatus::Installed);
      } else if (token == "0") {
        statuses.push_back(ComponentStatus::Absent);
      } else if (token == "-1") {
        statuses.push_back(ComponentStatus::Incorrect);
      } else {
        throw Error("malformed state '" + std::string(text) + "': invalid status '" + std::string(token) + "'");
      }
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
  } else {
    for (char c : text) {
      if (c == '1') {
        statuses.push_back(ComponentStatus::Installed);
      } else if (c == '0') {
        statuses.push_back(ComponentStatus::Absent);
      } else {
        throw Error("malformed compact state '" + std::string(text) + "': invalid character '" + std::string(1, c) +
                    "' (use the comma-separated form for -1)");
      }
    }
  }

  if (statuses.size() != expected_components) {
    throw Error("state '" + std::string(text) + "' has " + std::to_string(statuses.size()) + " components, expected " +
                std::to_string(expected_components));
  }
  return AssemblyState(std::move(statuses));
}

std::string serialize_state(const AssemblyState& state) {
  std::string out;
  out.reserve(state.size() * 3);
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(to_int(state[i]));
  }
  return out;
}

std::string serialize_state_compact(const AssemblyState& state) {
  std::string out;
  out.reserve(state.size());
  for (auto s : state.statuses()) {
    if (s == ComponentStatus::Incorrect) throw Error("compact state form cannot represent INCORRECT components");
    out += s == ComponentStatus::Installed ? '1' : '0';
  }
  return out;
}

std::vector<ComponentChange> diff_states(const AssemblyState& prev, const AssemblyState& next) {
  if (prev.size() != next.size()) {
    throw Error("cannot diff states of different length (" + std::to_string(prev.size()) + " vs " +
                std::to_string(next.size()) + ")");
  }
  std::vector<ComponentChange> changes;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (prev[i] == next[i]) continue;
    Transition t = Transition::Remove;
    if (next[i] == ComponentStatus::Installed) t = Transition::Install;
    else if (next[i] == ComponentStatus::Incorrect) t = Transition::Incorrect;
    changes.push_back({i, t});
  }
  return changes;
}

AssemblyState apply_changes(AssemblyState state, std::span<const ComponentChange> changes) {
  for (const auto& c : changes) {
    if (c.component >= state.size()) throw Error("change references component " + std::to_string(c.component) +
                                                 " of a " + std::to_string(state.size()) + "-component state");
    state.set(c.component, target_status(c.transition));
  }
  return state;
}

bool is_error_state(const AssemblyState& state) {
  return std::ranges::any_of(state.statuses(), [](ComponentStatus s) { return s == ComponentStatus::Incorrect; });
}

AssemblyState nearest_correct_state(const AssemblyState& state) {
  AssemblyState out = state;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] == ComponentStatus::Incorrect) out.set(i, ComponentStatus::Installed);
  }
  return out;
}

std::size_t hamming_distance(const AssemblyState& a, const AssemblyState& b) {
  if (a.size() != b.size()) throw Error("hamming distance of states with different length");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace psr

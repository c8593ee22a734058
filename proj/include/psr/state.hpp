#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psr {

/// Base class for all recoverable errors raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ComponentStatus : std::int8_t {
  Incorrect = -1,
  Absent = 0,
  Installed = 1,
};

std::optional<ComponentStatus> status_from_int(int value);

inline int to_int(ComponentStatus s) { return static_cast<int>(s); }

/// Kind of change a single component undergoes between two states.
///   Install   : any status -> 1
///   Remove    : 1 -> 0 or -1 -> 0
///   Incorrect : any status -> -1
enum class Transition : std::uint8_t { Install, Remove, Incorrect };

std::string_view to_string(Transition t);
std::optional<Transition> transition_from_string(std::string_view text);

/// Status a component holds after `t` has been applied.
ComponentStatus target_status(Transition t);

/// Fixed-length assembly state; one status per component of a procedure.
class AssemblyState {
 public:
  AssemblyState() = default;
  explicit AssemblyState(std::size_t components, ComponentStatus fill = ComponentStatus::Absent)
      : statuses_(components, fill) {}
  explicit AssemblyState(std::vector<ComponentStatus> statuses) : statuses_(std::move(statuses)) {}
  AssemblyState(std::initializer_list<int> values);

  std::size_t size() const { return statuses_.size(); }
  bool empty() const { return statuses_.empty(); }

  ComponentStatus operator[](std::size_t i) const { return statuses_[i]; }
  ComponentStatus at(std::size_t i) const { return statuses_.at(i); }
  void set(std::size_t i, ComponentStatus s) { statuses_.at(i) = s; }

  std::span<const ComponentStatus> statuses() const { return statuses_; }

  friend bool operator==(const AssemblyState&, const AssemblyState&) = default;

 private:
  std::vector<ComponentStatus> statuses_;
};

struct ComponentChange {
  std::size_t component = 0;
  Transition transition = Transition::Install;

  friend bool operator==(const ComponentChange&, const ComponentChange&) = default;
};

/// Parses either the compact digit form ("11100000000") or the canonical
/// comma-separated form ("1,-1,0"). The compact form cannot express -1.
AssemblyState parse_state(std::string_view text, std::size_t expected_components);

/// Canonical comma-separated form.
std::string serialize_state(const AssemblyState& state);

/// Compact digit form; throws psr::Error if any component is INCORRECT.
std::string serialize_state_compact(const AssemblyState& state);

/// One entry per differing component, ascending by component index.
std::vector<ComponentChange> diff_states(const AssemblyState& prev, const AssemblyState& next);

AssemblyState apply_changes(AssemblyState state, std::span<const ComponentChange> changes);

bool is_error_state(const AssemblyState& state);

/// Replaces every INCORRECT component by INSTALLED: what the state looks
/// like had the faulty steps been done right.
AssemblyState nearest_correct_state(const AssemblyState& state);

std::size_t hamming_distance(const AssemblyState& a, const AssemblyState& b);

}  // namespace psr

template <>
struct std::hash<psr::AssemblyState> {
  std::size_t operator()(const psr::AssemblyState& s) const noexcept {
    // FNV-1a over the status bytes
    std::uint64_t h = 1469598103934665603ULL;
    for (auto v : s.statuses()) {
      h ^= static_cast<std::uint8_t>(v);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

#pragma once

// Brute-force reference implementations the optimized code is checked against.

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "psr/procedure.hpp"

namespace psr::testing {

/// Minimum cost over every edit script that rewrites `y` into `yhat` left to
/// right, where a transposed pair is not touched again. Enumerates scripts
/// exhaustively (no memoisation), so keep inputs short.
inline double brute_force_edit_cost(const std::string& y, const std::string& yhat, double ins = 1, double del = 1,
                                    double sub = 2, double trans = 1) {
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double cost) {
    if (cost >= best) return;
    if (i == y.size() && j == yhat.size()) {
      best = cost;
      return;
    }
    if (i < y.size() && j < yhat.size()) {
      walk(i + 1, j + 1, cost + (y[i] == yhat[j] ? 0.0 : sub));
    }
    if (i + 1 < y.size() && j + 1 < yhat.size() && y[i] == yhat[j + 1] && y[i + 1] == yhat[j] && y[i] != y[i + 1]) {
      walk(i + 2, j + 2, cost + trans);
    }
    if (i < y.size()) walk(i + 1, j, cost + del);
    if (j < yhat.size()) walk(i, j + 1, cost + ins);
  };
  walk(0, 0, 0.0);
  return best;
}

/// States visited by every prerequisite-respecting order, found by
/// enumerating the orders one by one.
inline StateSet enumerate_expected_states(const ProcedureSpec& spec) {
  StateSet out;
  const std::size_t n = spec.actions.size();
  std::vector<bool> done(n, false);
  std::function<void(const AssemblyState&)> extend = [&](const AssemblyState& state) {
    out.insert(state);
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const auto& a = spec.actions[i];
      const bool ready = std::ranges::all_of(a.prerequisites, [&](const std::string& p) {
        const auto it = std::ranges::find(spec.actions, p, &ProceduralAction::id);
        return done[static_cast<std::size_t>(it - spec.actions.begin())];
      });
      if (!ready) continue;
      done[i] = true;
      AssemblyState next = state;
      next.set(a.component, target_status(a.transition));
      extend(next);
      done[i] = false;
    }
  };
  extend(spec.initial_state);
  return out;
}

}  // namespace psr::testing

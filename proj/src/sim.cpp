#include "psr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace psr {

namespace {

// std:: distributions are implementation-defined; map raw engine output
// ourselves so a seed produces the same scenario with every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

// Counts linear extensions of the actions not yet in `done`, memoised on
// the downset.
class ExtensionCounter {
 public:
  ExtensionCounter(std::vector<std::uint64_t> need, std::uint64_t all) : need_(std::move(need)), all_(all) {}

  double count(std::uint64_t done) {
    if (done == all_) return 1.0;
    if (auto it = memo_.find(done); it != memo_.end()) return it->second;
    double total = 0.0;
    for (std::size_t i = 0; i < need_.size(); ++i) {
      if (ready(done, i)) total += count(done | (std::uint64_t{1} << i));
    }
    memo_.emplace(done, total);
    return total;
  }

  bool ready(std::uint64_t done, std::size_t i) const {
    const std::uint64_t bit = std::uint64_t{1} << i;
    return (all_ & bit) && !(done & bit) && !(need_[i] & ~done);
  }

 private:
  std::vector<std::uint64_t> need_;
  std::uint64_t all_;
  std::unordered_map<std::uint64_t, double> memo_;
};

std::int64_t dwell_frames(Rng& rng, const SimConfig& cfg) {
  const double seconds = cfg.dwell_mean_s + cfg.dwell_jitter_s * (2.0 * rng.uniform() - 1.0);
  return std::max<std::int64_t>(1, std::llround(seconds * cfg.fps));
}

}  // namespace

std::vector<Diagnostic> validate_sim_config(const SimConfig& cfg) {
  std::vector<Diagnostic> out;
  auto prob = [&](double p, const char* name) {
    if (!is_probability(p)) out.push_back({"probability", std::string(name) + " must lie in [0, 1]"});
  };
  if (!(cfg.fps > 0.0) || !std::isfinite(cfg.fps)) out.push_back({"fps", "fps must be positive"});
  if (!(cfg.dwell_mean_s > 0.0) || !std::isfinite(cfg.dwell_mean_s)) {
    out.push_back({"dwell", "dwell_mean_s must be positive"});
  }
  if (!(cfg.dwell_jitter_s >= 0.0) || !std::isfinite(cfg.dwell_jitter_s)) {
    out.push_back({"dwell", "dwell_jitter_s must be non-negative"});
  }
  if (!(cfg.conf_spread >= 0.0) || !std::isfinite(cfg.conf_spread)) {
    out.push_back({"confidence", "conf_spread must be non-negative"});
  }
  prob(cfg.conf_mean, "conf_mean");
  prob(cfg.detect_prob, "detect_prob");
  prob(cfg.misclass_prob, "misclass_prob");
  prob(cfg.error_fp_rate, "error_fp_rate");
  return out;
}

std::vector<Diagnostic> validate_injection(const ErrorInjection& inj, const ProcedureSpec& spec) {
  std::vector<Diagnostic> out;
  auto known = [&](const std::string& id, const char* field) {
    if (spec.find_action(id)) return true;
    out.push_back({"unknown-action", std::string(field) + " references unknown action '" + id + "'"});
    return false;
  };
  for (const auto& id : inj.omit) known(id, "omit");
  for (const auto& id : inj.incorrect) {
    if (known(id, "incorrect") && std::ranges::find(inj.omit, id) != inj.omit.end()) {
      out.push_back({"conflict", "action '" + id + "' is both omitted and incorrect"});
    }
  }
  for (const auto& [a, b] : inj.swaps) {
    for (const auto* id : {&a, &b}) {
      if (known(*id, "swap") && std::ranges::find(inj.omit, *id) != inj.omit.end()) {
        out.push_back({"conflict", "swapped action '" + *id + "' is omitted"});
      }
    }
  }
  return out;
}

const AssemblyState& Timeline::state_at(std::int64_t frame) const {
  if (segments.empty() || frame < 0 || frame >= end_frame) throw Error("frame outside timeline");
  auto it = std::ranges::upper_bound(segments, frame, {}, &TimelineSegment::frame);
  return std::prev(it)->state;
}

Execution sample_execution(const ProcedureSpec& spec, const ErrorInjection& inj, std::uint64_t seed,
                           const SimConfig& cfg, std::string recording_id) {
  require_valid(spec);
  if (auto d = validate_injection(inj, spec); !d.empty()) throw Error(d.front().message);
  if (auto d = validate_sim_config(cfg); !d.empty()) throw Error(d.front().message);
  const std::size_t n = spec.actions.size();
  if (n > 64) throw Error("simulation supports at most 64 actions");

  auto index_of = [&](const std::string& id) {
    return static_cast<std::size_t>(spec.find_action(id) - spec.actions.data());
  };
  std::unordered_set<std::size_t> omitted;
  for (const auto& id : inj.omit) omitted.insert(index_of(id));

  std::uint64_t all = 0;
  std::vector<std::uint64_t> need(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (omitted.contains(i)) continue;
    all |= std::uint64_t{1} << i;
    for (const auto& p : spec.actions[i].prerequisites) {
      const auto j = index_of(p);
      if (!omitted.contains(j)) need[i] |= std::uint64_t{1} << j;
    }
  }

  Rng rng(seed);
  ExtensionCounter counter(need, all);
  std::vector<std::size_t> order;
  std::uint64_t done = 0;
  while (done != all) {
    const double total = counter.count(done);
    double pick = rng.uniform() * total;
    std::size_t chosen = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!counter.ready(done, i)) continue;
      chosen = i;
      pick -= counter.count(done | (std::uint64_t{1} << i));
      if (pick < 0.0) break;
    }
    order.push_back(chosen);
    done |= std::uint64_t{1} << chosen;
  }

  for (const auto& [a, b] : inj.swaps) {
    auto ia = std::ranges::find(order, index_of(a));
    auto ib = std::ranges::find(order, index_of(b));
    std::iter_swap(ia, ib);
  }

  Execution ex;
  ex.ground_truth.recording_id = std::move(recording_id);
  ex.ground_truth.fps = cfg.fps;
  ex.ground_truth.initial_state = spec.initial_state;

  AssemblyState state = spec.initial_state;
  std::int64_t frame = 0;
  ex.timeline.segments.push_back({frame, state});
  frame += dwell_frames(rng, cfg);

  for (auto i : order) {
    const auto& action = spec.actions[i];
    const bool faulty = std::ranges::find(inj.incorrect, action.id) != inj.incorrect.end();
    const Transition t = faulty ? Transition::Incorrect : action.transition;
    const ComponentStatus target = target_status(t);
    if (state[action.component] == target) continue;  // nothing to do physically

    state.set(action.component, target);
    ex.timeline.segments.push_back({frame, state});

    StepEvent e;
    e.action_id = action_id_for(spec, action.component, t);
    e.component = action.component;
    e.transition = t;
    e.frame = frame;
    e.time_s = static_cast<double>(frame) / cfg.fps;
    e.confidence = 1.0;
    e.source = EventSource::GroundTruth;
    ex.ground_truth.events.push_back(std::move(e));

    frame += dwell_frames(rng, cfg);
  }
  ex.timeline.end_frame = frame;
  return ex;
}

std::vector<DetectionFrame> render_stream(const Timeline& timeline, const SimConfig& cfg, std::uint64_t seed) {
  if (auto d = validate_sim_config(cfg); !d.empty()) throw Error(d.front().message);
  Rng rng(seed);
  std::vector<DetectionFrame> frames;
  frames.reserve(static_cast<std::size_t>(std::max<std::int64_t>(timeline.end_frame, 0)));

  std::size_t seg = 0;
  for (std::int64_t f = 0; f < timeline.end_frame; ++f) {
    while (seg + 1 < timeline.segments.size() && timeline.segments[seg + 1].frame <= f) ++seg;
    DetectionFrame frame{f, static_cast<double>(f) / cfg.fps, {}};

    if (rng.uniform() < cfg.detect_prob) {
      AssemblyState s = timeline.segments[seg].state;
      if (is_error_state(s) && rng.uniform() < cfg.error_fp_rate) s = nearest_correct_state(s);
      if (rng.uniform() < cfg.misclass_prob && !s.empty()) {
        // uniform over the 2n states at Hamming distance one
        const std::size_t k = rng.below(2 * s.size());
        const std::size_t c = k / 2;
        std::vector<ComponentStatus> others;
        for (auto v : {ComponentStatus::Incorrect, ComponentStatus::Absent, ComponentStatus::Installed}) {
          if (v != s[c]) others.push_back(v);
        }
        s.set(c, others[k % 2]);
      }
      const double conf = std::clamp(cfg.conf_mean + cfg.conf_spread * (2.0 * rng.uniform() - 1.0), 0.0, 1.0);
      frame.detections.push_back({std::move(s), conf, std::nullopt});
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

Scenario simulate(const ProcedureSpec& spec, const ErrorInjection& inj, const SimConfig& cfg,
                  std::string recording_id) {
  Scenario sc;
  sc.recording_id = recording_id;
  auto ex = sample_execution(spec, inj, cfg.seed, cfg, std::move(recording_id));
  sc.ground_truth = std::move(ex.ground_truth);
  sc.timeline = std::move(ex.timeline);
  sc.stream = render_stream(sc.timeline, cfg, splitmix64(cfg.seed));
  return sc;
}

ProcedureSpec random_procedure(std::uint64_t seed, std::size_t components, double edge_prob) {
  if (components == 0 || components > 64) throw Error("random_procedure needs 1..64 components");
  Rng rng(splitmix64(seed ^ 0x70726f63ULL));

  std::vector<std::size_t> perm(components);
  for (std::size_t i = 0; i < components; ++i) perm[i] = i;
  for (std::size_t i = components; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  ProcedureSpec spec;
  spec.id = "random_" + std::to_string(seed);
  for (std::size_t i = 0; i < components; ++i) spec.components.push_back({i, "component " + std::to_string(i)});
  spec.initial_state = AssemblyState(components);
  for (std::size_t k = 0; k < components; ++k) {
    ProceduralAction a;
    a.id = "a" + std::to_string(k);
    a.component = perm[k];
    a.transition = Transition::Install;
    a.description = "install component " + std::to_string(perm[k]);
    for (std::size_t j = 0; j < k; ++j) {
      if (rng.uniform() < edge_prob) a.prerequisites.push_back("a" + std::to_string(j));
    }
    spec.actions.push_back(std::move(a));
  }
  return spec;
}

}  // namespace psr

#include "psr/baselines.hpp"

namespace psr {

const Detection* select_top_detection(const DetectionFrame& frame) {
  const Detection* best = nullptr;
  for (const auto& d : frame.detections) {
    if (!best || d.confidence > best->confidence) best = &d;
  }
  return best;
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::B1: return "b1";
    case Variant::B2: return "b2";
    case Variant::B3: return "b3";
  }
  return "?";
}

std::optional<Variant> variant_from_string(std::string_view text) {
  if (text == "b1" || text == "B1") return Variant::B1;
  if (text == "b2" || text == "B2") return Variant::B2;
  if (text == "b3" || text == "B3") return Variant::B3;
  return std::nullopt;
}

Recognizer::Recognizer(BaselineConfig config, ProcedureSpec spec)
    : config_(config), spec_(std::move(spec)) {
  require_valid(spec_);
  if (!(config_.decay > 0.0 && config_.decay <= 1.0)) throw Error("decay must lie in (0, 1]");

  const std::size_t n = spec_.component_count();
  ids_.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (auto t : {Transition::Install, Transition::Remove, Transition::Incorrect}) {
      ids_[c][static_cast<std::size_t>(t)] = action_id_for(spec_, c, t);
    }
  }
  confs_.assign(n, 0.0);
  pending_.assign(n, ComponentStatus::Absent);

  if (config_.variant == Variant::B3) {
    expected_ = std::make_shared<const StateSet>(expected_states(spec_));
    current_ = spec_.initial_state;
    initialized_ = true;
  }
}

void Recognizer::initialize_from(const DetectionFrame& frame) {
  if (initialized_) return;
  const Detection* top = select_top_detection(frame);
  if (!top) return;
  if (top->state.size() != spec_.component_count()) {
    throw Error("frame " + std::to_string(frame.frame) + ": detected state has " +
                std::to_string(top->state.size()) + " components, procedure has " +
                std::to_string(spec_.component_count()));
  }
  current_ = top->state;
  initialized_ = true;
}

StepEvent Recognizer::make_event(std::size_t component, Transition t, const DetectionFrame& frame,
                                 double confidence) const {
  StepEvent e;
  e.action_id = ids_[component][static_cast<std::size_t>(t)];
  e.component = component;
  e.transition = t;
  e.time_s = frame.time_s;
  e.frame = frame.frame;
  e.confidence = confidence;
  e.source = EventSource::Recognized;
  return e;
}

bool Recognizer::admissible(const AssemblyState& candidate) const {
  return !expected_ || expected_->contains(candidate);
}

bool Recognizer::emit(StepEvent e, std::vector<StepEvent>& out) {
  // A step is reported once; later re-detections of it are dropped.
  if (!emitted_.insert(e.action_id).second) return false;
  out.push_back(std::move(e));
  return true;
}

std::vector<StepEvent> Recognizer::step(const DetectionFrame& frame) {
  if (last_frame_ && frame.frame <= *last_frame_) {
    throw Error("frame " + std::to_string(frame.frame) + " arrives after frame " + std::to_string(*last_frame_));
  }
  last_frame_ = frame.frame;

  std::vector<StepEvent> out;
  if (!initialized_) {
    initialize_from(frame);
    return out;
  }
  const Detection* top = select_top_detection(frame);
  if (!top) return out;
  if (top->state.size() != current_.size()) {
    throw Error("frame " + std::to_string(frame.frame) + ": detected state has " +
                std::to_string(top->state.size()) + " components, procedure has " +
                std::to_string(current_.size()));
  }
  if (config_.variant == Variant::B1) {
    step_b1(*top, frame, out);
  } else {
    step_accumulate(*top, frame, out);
  }
  return out;
}

void Recognizer::step_b1(const Detection& top, const DetectionFrame& frame, std::vector<StepEvent>& out) {
  if (top.confidence < config_.detection_threshold || top.state == current_) return;
  for (const auto& change : diff_states(current_, top.state)) {
    emit(make_event(change.component, change.transition, frame, top.confidence), out);
  }
  current_ = top.state;
}

void Recognizer::step_accumulate(const Detection& top, const DetectionFrame& frame, std::vector<StepEvent>& out) {
  for (std::size_t i = 0; i < current_.size(); ++i) {
    const ComponentStatus detected = top.state[i];
    if (detected == current_[i]) {
      confs_[i] *= config_.decay;
      continue;
    }
    confs_[i] += top.confidence;
    pending_[i] = detected;
    if (confs_[i] < config_.accumulation_threshold) continue;

    AssemblyState candidate = current_;
    candidate.set(i, pending_[i]);
    if (!admissible(candidate)) continue;

    const auto change = diff_states(current_, candidate).front();
    emit(make_event(i, change.transition, frame, confs_[i]), out);
    current_ = std::move(candidate);
    confs_[i] = 0.0;
  }
}

Recognizer init_recognizer(const BaselineConfig& config, const ProcedureSpec& spec,
                           const DetectionFrame* first_frame) {
  Recognizer r(config, spec);
  if (first_frame) r.initialize_from(*first_frame);
  return r;
}

StepSequence run_baseline(const BaselineConfig& config, const ProcedureSpec& spec,
                          std::span<const DetectionFrame> stream, double fps, std::string recording_id) {
  if (!(fps > 0.0)) throw Error("fps must be positive");
  Recognizer r(config, spec);
  StepSequence seq;
  seq.recording_id = std::move(recording_id);
  seq.fps = fps;
  for (const auto& frame : stream) {
    const bool was_initialized = r.initialized();
    auto events = r.step(frame);
    if (!was_initialized && r.initialized()) seq.initial_state = r.current();
    seq.events.insert(seq.events.end(), std::make_move_iterator(events.begin()),
                      std::make_move_iterator(events.end()));
  }
  if (config.variant == Variant::B3) seq.initial_state = spec.initial_state;
  return seq;
}

}  // namespace psr

#include "psr/metrics.hpp"

#include <unordered_map>
#include <unordered_set>

namespace psr {

double pos_score(std::span<const std::string> truth_order, std::span<const std::string> predicted_order) {
  if (truth_order.empty()) throw Error("POS is undefined for an empty ground truth");
  const double distance = weighted_damlev(truth_order, predicted_order, EditWeights{});
  return 1.0 - std::min(distance / static_cast<double>(truth_order.size()), 1.0);
}

double pos_score(const StepSequence& truth, const StepSequence& predicted) {
  const auto y = execution_order(truth);
  const auto yhat = execution_order(predicted);
  return pos_score(std::span<const std::string>(y), std::span<const std::string>(yhat));
}

std::size_t MatchOutcome::tp() const {
  return static_cast<std::size_t>(
      std::ranges::count(matches, Verdict::TruePositive, &EventMatch::verdict));
}

std::size_t MatchOutcome::fp() const { return matches.size() - tp(); }

MatchOutcome classify_events(const StepSequence& truth, const StepSequence& predicted) {
  check_sequence(truth);
  check_sequence(predicted);

  std::unordered_map<std::string_view, const StepEvent*> completed;
  for (const auto& e : truth.events) completed.emplace(e.action_id, &e);

  MatchOutcome out;
  out.matches.reserve(predicted.events.size());
  std::unordered_set<std::string_view> predicted_ids;
  for (const auto& p : predicted.events) {
    predicted_ids.insert(p.action_id);
    EventMatch m{p, Verdict::FalsePositive, std::nullopt, std::nullopt};
    if (auto it = completed.find(p.action_id); it != completed.end()) {
      m.truth = *it->second;
      if (p.time_s >= it->second->time_s) {
        m.verdict = Verdict::TruePositive;
        m.delay_s = p.time_s - it->second->time_s;
      }
    }
    out.matches.push_back(std::move(m));
  }
  for (const auto& e : truth.events) {
    if (!predicted_ids.contains(e.action_id)) out.missed.push_back(e);
  }
  return out;
}

double f1_score(const MatchOutcome& outcome) {
  const auto tp = static_cast<double>(outcome.tp());
  const double denom = 2.0 * tp + static_cast<double>(outcome.fp() + outcome.fn());
  if (denom == 0.0) throw Error("F1 is undefined without any predicted or ground-truth step");
  return 2.0 * tp / denom;
}

std::optional<double> average_delay(const MatchOutcome& outcome) {
  double sum = 0.0;
  std::size_t h = 0;
  for (const auto& m : outcome.matches) {
    if (m.verdict != Verdict::TruePositive) continue;
    sum += *m.delay_s;
    ++h;
  }
  if (h == 0) return std::nullopt;
  return sum / static_cast<double>(h);
}

namespace {

MetricsReport score(const StepSequence& scored_truth, const StepSequence& predicted, bool has_errors) {
  if (scored_truth.recording_id != predicted.recording_id) {
    throw Error("recording ids differ: '" + scored_truth.recording_id + "' vs '" + predicted.recording_id + "'");
  }
  if (scored_truth.fps != predicted.fps) {
    throw Error("frame rates differ for recording '" + scored_truth.recording_id + "'");
  }
  const auto outcome = classify_events(scored_truth, predicted);

  MetricsReport r;
  r.recording_id = scored_truth.recording_id;
  r.pos = pos_score(scored_truth, predicted);
  r.tp = outcome.tp();
  r.fp = outcome.fp();
  r.fn = outcome.fn();
  r.f1 = f1_score(outcome);
  r.precision = r.tp + r.fp ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp) : 0.0;
  r.recall = r.tp + r.fn ? static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn) : 0.0;
  r.tau_s = average_delay(outcome);
  r.has_errors = has_errors;
  return r;
}

}  // namespace

MetricsReport evaluate_recording(const StepSequence& truth, const StepSequence& predicted) {
  StepSequence scored = truth;
  std::erase_if(scored.events, [](const StepEvent& e) { return e.transition == Transition::Incorrect; });
  return score(scored, predicted, has_execution_errors(truth));
}

MetricsReport evaluate_recording(const StepSequence& truth, const StepSequence& predicted,
                                 const ProcedureSpec& spec) {
  return score(correct_only(truth, spec), predicted, has_procedure_errors(truth, spec));
}

MetricsReport aggregate_reports(std::span<const MetricsReport> reports, ReportSubset subset) {
  MetricsReport agg;
  agg.recording_id = subset == ReportSubset::All ? "ALL" : "ERRORS_ONLY";
  agg.recordings = 0;
  double tau_sum = 0.0;
  std::size_t tau_count = 0;
  for (const auto& r : reports) {
    if (subset == ReportSubset::ErrorsOnly && !r.has_errors) continue;
    ++agg.recordings;
    agg.pos += r.pos;
    agg.precision += r.precision;
    agg.recall += r.recall;
    agg.f1 += r.f1;
    agg.tp += r.tp;
    agg.fp += r.fp;
    agg.fn += r.fn;
    agg.has_errors = agg.has_errors || r.has_errors;
    if (r.tau_s) {
      tau_sum += *r.tau_s;
      ++tau_count;
    }
  }
  if (agg.recordings == 0) throw Error("no recordings to aggregate for subset " + agg.recording_id);
  const auto n = static_cast<double>(agg.recordings);
  agg.pos /= n;
  agg.precision /= n;
  agg.recall /= n;
  agg.f1 /= n;
  if (tau_count) agg.tau_s = tau_sum / static_cast<double>(tau_count);
  return agg;
}

}  // namespace psr

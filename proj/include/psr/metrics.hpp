#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psr/events.hpp"
#include "psr/procedure.hpp"

namespace psr {

/// Edit costs for the procedure-order distance. Substitution costs as much
/// as a deletion plus an insertion, so it never beats that pair.
struct EditWeights {
  double insertion = 1.0;
  double deletion = 1.0;
  double substitution = 2.0;
  double transposition = 1.0;
};

/// Weighted restricted Damerau-Levenshtein (optimal string alignment)
/// distance turning `truth` into `predicted`. Every element takes part in
/// at most one adjacent transposition.
template <class T>
double weighted_damlev(std::span<const T> truth, std::span<const T> predicted, const EditWeights& w = {}) {
  const std::size_t n = truth.size();
  const std::size_t m = predicted.size();
  const std::size_t stride = m + 1;
  std::vector<double> d((n + 1) * stride);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return d[i * stride + j]; };

  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<double>(i) * w.deletion;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<double>(j) * w.insertion;

  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = truth[i - 1] == predicted[j - 1];
      double best = std::min(at(i - 1, j) + w.deletion, at(i, j - 1) + w.insertion);
      best = std::min(best, at(i - 1, j - 1) + (same ? 0.0 : w.substitution));
      if (i > 1 && j > 1 && truth[i - 1] == predicted[j - 2] && truth[i - 2] == predicted[j - 1] && !same) {
        best = std::min(best, at(i - 2, j - 2) + w.transposition);
      }
      at(i, j) = best;
    }
  }
  return at(n, m);
}

template <class T>
double weighted_damlev(const std::vector<T>& truth, const std::vector<T>& predicted, const EditWeights& w = {}) {
  return weighted_damlev(std::span<const T>(truth), std::span<const T>(predicted), w);
}

/// 1 - min(distance / |truth|, 1). Throws psr::Error on an empty truth.
double pos_score(std::span<const std::string> truth_order, std::span<const std::string> predicted_order);
double pos_score(const StepSequence& truth, const StepSequence& predicted);

enum class Verdict { TruePositive, FalsePositive };

struct EventMatch {
  StepEvent predicted;
  Verdict verdict = Verdict::FalsePositive;
  std::optional<StepEvent> truth;  // ground-truth completion of the same action, if any
  std::optional<double> delay_s;   // set for true positives only
};

/// Verdict per predicted event plus the completed actions nobody predicted.
struct MatchOutcome {
  std::vector<EventMatch> matches;
  std::vector<StepEvent> missed;  // false negatives

  std::size_t tp() const;
  std::size_t fp() const;
  std::size_t fn() const { return missed.size(); }
};

/// Prediction of a_i at t' is TP iff a_i was completed at t <= t', FP
/// otherwise; completed actions absent from the prediction are FN. An
/// early prediction therefore suppresses the FN of its action.
MatchOutcome classify_events(const StepSequence& truth, const StepSequence& predicted);

/// 2 tp / (2 tp + fp + fn); throws psr::Error when all counts are zero.
double f1_score(const MatchOutcome& outcome);

/// Mean delay over true positives; nullopt without any.
std::optional<double> average_delay(const MatchOutcome& outcome);

struct MetricsReport {
  std::string recording_id;
  std::size_t recordings = 1;  // > 1 for aggregates
  double pos = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> tau_s;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool has_errors = false;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Combines POS, F1 and average delay for one recording. `truth` may be the
/// errors-included label set: only correct completions are scored, and
/// incorrect ones set has_errors.
MetricsReport evaluate_recording(const StepSequence& truth, const StepSequence& predicted);

/// As above; with the procedure at hand, steps outside it are dropped from
/// the truth and omissions or order violations also set has_errors.
MetricsReport evaluate_recording(const StepSequence& truth, const StepSequence& predicted, const ProcedureSpec& spec);

enum class ReportSubset { All, ErrorsOnly };

/// Unweighted mean of pos/precision/recall/f1 and of the defined tau values;
/// counts are summed. Throws psr::Error when the subset is empty.
MetricsReport aggregate_reports(std::span<const MetricsReport> reports, ReportSubset subset);

}  // namespace psr

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "psr/baselines.hpp"
#include "psr/events.hpp"
#include "psr/metrics.hpp"
#include "psr/procedure.hpp"
#include "psr/sim.hpp"

namespace psr {

inline constexpr std::string_view kFormatVersion = "1.0.0";

/// Reader failure located in a file. `line` is 1-based; 0 means the
/// document as a whole.
class FormatError : public Error {
 public:
  FormatError(std::string source, std::size_t line, const std::string& message);

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string source_;
  std::size_t line_;
  std::string detail_;
};

enum class FileKind { Stream, GroundTruth, Procedure, Scenario, Report, SimConfig };

std::string_view to_string(FileKind k);
std::optional<FileKind> file_kind_from_string(std::string_view text);

/// Header of every file. Line-delimited files carry it as their first line.
struct FileManifest {
  std::string format_version{kFormatVersion};
  FileKind kind = FileKind::Stream;
  double fps = 10.0;
  std::string recording_id;
  EventSource source = EventSource::GroundTruth;  // step files only

  friend bool operator==(const FileManifest&, const FileManifest&) = default;
};

// --- detection streams (JSONL) -------------------------------------------

/// Incremental stream reader; holds one line at a time.
class StreamReader {
 public:
  /// `components` == 0 infers the state length from the first detection.
  StreamReader(std::istream& in, std::string source_name, std::size_t components = 0);

  const FileManifest& manifest() const { return manifest_; }
  std::optional<DetectionFrame> next();

 private:
  std::istream& in_;
  std::string source_;
  std::size_t components_;
  std::size_t line_ = 0;
  std::optional<std::int64_t> last_frame_;
  FileManifest manifest_;
};

std::pair<FileManifest, std::vector<DetectionFrame>> read_stream(std::istream& in, std::string source_name,
                                                                 std::size_t components = 0);
std::pair<FileManifest, std::vector<DetectionFrame>> read_stream(const std::filesystem::path& path,
                                                                 std::size_t components = 0);
void write_stream(std::ostream& out, const FileManifest& manifest, std::span<const DetectionFrame> frames);
void write_stream(const std::filesystem::path& path, const FileManifest& manifest,
                  std::span<const DetectionFrame> frames);

// --- step sequences (JSONL; ground truth and predictions) ----------------

enum class LabelView { CorrectOnly, WithErrors };

/// First record is the starting state, every further record a new state;
/// consecutive states are diffed into step events.
StepSequence read_ground_truth(std::istream& in, std::string source_name, const ProcedureSpec& spec,
                               LabelView view = LabelView::WithErrors);
StepSequence read_ground_truth(const std::filesystem::path& path, const ProcedureSpec& spec,
                               LabelView view = LabelView::WithErrors);
/// Writes one record per event; a confidence other than 1 is written
/// alongside the state.
void write_ground_truth(std::ostream& out, const StepSequence& seq, const ProcedureSpec& spec);
void write_ground_truth(const std::filesystem::path& path, const StepSequence& seq, const ProcedureSpec& spec);

// --- procedures (JSON) ---------------------------------------------------

ProcedureSpec parse_procedure(std::string_view text, std::string source_name = "<procedure>");
std::string format_procedure(const ProcedureSpec& spec);
ProcedureSpec read_procedure(const std::filesystem::path& path);
void write_procedure(const std::filesystem::path& path, const ProcedureSpec& spec);

/// Bundled specs: "industreal_car_assembly", "industreal_car_maintenance".
ProcedureSpec bundled_procedure(std::string_view id);
std::vector<std::string> bundled_procedure_ids();

// --- simulation config and scenarios (JSON) ------------------------------

SimConfig parse_sim_config(std::string_view text, std::string source_name = "<config>");
std::string format_sim_config(const SimConfig& cfg);
SimConfig read_sim_config(const std::filesystem::path& path);

struct ScenarioFiles {
  std::filesystem::path stream;
  std::filesystem::path ground_truth;
  std::filesystem::path manifest;
};

/// Writes stream.jsonl, ground_truth.jsonl and scenario.json into `dir`.
ScenarioFiles write_scenario(const std::filesystem::path& dir, const Scenario& scenario, const ProcedureSpec& spec,
                             const SimConfig& cfg, const ErrorInjection& inj);

/// Contents of scenario.json; file names are relative to its directory.
struct ScenarioManifest {
  std::string recording_id;
  std::string procedure;
  double fps = 10.0;
  std::string stream;
  std::string ground_truth;
  bool has_errors = false;
  Timeline timeline;
  SimConfig config;
  ErrorInjection injection;

  friend bool operator==(const ScenarioManifest&, const ScenarioManifest&) = default;
};

ScenarioManifest parse_scenario_manifest(std::string_view text, std::string source_name = "<scenario>");
ScenarioManifest read_scenario_manifest(const std::filesystem::path& path);

// --- metric reports ------------------------------------------------------

enum class ReportFormat { Json, Csv };

struct ReportAggregates {
  std::optional<MetricsReport> all;
  std::optional<MetricsReport> errors_only;  // unset when no recording has errors

  friend bool operator==(const ReportAggregates&, const ReportAggregates&) = default;
};

/// ALL and ERRORS_ONLY aggregates; an empty subset stays unset.
ReportAggregates aggregate_all(std::span<const MetricsReport> reports);

std::string format_report(std::span<const MetricsReport> reports, const ReportAggregates& aggregates,
                          ReportFormat format);
void write_report(const std::filesystem::path& path, std::span<const MetricsReport> reports,
                  const ReportAggregates& aggregates, ReportFormat format);

struct ParsedReport {
  std::vector<MetricsReport> recordings;
  ReportAggregates aggregates;
};
ParsedReport parse_report_json(std::string_view text, std::string source_name = "<report>");

// --- helpers ---------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Peeks at a file's manifest to find its kind.
FileKind detect_file_kind(const std::filesystem::path& path);

}  // namespace psr

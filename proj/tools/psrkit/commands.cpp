#include "psrkit/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "psr/io.hpp"

namespace psrkit {

namespace fs = std::filesystem;

namespace {

// Input problem the user can fix; maps to exit code 1.
struct InputError : psr::Error {
  using psr::Error::Error;
};

psr::ProcedureSpec load_spec(const std::string& ref) {
  if (fs::exists(ref)) return psr::read_procedure(ref);
  const auto ids = psr::bundled_procedure_ids();
  if (std::ranges::find(ids, ref) != ids.end()) return psr::bundled_procedure(ref);
  throw InputError("procedure '" + ref + "' is neither a file nor a bundled procedure");
}

psr::ReportFormat report_format(const std::string& flag, const std::string& out_path) {
  if (flag == "csv") return psr::ReportFormat::Csv;
  if (flag == "json") return psr::ReportFormat::Json;
  return fs::path(out_path).extension() == ".csv" ? psr::ReportFormat::Csv : psr::ReportFormat::Json;
}

void emit_report(const std::vector<psr::MetricsReport>& reports, const std::string& out_path,
                 const std::string& format_flag, std::ostream& out) {
  const auto aggregates = psr::aggregate_all(reports);
  const auto format = report_format(format_flag, out_path);
  if (out_path.empty()) {
    out << psr::format_report(reports, aggregates, format);
  } else {
    psr::write_report(out_path, reports, aggregates, format);
  }
}

// --- validate ---------------------------------------------------------------

void validate_file(const fs::path& path, const std::optional<psr::ProcedureSpec>& spec) {
  if (!fs::is_regular_file(path)) throw InputError(path.string() + ": no such file");
  switch (psr::detect_file_kind(path)) {
    case psr::FileKind::Procedure:
      psr::read_procedure(path);
      break;
    case psr::FileKind::Stream:
      psr::read_stream(path, spec ? spec->component_count() : 0);
      break;
    case psr::FileKind::GroundTruth:
      if (!spec) throw InputError(path.string() + ": step files need --spec");
      psr::read_ground_truth(path, *spec);
      break;
    case psr::FileKind::SimConfig:
      psr::read_sim_config(path);
      break;
    case psr::FileKind::Report:
      psr::parse_report_json(psr::read_text_file(path), path.string());
      break;
    case psr::FileKind::Scenario: {
      const auto m = psr::read_scenario_manifest(path);
      const auto s = spec ? *spec : load_spec(m.procedure);
      const auto dir = path.parent_path();
      psr::read_stream(dir / m.stream, s.component_count());
      const auto gt = psr::read_ground_truth(dir / m.ground_truth, s);
      if (gt.recording_id != m.recording_id) {
        throw InputError(path.string() + ": ground truth belongs to recording '" + gt.recording_id + "'");
      }
      break;
    }
  }
}

int cmd_validate(const std::vector<std::string>& paths, const std::string& spec_ref, std::ostream& err) {
  std::optional<psr::ProcedureSpec> spec;
  if (!spec_ref.empty()) spec = load_spec(spec_ref);
  int status = kOk;
  for (const auto& p : paths) {
    try {
      validate_file(p, spec);
    } catch (const psr::Error& e) {
      err << e.what() << '\n';
      status = kInputError;
    }
  }
  return status;
}

// --- run ----------------------------------------------------------------------

struct RunOptions {
  std::string baseline;
  std::string spec;
  std::string stream;
  std::string out;
  std::optional<double> threshold;
  std::optional<double> decay;
  std::string recording_id;
};

int cmd_run(const RunOptions& o) {
  const auto variant = psr::variant_from_string(o.baseline);
  if (!variant) throw InputError("unknown baseline '" + o.baseline + "' (expected b1, b2 or b3)");
  auto config = psr::BaselineConfig::defaults(*variant);
  if (o.threshold) {
    (*variant == psr::Variant::B1 ? config.detection_threshold : config.accumulation_threshold) = *o.threshold;
  }
  if (o.decay) config.decay = *o.decay;

  const auto spec = load_spec(o.spec);
  std::ifstream in(o.stream, std::ios::binary);
  if (!in) throw psr::FormatError(o.stream, 0, "cannot open file");

  // Frame-at-a-time so memory does not grow with the stream length.
  psr::StreamReader reader(in, o.stream, spec.component_count());
  psr::Recognizer recognizer(config, spec);
  psr::StepSequence seq;
  seq.recording_id = o.recording_id.empty() ? reader.manifest().recording_id : o.recording_id;
  seq.fps = reader.manifest().fps;
  while (auto frame = reader.next()) {
    const bool was_initialized = recognizer.initialized();
    auto events = recognizer.step(*frame);
    if (!was_initialized && recognizer.initialized()) seq.initial_state = recognizer.current();
    std::ranges::move(events, std::back_inserter(seq.events));
  }
  if (*variant == psr::Variant::B3) seq.initial_state = spec.initial_state;
  psr::write_ground_truth(o.out, seq, spec);
  return kOk;
}

// --- eval / bench ----------------------------------------------------------------

int cmd_eval(const std::string& spec_ref, const std::string& gt, const std::string& pred, const std::string& out_path,
             const std::string& format, std::ostream& out) {
  const auto spec = load_spec(spec_ref);
  const auto truth = psr::read_ground_truth(gt, spec);
  const auto predicted = psr::read_ground_truth(pred, spec);
  if (truth.recording_id != predicted.recording_id) {
    throw InputError("recording ids differ: '" + truth.recording_id + "' vs '" + predicted.recording_id + "'");
  }
  emit_report({psr::evaluate_recording(truth, predicted, spec)}, out_path, format, out);
  return kOk;
}

int cmd_bench(const std::string& spec_ref, const std::string& runs, const std::string& out_path,
              const std::string& format, std::ostream& out) {
  const auto spec = load_spec(spec_ref);
  if (!fs::is_directory(runs)) throw InputError(runs + ": not a directory");

  constexpr std::string_view kGt = ".gt.jsonl";
  constexpr std::string_view kPred = ".pred.jsonl";
  std::map<std::string, std::pair<fs::path, fs::path>> pairs;  // ordered by recording id
  for (const auto& entry : fs::directory_iterator(runs)) {
    const auto name = entry.path().filename().string();
    if (name.ends_with(kGt)) pairs[name.substr(0, name.size() - kGt.size())].first = entry.path();
    if (name.ends_with(kPred)) pairs[name.substr(0, name.size() - kPred.size())].second = entry.path();
  }
  if (pairs.empty()) throw InputError(runs + ": no <id>.gt.jsonl / <id>.pred.jsonl pairs");

  std::vector<psr::MetricsReport> reports;
  for (const auto& [id, files] : pairs) {
    if (files.first.empty() || files.second.empty()) throw InputError(runs + ": recording '" + id + "' is unpaired");
    const auto truth = psr::read_ground_truth(files.first, spec);
    const auto predicted = psr::read_ground_truth(files.second, spec);
    reports.push_back(psr::evaluate_recording(truth, predicted, spec));
  }
  emit_report(reports, out_path, format, out);
  return kOk;
}

// --- simulate ------------------------------------------------------------------

struct SimulateOptions {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out_dir;
  std::vector<std::string> omit;
  std::vector<std::string> incorrect;
  std::vector<std::string> swaps;
  std::string recording_id;
};

int cmd_simulate(const SimulateOptions& o) {
  const auto spec = load_spec(o.spec);
  psr::SimConfig cfg = o.config.empty() ? psr::SimConfig{} : psr::read_sim_config(o.config);
  if (o.seed) cfg.seed = *o.seed;

  psr::ErrorInjection inj{o.omit, o.incorrect, {}};
  for (const auto& s : o.swaps) {
    const auto comma = s.find(',');
    if (comma == std::string::npos || s.find(',', comma + 1) != std::string::npos) {
      throw InputError("--swap expects two comma-separated action ids, got '" + s + "'");
    }
    inj.swaps.emplace_back(s.substr(0, comma), s.substr(comma + 1));
  }
  if (auto d = psr::validate_injection(inj, spec); !d.empty()) throw InputError(d.front().message);

  const auto id = o.recording_id.empty() ? "sim_" + std::to_string(cfg.seed) : o.recording_id;
  const auto scenario = psr::simulate(spec, inj, cfg, id);
  psr::write_scenario(o.out_dir, scenario, spec, cfg, inj);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Procedure step recognition toolkit", "psrkit"};
  app.require_subcommand(1);

  std::string spec_ref;
  std::string format;
  std::string out_path;

  auto* validate = app.add_subcommand("validate", "Check files against their formats");
  std::vector<std::string> paths;
  validate->add_option("paths", paths, "Files to check")->required();
  validate->add_option("--spec", spec_ref, "Procedure file or bundled id");

  auto* run = app.add_subcommand("run", "Run a baseline recognizer over a detection stream");
  RunOptions run_opts;
  run->add_option("--baseline", run_opts.baseline, "b1, b2 or b3")->required();
  run->add_option("--spec", run_opts.spec, "Procedure file or bundled id")->required();
  run->add_option("--stream", run_opts.stream, "Detection stream (JSONL)")->required();
  run->add_option("--out", run_opts.out, "Predicted step file")->required();
  run->add_option("--threshold", run_opts.threshold,
                  "Detection confidence threshold (b1) or accumulation threshold (b2, b3)");
  run->add_option("--decay", run_opts.decay, "Confidence decay for b2/b3");
  run->add_option("--recording-id", run_opts.recording_id, "Defaults to the stream's recording id");

  auto* eval = app.add_subcommand("eval", "Score one prediction against its ground truth");
  std::string gt, pred;
  eval->add_option("--spec", spec_ref, "Procedure file or bundled id")->required();
  eval->add_option("--gt", gt, "Ground-truth step file")->required();
  eval->add_option("--pred", pred, "Predicted step file")->required();
  eval->add_option("--out", out_path, "Report path (stdout if omitted)");
  eval->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic recording");
  SimulateOptions sim_opts;
  sim->add_option("--spec", sim_opts.spec, "Procedure file or bundled id")->required();
  sim->add_option("--seed", sim_opts.seed, "Overrides the config seed");
  sim->add_option("--config", sim_opts.config, "Simulation config (JSON)");
  sim->add_option("--out-dir", sim_opts.out_dir, "Output directory")->required();
  sim->add_option("--omit", sim_opts.omit, "Actions to skip")->delimiter(',');
  sim->add_option("--incorrect", sim_opts.incorrect, "Actions completed incorrectly")->delimiter(',');
  sim->add_option("--swap", sim_opts.swaps, "Exchange two actions in the order: a,b (repeatable)");
  sim->add_option("--recording-id", sim_opts.recording_id, "Defaults to sim_<seed>");

  auto* bench = app.add_subcommand("bench", "Score a directory of <id>.gt.jsonl / <id>.pred.jsonl pairs");
  std::string runs;
  bench->add_option("--spec", spec_ref, "Procedure file or bundled id")->required();
  bench->add_option("--runs", runs, "Directory of recording pairs")->required();
  bench->add_option("--out", out_path, "Report path (stdout if omitted)");
  bench->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::vector<std::string> argv_store{"psrkit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*validate) return cmd_validate(paths, spec_ref, err);
    if (*run) return cmd_run(run_opts);
    if (*eval) return cmd_eval(spec_ref, gt, pred, out_path, format, out);
    if (*sim) return cmd_simulate(sim_opts);
    if (*bench) return cmd_bench(spec_ref, runs, out_path, format, out);
  } catch (const psr::Error& e) {
    err << "psrkit: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "psrkit: internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInternalError;
}

}  // namespace psrkit

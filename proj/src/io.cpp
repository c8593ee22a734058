#include "psr/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace psr {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

std::string located(const std::string& source, std::size_t line, const std::string& message) {
  if (line == 0) return source + ": " + message;
  return source + ":" + std::to_string(line) + ": " + message;
}

// Where a value being decoded came from; every decoding failure goes through fail().
struct Where {
  const std::string& source;
  std::size_t line;

  [[noreturn]] void fail(const std::string& message) const { throw FormatError(source, line, message); }
};

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const Where& at) {
  for (const auto& [key, _] : obj.items()) {
    if (std::ranges::find(allowed, std::string_view(key)) == allowed.end()) at.fail("unknown field '" + key + "'");
  }
}

const json& require(const json& obj, const char* key, const Where& at) {
  auto it = obj.find(key);
  if (it == obj.end()) at.fail(std::string("missing field '") + key + "'");
  return *it;
}

double number_field(const json& obj, const char* key, const Where& at) {
  const json& v = require(obj, key, at);
  if (!v.is_number()) at.fail(std::string("field '") + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) at.fail(std::string("field '") + key + "' must be finite");
  return d;
}

std::int64_t frame_field(const json& obj, const char* key, const Where& at) {
  const json& v = require(obj, key, at);
  if (v.is_number_unsigned()) {
    if (v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) at.fail("frame index out of range");
    return static_cast<std::int64_t>(v.get<std::uint64_t>());
  }
  if (v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) at.fail(std::string("field '") + key + "' must be non-negative");
    return v.get<std::int64_t>();
  }
  at.fail(std::string("field '") + key + "' must be a non-negative integer");
}

std::string string_field(const json& obj, const char* key, const Where& at) {
  const json& v = require(obj, key, at);
  if (!v.is_string()) at.fail(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

AssemblyState state_field(const json& obj, const char* key, std::size_t components, const Where& at) {
  const auto text = string_field(obj, key, at);
  try {
    return parse_state(text, components);
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    at.fail(e.what());
  }
}

void check_version(const json& obj, const Where& at) {
  const auto v = string_field(obj, "format_version", at);
  int major = 0, minor = 0, patch = 0;
  char tail = 0;
  std::istringstream in(v);
  char dot1 = 0, dot2 = 0;
  if (!(in >> major >> dot1 >> minor >> dot2 >> patch) || dot1 != '.' || dot2 != '.' || (in >> tail)) {
    at.fail("malformed format_version '" + v + "'");
  }
  if (major != 1) at.fail("unsupported format major version " + std::to_string(major));
}

FileManifest parse_manifest(const json& j, FileKind expected, const Where& at) {
  if (!j.is_object()) at.fail("manifest must be a JSON object");
  check_keys(j, {"format_version", "kind", "fps", "recording_id", "source"}, at);
  check_version(j, at);
  FileManifest m;
  m.format_version = string_field(j, "format_version", at);
  const auto kind = file_kind_from_string(string_field(j, "kind", at));
  if (!kind || *kind != expected) {
    at.fail("expected a '" + std::string(to_string(expected)) + "' file, found kind '" +
            j["kind"].get<std::string>() + "'");
  }
  m.kind = *kind;
  m.fps = number_field(j, "fps", at);
  if (!(m.fps > 0.0)) at.fail("fps must be positive");
  m.recording_id = string_field(j, "recording_id", at);
  if (j.contains("source")) {
    auto s = event_source_from_string(string_field(j, "source", at));
    if (!s) at.fail("unknown source '" + j["source"].get<std::string>() + "'");
    m.source = *s;
  }
  return m;
}

ojson manifest_json(const FileManifest& m, bool with_source) {
  ojson j;
  j["format_version"] = m.format_version;
  j["kind"] = std::string(to_string(m.kind));
  j["fps"] = m.fps;
  j["recording_id"] = m.recording_id;
  if (with_source) j["source"] = std::string(to_string(m.source));
  return j;
}

json parse_line(const std::string& line, const Where& at) {
  if (line.empty()) at.fail("empty line");
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) at.fail("malformed JSON record");
  if (!j.is_object()) at.fail("record must be a JSON object");
  return j;
}

// Document-level parse; syntax errors are located by line.
json parse_document(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw FormatError(source, line, "malformed JSON document");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string(), 0, "cannot open file for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string(), 0, "cannot open file");
  return in;
}

void finish(std::ostream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw FormatError(path.string(), 0, "write failed");
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

FormatError::FormatError(std::string source, std::size_t line, const std::string& message)
    : Error(located(source, line, message)), source_(std::move(source)), line_(line), detail_(message) {}

std::string_view to_string(FileKind k) {
  switch (k) {
    case FileKind::Stream: return "stream";
    case FileKind::GroundTruth: return "ground_truth";
    case FileKind::Procedure: return "procedure";
    case FileKind::Scenario: return "scenario";
    case FileKind::Report: return "report";
    case FileKind::SimConfig: return "sim_config";
  }
  return "?";
}

std::optional<FileKind> file_kind_from_string(std::string_view text) {
  for (auto k : {FileKind::Stream, FileKind::GroundTruth, FileKind::Procedure, FileKind::Scenario, FileKind::Report,
                 FileKind::SimConfig}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

// --- streams -----------------------------------------------------------------

StreamReader::StreamReader(std::istream& in, std::string source_name, std::size_t components)
    : in_(in), source_(std::move(source_name)), components_(components) {
  std::string line;
  if (!std::getline(in_, line)) throw FormatError(source_, 1, "missing manifest line");
  line_ = 1;
  Where at{source_, line_};
  manifest_ = parse_manifest(parse_line(line, at), FileKind::Stream, at);
}

std::optional<DetectionFrame> StreamReader::next() {
  std::string line;
  if (!std::getline(in_, line)) return std::nullopt;
  ++line_;
  Where at{source_, line_};
  const json j = parse_line(line, at);
  check_keys(j, {"frame", "detections"}, at);

  DetectionFrame frame;
  frame.frame = frame_field(j, "frame", at);
  if (last_frame_ && frame.frame <= *last_frame_) {
    at.fail("frame " + std::to_string(frame.frame) + " does not follow frame " + std::to_string(*last_frame_));
  }
  last_frame_ = frame.frame;
  frame.time_s = static_cast<double>(frame.frame) / manifest_.fps;

  const json& dets = require(j, "detections", at);
  if (!dets.is_array()) at.fail("field 'detections' must be an array");
  frame.detections.reserve(dets.size());
  for (const auto& d : dets) {
    if (!d.is_object()) at.fail("detection must be a JSON object");
    check_keys(d, {"state", "confidence", "box"}, at);
    Detection det;
    if (components_ == 0) {
      const auto text = string_field(d, "state", at);
      // first detection fixes the state length for the rest of the file
      components_ = text.find(',') == std::string::npos
                        ? text.size()
                        : static_cast<std::size_t>(std::ranges::count(text, ',')) + 1;
    }
    det.state = state_field(d, "state", components_, at);
    det.confidence = number_field(d, "confidence", at);
    if (det.confidence < 0.0 || det.confidence > 1.0) {
      at.fail("confidence " + format_double(det.confidence) + " outside [0, 1]");
    }
    if (d.contains("box")) {
      const json& b = d["box"];
      if (!b.is_array() || b.size() != 4) at.fail("box must be an array of four numbers");
      double v[4];
      for (std::size_t i = 0; i < 4; ++i) {
        if (!b[i].is_number()) at.fail("box must be an array of four numbers");
        v[i] = b[i].get<double>();
        if (!(v[i] >= 0.0 && v[i] <= 1.0)) at.fail("box coordinates must lie in [0, 1]");
      }
      if (v[0] > v[2] || v[1] > v[3]) at.fail("box corners out of order");
      det.box = Box{v[0], v[1], v[2], v[3]};
    }
    frame.detections.push_back(std::move(det));
  }
  return frame;
}

std::pair<FileManifest, std::vector<DetectionFrame>> read_stream(std::istream& in, std::string source_name,
                                                                 std::size_t components) {
  StreamReader reader(in, std::move(source_name), components);
  std::vector<DetectionFrame> frames;
  while (auto f = reader.next()) frames.push_back(std::move(*f));
  return {reader.manifest(), std::move(frames)};
}

std::pair<FileManifest, std::vector<DetectionFrame>> read_stream(const std::filesystem::path& path,
                                                                 std::size_t components) {
  auto in = open_in(path);
  return read_stream(in, path.string(), components);
}

void write_stream(std::ostream& out, const FileManifest& manifest, std::span<const DetectionFrame> frames) {
  FileManifest m = manifest;
  m.kind = FileKind::Stream;
  out << manifest_json(m, false).dump() << '\n';
  for (const auto& f : frames) {
    ojson line;
    line["frame"] = f.frame;
    ojson dets = ojson::array();
    for (const auto& d : f.detections) {
      ojson jd;
      jd["state"] = serialize_state(d.state);
      jd["confidence"] = d.confidence;
      if (d.box) jd["box"] = {d.box->x0, d.box->y0, d.box->x1, d.box->y1};
      dets.push_back(std::move(jd));
    }
    line["detections"] = std::move(dets);
    out << line.dump() << '\n';
  }
}

void write_stream(const std::filesystem::path& path, const FileManifest& manifest,
                  std::span<const DetectionFrame> frames) {
  auto out = open_out(path);
  write_stream(out, manifest, frames);
  finish(out, path);
}

// --- step sequences ------------------------------------------------------------

StepSequence read_ground_truth(std::istream& in, std::string source_name, const ProcedureSpec& spec,
                               LabelView view) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(source_name, 1, "missing manifest line");
  std::size_t lineno = 1;
  const FileManifest m = parse_manifest(parse_line(line, {source_name, lineno}), FileKind::GroundTruth,
                                        {source_name, lineno});

  StepSequence seq;
  seq.recording_id = m.recording_id;
  seq.fps = m.fps;

  std::optional<AssemblyState> prev;
  std::int64_t prev_frame = 0;
  std::unordered_set<std::string> seen;
  std::vector<std::size_t> event_lines;
  while (std::getline(in, line)) {
    ++lineno;
    Where at{source_name, lineno};
    const json j = parse_line(line, at);
    check_keys(j, {"frame", "state", "confidence", "source"}, at);
    const std::int64_t frame = frame_field(j, "frame", at);
    AssemblyState state = state_field(j, "state", spec.component_count(), at);
    double confidence = 1.0;
    if (j.contains("confidence")) {
      confidence = number_field(j, "confidence", at);
      if (confidence < 0.0) at.fail("confidence must be non-negative");
    }
    EventSource source = m.source;
    if (j.contains("source")) {
      auto s = event_source_from_string(string_field(j, "source", at));
      if (!s) at.fail("unknown source");
      source = *s;
    }

    if (!prev) {
      seq.initial_state = state;
    } else {
      if (frame < prev_frame) {
        at.fail("frame " + std::to_string(frame) + " precedes frame " + std::to_string(prev_frame));
      }
      for (const auto& change : diff_states(*prev, state)) {
        if (view == LabelView::CorrectOnly && !spec.find_action(change.component, change.transition)) continue;
        StepEvent e;
        e.action_id = action_id_for(spec, change.component, change.transition);
        e.component = change.component;
        e.transition = change.transition;
        e.frame = frame;
        e.time_s = static_cast<double>(frame) / seq.fps;
        e.confidence = confidence;
        e.source = source;
        if (!seen.insert(e.action_id).second) at.fail("duplicate completion of action '" + e.action_id + "'");
        seq.events.push_back(std::move(e));
      }
    }
    prev = std::move(state);
    prev_frame = frame;
  }
  if (!prev) throw FormatError(source_name, lineno, "missing initial state record");

  std::ranges::stable_sort(seq.events, [](const StepEvent& a, const StepEvent& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.component < b.component;
  });
  return seq;
}

StepSequence read_ground_truth(const std::filesystem::path& path, const ProcedureSpec& spec, LabelView view) {
  auto in = open_in(path);
  return read_ground_truth(in, path.string(), spec, view);
}

void write_ground_truth(std::ostream& out, const StepSequence& seq, const ProcedureSpec& spec) {
  check_sequence(seq);
  FileManifest m;
  m.kind = FileKind::GroundTruth;
  m.fps = seq.fps;
  m.recording_id = seq.recording_id;
  m.source = seq.events.empty() ? EventSource::GroundTruth : seq.events.front().source;
  out << manifest_json(m, true).dump() << '\n';

  AssemblyState state = seq.initial_state.value_or(spec.initial_state);
  if (state.size() != spec.component_count()) throw Error("initial state does not match the procedure");
  {
    ojson line;
    line["frame"] = 0;
    line["state"] = serialize_state(state);
    out << line.dump() << '\n';
  }
  for (const auto& e : seq.events) {
    if (e.component >= state.size()) throw Error("event '" + e.action_id + "' references an unknown component");
    if (state[e.component] == target_status(e.transition)) {
      throw Error("event '" + e.action_id + "' does not change the assembly state");
    }
    state.set(e.component, target_status(e.transition));
    ojson line;
    line["frame"] = e.frame;
    line["state"] = serialize_state(state);
    if (e.confidence != 1.0) line["confidence"] = e.confidence;
    if (e.source != m.source) line["source"] = std::string(to_string(e.source));
    out << line.dump() << '\n';
  }
}

void write_ground_truth(const std::filesystem::path& path, const StepSequence& seq, const ProcedureSpec& spec) {
  std::ostringstream buf;
  write_ground_truth(buf, seq, spec);
  write_text_file(path, buf.str());
}

// --- procedures ------------------------------------------------------------------

ProcedureSpec parse_procedure(std::string_view text, std::string source_name) {
  const json doc = parse_document(text, source_name);
  const Where at{source_name, 0};
  if (!doc.is_object()) at.fail("procedure must be a JSON object");
  check_keys(doc, {"format_version", "kind", "id", "components", "initial_state", "actions"}, at);
  check_version(doc, at);
  if (string_field(doc, "kind", at) != "procedure") at.fail("expected kind 'procedure'");

  ProcedureSpec spec;
  spec.id = string_field(doc, "id", at);
  const json& comps = require(doc, "components", at);
  if (!comps.is_array()) at.fail("'components' must be an array");
  for (const auto& c : comps) {
    if (!c.is_object()) at.fail("component must be an object");
    check_keys(c, {"index", "name"}, at);
    spec.components.push_back({static_cast<std::size_t>(frame_field(c, "index", at)), string_field(c, "name", at)});
  }
  spec.initial_state = state_field(doc, "initial_state", spec.components.size(), at);

  const json& actions = require(doc, "actions", at);
  if (!actions.is_array()) at.fail("'actions' must be an array");
  for (const auto& a : actions) {
    if (!a.is_object()) at.fail("action must be an object");
    check_keys(a, {"id", "component", "transition", "prerequisites", "description"}, at);
    ProceduralAction act;
    act.id = string_field(a, "id", at);
    act.component = static_cast<std::size_t>(frame_field(a, "component", at));
    auto t = transition_from_string(string_field(a, "transition", at));
    if (!t) at.fail("action '" + act.id + "' has an unknown transition");
    act.transition = *t;
    if (a.contains("prerequisites")) {
      const json& p = a["prerequisites"];
      if (!p.is_array()) at.fail("'prerequisites' must be an array");
      for (const auto& id : p) {
        if (!id.is_string()) at.fail("prerequisite ids must be strings");
        act.prerequisites.push_back(id.get<std::string>());
      }
    }
    if (a.contains("description")) act.description = string_field(a, "description", at);
    spec.actions.push_back(std::move(act));
  }

  if (auto diags = validate_procedure(spec); !diags.empty()) {
    std::string msg = "invalid procedure";
    for (const auto& d : diags) msg += "; " + d.code + ": " + d.message;
    at.fail(msg);
  }
  return spec;
}

std::string format_procedure(const ProcedureSpec& spec) {
  ojson doc;
  doc["format_version"] = std::string(kFormatVersion);
  doc["kind"] = "procedure";
  doc["id"] = spec.id;
  ojson comps = ojson::array();
  for (const auto& c : spec.components) comps.push_back({{"index", c.index}, {"name", c.name}});
  doc["components"] = std::move(comps);
  doc["initial_state"] = serialize_state(spec.initial_state);
  ojson actions = ojson::array();
  for (const auto& a : spec.actions) {
    ojson ja;
    ja["id"] = a.id;
    ja["component"] = a.component;
    ja["transition"] = std::string(to_string(a.transition));
    ja["prerequisites"] = a.prerequisites;
    ja["description"] = a.description;
    actions.push_back(std::move(ja));
  }
  doc["actions"] = std::move(actions);
  return doc.dump(2) + "\n";
}

ProcedureSpec read_procedure(const std::filesystem::path& path) {
  return parse_procedure(read_text_file(path), path.string());
}

void write_procedure(const std::filesystem::path& path, const ProcedureSpec& spec) {
  write_text_file(path, format_procedure(spec));
}

// --- sim config & scenarios -----------------------------------------------------

SimConfig parse_sim_config(std::string_view text, std::string source_name) {
  const json doc = parse_document(text, source_name);
  const Where at{source_name, 0};
  if (!doc.is_object()) at.fail("config must be a JSON object");
  check_keys(doc, {"format_version", "kind", "seed", "fps", "dwell_mean_s", "dwell_jitter_s", "detect_prob",
                   "conf_mean", "conf_spread", "misclass_prob", "error_fp_rate"},
             at);
  if (doc.contains("format_version")) check_version(doc, at);
  if (doc.contains("kind") && string_field(doc, "kind", at) != "sim_config") at.fail("expected kind 'sim_config'");

  SimConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) at.fail("'seed' must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  auto opt = [&](const char* key, double& field) {
    if (doc.contains(key)) field = number_field(doc, key, at);
  };
  opt("fps", cfg.fps);
  opt("dwell_mean_s", cfg.dwell_mean_s);
  opt("dwell_jitter_s", cfg.dwell_jitter_s);
  opt("detect_prob", cfg.detect_prob);
  opt("conf_mean", cfg.conf_mean);
  opt("conf_spread", cfg.conf_spread);
  opt("misclass_prob", cfg.misclass_prob);
  opt("error_fp_rate", cfg.error_fp_rate);
  if (auto diags = validate_sim_config(cfg); !diags.empty()) at.fail(diags.front().message);
  return cfg;
}

namespace {

ojson sim_config_json(const SimConfig& cfg) {
  ojson j;
  j["format_version"] = std::string(kFormatVersion);
  j["kind"] = "sim_config";
  j["seed"] = cfg.seed;
  j["fps"] = cfg.fps;
  j["dwell_mean_s"] = cfg.dwell_mean_s;
  j["dwell_jitter_s"] = cfg.dwell_jitter_s;
  j["detect_prob"] = cfg.detect_prob;
  j["conf_mean"] = cfg.conf_mean;
  j["conf_spread"] = cfg.conf_spread;
  j["misclass_prob"] = cfg.misclass_prob;
  j["error_fp_rate"] = cfg.error_fp_rate;
  return j;
}

}  // namespace

std::string format_sim_config(const SimConfig& cfg) { return sim_config_json(cfg).dump(2) + "\n"; }

SimConfig read_sim_config(const std::filesystem::path& path) {
  return parse_sim_config(read_text_file(path), path.string());
}

ScenarioFiles write_scenario(const std::filesystem::path& dir, const Scenario& scenario, const ProcedureSpec& spec,
                             const SimConfig& cfg, const ErrorInjection& inj) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw FormatError(dir.string(), 0, "cannot create directory");

  ScenarioFiles files{dir / "stream.jsonl", dir / "ground_truth.jsonl", dir / "scenario.json"};
  FileManifest m;
  m.kind = FileKind::Stream;
  m.fps = cfg.fps;
  m.recording_id = scenario.recording_id;
  write_stream(files.stream, m, scenario.stream);
  write_ground_truth(files.ground_truth, scenario.ground_truth, spec);

  ojson doc;
  doc["format_version"] = std::string(kFormatVersion);
  doc["kind"] = "scenario";
  doc["recording_id"] = scenario.recording_id;
  doc["fps"] = cfg.fps;
  doc["procedure"] = spec.id;
  doc["stream"] = files.stream.filename().string();
  doc["ground_truth"] = files.ground_truth.filename().string();
  doc["has_errors"] = has_procedure_errors(scenario.ground_truth, spec);
  doc["end_frame"] = scenario.timeline.end_frame;
  ojson timeline = ojson::array();
  for (const auto& s : scenario.timeline.segments) {
    timeline.push_back({{"frame", s.frame}, {"state", serialize_state(s.state)}});
  }
  doc["timeline"] = std::move(timeline);
  ojson injection;
  injection["omit"] = inj.omit;
  injection["incorrect"] = inj.incorrect;
  ojson swaps = ojson::array();
  for (const auto& [a, b] : inj.swaps) swaps.push_back({a, b});
  injection["swaps"] = std::move(swaps);
  doc["injection"] = std::move(injection);
  doc["config"] = sim_config_json(cfg);
  write_text_file(files.manifest, doc.dump(2) + "\n");
  return files;
}

namespace {

std::vector<std::string> id_list(const json& obj, const char* key, const Where& at) {
  std::vector<std::string> out;
  const json& v = require(obj, key, at);
  if (!v.is_array()) at.fail(std::string("'") + key + "' must be an array");
  for (const auto& id : v) {
    if (!id.is_string()) at.fail(std::string("'") + key + "' must hold action ids");
    out.push_back(id.get<std::string>());
  }
  return out;
}

}  // namespace

ScenarioManifest parse_scenario_manifest(std::string_view text, std::string source_name) {
  const json doc = parse_document(text, source_name);
  const Where at{source_name, 0};
  if (!doc.is_object()) at.fail("scenario must be a JSON object");
  check_keys(doc, {"format_version", "kind", "recording_id", "fps", "procedure", "stream", "ground_truth",
                   "has_errors", "end_frame", "timeline", "injection", "config"},
             at);
  check_version(doc, at);
  if (string_field(doc, "kind", at) != "scenario") at.fail("expected kind 'scenario'");

  ScenarioManifest m;
  m.recording_id = string_field(doc, "recording_id", at);
  m.procedure = string_field(doc, "procedure", at);
  m.fps = number_field(doc, "fps", at);
  m.stream = string_field(doc, "stream", at);
  m.ground_truth = string_field(doc, "ground_truth", at);
  const json& e = require(doc, "has_errors", at);
  if (!e.is_boolean()) at.fail("'has_errors' must be a boolean");
  m.has_errors = e.get<bool>();
  m.timeline.end_frame = frame_field(doc, "end_frame", at);

  const json& tl = require(doc, "timeline", at);
  if (!tl.is_array() || tl.empty()) at.fail("'timeline' must be a non-empty array");
  std::size_t components = 0;
  for (const auto& seg : tl) {
    if (!seg.is_object()) at.fail("timeline segment must be an object");
    check_keys(seg, {"frame", "state"}, at);
    if (components == 0) {
      const auto s = string_field(seg, "state", at);
      components = static_cast<std::size_t>(std::ranges::count(s, ',')) + 1;
    }
    m.timeline.segments.push_back({frame_field(seg, "frame", at), state_field(seg, "state", components, at)});
  }

  const json& inj = require(doc, "injection", at);
  if (!inj.is_object()) at.fail("'injection' must be an object");
  check_keys(inj, {"omit", "incorrect", "swaps"}, at);
  m.injection.omit = id_list(inj, "omit", at);
  m.injection.incorrect = id_list(inj, "incorrect", at);
  const json& swaps = require(inj, "swaps", at);
  if (!swaps.is_array()) at.fail("'swaps' must be an array");
  for (const auto& pair : swaps) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      at.fail("each swap must be a pair of action ids");
    }
    m.injection.swaps.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
  }

  const json& cfg = require(doc, "config", at);
  m.config = parse_sim_config(cfg.dump(), source_name);
  return m;
}

ScenarioManifest read_scenario_manifest(const std::filesystem::path& path) {
  return parse_scenario_manifest(read_text_file(path), path.string());
}

// --- reports -------------------------------------------------------------------------

ReportAggregates aggregate_all(std::span<const MetricsReport> reports) {
  ReportAggregates out;
  if (reports.empty()) return out;
  out.all = aggregate_reports(reports, ReportSubset::All);
  if (std::ranges::any_of(reports, &MetricsReport::has_errors)) {
    out.errors_only = aggregate_reports(reports, ReportSubset::ErrorsOnly);
  }
  return out;
}

namespace {

ojson report_json(const MetricsReport& r) {
  ojson j;
  j["recording_id"] = r.recording_id;
  j["n"] = r.recordings;
  j["pos"] = r.pos;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["tau_s"] = r.tau_s ? ojson(*r.tau_s) : ojson(nullptr);
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["has_errors"] = r.has_errors;
  return j;
}

MetricsReport report_from_json(const json& j, const Where& at) {
  if (!j.is_object()) at.fail("report entry must be an object");
  MetricsReport r;
  r.recording_id = string_field(j, "recording_id", at);
  r.recordings = static_cast<std::size_t>(frame_field(j, "n", at));
  r.pos = number_field(j, "pos", at);
  r.precision = number_field(j, "precision", at);
  r.recall = number_field(j, "recall", at);
  r.f1 = number_field(j, "f1", at);
  if (!require(j, "tau_s", at).is_null()) r.tau_s = number_field(j, "tau_s", at);
  r.tp = static_cast<std::size_t>(frame_field(j, "tp", at));
  r.fp = static_cast<std::size_t>(frame_field(j, "fp", at));
  r.fn = static_cast<std::size_t>(frame_field(j, "fn", at));
  const json& e = require(j, "has_errors", at);
  if (!e.is_boolean()) at.fail("'has_errors' must be a boolean");
  r.has_errors = e.get<bool>();
  return r;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const MetricsReport& r) {
  std::string row = csv_field(r.recording_id);
  for (double v : {r.pos, r.precision, r.recall, r.f1}) row += "," + format_double(v);
  row += "," + (r.tau_s ? format_double(*r.tau_s) : std::string());
  row += "," + std::to_string(r.tp) + "," + std::to_string(r.fp) + "," + std::to_string(r.fn);
  row += r.has_errors ? ",true" : ",false";
  return row;
}

}  // namespace

std::string format_report(std::span<const MetricsReport> reports, const ReportAggregates& aggregates,
                          ReportFormat format) {
  if (format == ReportFormat::Json) {
    ojson doc;
    doc["format_version"] = std::string(kFormatVersion);
    doc["kind"] = "report";
    ojson recs = ojson::array();
    for (const auto& r : reports) recs.push_back(report_json(r));
    doc["recordings"] = std::move(recs);
    ojson agg;
    agg["all"] = aggregates.all ? report_json(*aggregates.all) : ojson(nullptr);
    agg["errors_only"] = aggregates.errors_only ? report_json(*aggregates.errors_only) : ojson(nullptr);
    doc["aggregates"] = std::move(agg);
    return doc.dump(2) + "\n";
  }

  std::string out = "recording_id,pos,precision,recall,f1,tau_s,tp,fp,fn,has_errors\n";
  for (const auto& r : reports) out += csv_row(r) + "\n";
  out += aggregates.all ? csv_row(*aggregates.all) + "\n" : "ALL,,,,,,,,,\n";
  out += aggregates.errors_only ? csv_row(*aggregates.errors_only) + "\n" : "ERRORS_ONLY,,,,,,,,,\n";
  return out;
}

void write_report(const std::filesystem::path& path, std::span<const MetricsReport> reports,
                  const ReportAggregates& aggregates, ReportFormat format) {
  write_text_file(path, format_report(reports, aggregates, format));
}

ParsedReport parse_report_json(std::string_view text, std::string source_name) {
  const json doc = parse_document(text, source_name);
  const Where at{source_name, 0};
  if (!doc.is_object()) at.fail("report must be a JSON object");
  check_version(doc, at);
  if (string_field(doc, "kind", at) != "report") at.fail("expected kind 'report'");
  ParsedReport out;
  const json& recs = require(doc, "recordings", at);
  if (!recs.is_array()) at.fail("'recordings' must be an array");
  for (const auto& r : recs) out.recordings.push_back(report_from_json(r, at));
  const json& agg = require(doc, "aggregates", at);
  if (!agg.is_object()) at.fail("'aggregates' must be an object");
  if (!require(agg, "all", at).is_null()) out.aggregates.all = report_from_json(agg["all"], at);
  if (!require(agg, "errors_only", at).is_null()) out.aggregates.errors_only = report_from_json(agg["errors_only"], at);
  return out;
}

// --- helpers -----------------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  auto out = open_out(path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  finish(out, path);
}

FileKind detect_file_kind(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string first;
  std::getline(in, first);
  json j = json::parse(first, nullptr, false);
  if (j.is_discarded()) {
    const auto text = read_text_file(path);
    j = parse_document(text, path.string());
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw FormatError(path.string(), 1, "no 'kind' field in manifest");
  }
  auto kind = file_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw FormatError(path.string(), 1, "unknown file kind '" + j["kind"].get<std::string>() + "'");
  return *kind;
}

}  // namespace psr

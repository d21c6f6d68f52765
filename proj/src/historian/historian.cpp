// Copyright 2026 The crane-twin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "historian/historian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "common/util.hpp"
#include "io/codec.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cranetwin::historian {

std::string_view to_string(RunStatus status) noexcept {
  switch (status) {
    case RunStatus::running: return "running";
    case RunStatus::completed: return "completed";
    case RunStatus::aborted: return "aborted";
  }
  return "running";
}

RunStatus parse_run_status(std::string_view text) {
  if (text == "running") return RunStatus::running;
  if (text == "completed") return RunStatus::completed;
  if (text == "aborted") return RunStatus::aborted;
  fail(ErrorCode::domain, "unknown run status '" + std::string(text) + "'");
}

void LoggerConfig::validate() const {
  require(writeout_decimation >= 1, ErrorCode::domain, "writeout_decimation must be >= 1");
  require(std::isfinite(buffer_flush_period) && buffer_flush_period > 0.0, ErrorCode::domain,
          "buffer_flush_period must be > 0");
}

bool is_valid_run_id(const std::string& run_id) {
  if (run_id.empty() || run_id.size() > 128 || run_id == "." || run_id == "..") return false;
  return std::all_of(run_id.begin(), run_id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '-' || c == '_' || c == '.';
  });
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::storage, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::storage, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::storage, "cannot replace " + path.string() + ": " + ec.message());
}

void append_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::storage, "cannot open " + path.string());
  out << content;
  out.flush();
  if (!out) fail(ErrorCode::storage, "write failed for " + path.string());
}

// Complete lines only; a trailing fragment without '\n' is ignored.
std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<std::string> lines;
  if (!in) return lines;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  std::size_t start = 0;
  while (true) {
    const std::size_t nl = data.find('\n', start);
    if (nl == std::string::npos) break;
    if (nl > start) lines.push_back(data.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string header_line(const std::string& id, sim::TraceKind kind, double dt) {
  return json{{"header", true}, {"id", id}, {"kind", to_string(kind)}, {"dt", dt}}.dump() + "\n";
}

std::string sample_line(const model::CraneState& state) { return json(state).dump() + "\n"; }

}  // namespace

Historian::Historian(fs::path data_dir, LoggerConfig config)
    : data_dir_(std::move(data_dir)), config_(config) {
  config_.validate();
  std::error_code ec;
  fs::create_directories(data_dir_ / "runs", ec);
  fs::create_directories(data_dir_ / "live", ec);
  if (ec) fail(ErrorCode::storage, "cannot create data directory " + data_dir_.string());
  load_index();
}

Historian::~Historian() {
  try {
    flush();
  } catch (...) {
  }
}

LoggerConfig Historian::logger_config() const {
  std::lock_guard lock(mutex_);
  return config_;
}

void Historian::set_logger_config(const LoggerConfig& config) {
  config.validate();
  std::lock_guard lock(mutex_);
  config_ = config;
}

fs::path Historian::run_dir(const std::string& run_id) const {
  if (!is_valid_run_id(run_id)) fail(ErrorCode::not_found, "invalid run id '" + run_id + "'");
  return data_dir_ / "runs" / run_id;
}

void Historian::load_index() {
  for (const std::string& line : read_lines(data_dir_ / "runs" / "index.ndjson")) {
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception&) {
      continue;
    }
    const std::string kind = event.value("event", "");
    if (kind == "create") {
      RunRecord record = event.at("record").get<RunRecord>();
      if (!runs_.contains(record.run_id)) order_.push_back(record.run_id);
      runs_[record.run_id] = record;
    } else if (kind == "complete") {
      auto it = runs_.find(event.value("run_id", ""));
      if (it == runs_.end()) continue;
      it->second.status = parse_run_status(event.value("status", "completed"));
      it->second.completed_at = event.value("completed_at", "");
    }
  }
}

void Historian::append_index(const std::string& line) {
  append_file(data_dir_ / "runs" / "index.ndjson", line + "\n");
}

void Historian::write_manifest(const RunRecord& record) {
  write_atomic(run_dir(record.run_id) / "manifest.json", json(record).dump(2) + "\n");
}

std::string Historian::create_run(const RunRecord& record) {
  const fs::path dir = run_dir(record.run_id);
  std::lock_guard lock(mutex_);
  if (runs_.contains(record.run_id)) fail(ErrorCode::conflict, "run '" + record.run_id + "' already exists");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::storage, "cannot create " + dir.string());
  RunRecord stored = record;
  if (stored.started_at.empty()) stored.started_at = utc_now_iso();
  append_index(json{{"event", "create"}, {"record", stored}}.dump());
  write_manifest(stored);
  runs_[stored.run_id] = stored;
  order_.push_back(stored.run_id);
  return stored.run_id;
}

void Historian::complete_run(const std::string& run_id, RunStatus status) {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorCode::not_found, "unknown run '" + run_id + "'");
  if (auto s = measured_.find(run_id); s != measured_.end()) flush_stream(s->second);
  it->second.status = status;
  it->second.completed_at = utc_now_iso();
  append_index(json{{"event", "complete"},
                    {"run_id", run_id},
                    {"status", to_string(status)},
                    {"completed_at", *it->second.completed_at}}
                   .dump());
  write_manifest(it->second);
}

std::vector<RunRecord> Historian::list_runs() const {
  std::lock_guard lock(mutex_);
  std::vector<RunRecord> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(runs_.at(id));
  return out;
}

const RunRecord& Historian::find_run(const std::string& run_id) const {
  auto it = runs_.find(run_id);
  if (it == runs_.end()) fail(ErrorCode::not_found, "unknown run '" + run_id + "'");
  return it->second;
}

RunRecord Historian::get_run(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  return find_run(run_id);
}

bool Historian::has_run(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  return runs_.contains(run_id);
}

void Historian::open_measured(const std::string& run_id, double sample_period) {
  const fs::path path = run_dir(run_id) / "measured.ndjson";
  std::lock_guard lock(mutex_);
  find_run(run_id);
  Stream stream;
  stream.path = path;
  stream.decimation = config_.writeout_decimation;
  stream.last_flush = std::chrono::steady_clock::now();
  write_atomic(path, header_line(run_id, sim::TraceKind::measured,
                                 sample_period * static_cast<double>(stream.decimation)));
  measured_[run_id] = std::move(stream);
}

void Historian::offer(Stream& stream, const model::CraneState& state) {
  if (stream.offered++ % stream.decimation == 0) {
    stream.buffer += sample_line(state);
    ++stream.stored;
  }
  const auto now = std::chrono::steady_clock::now();
  if (std::chrono::duration<double>(now - stream.last_flush).count() >= config_.buffer_flush_period)
    flush_stream(stream);
}

void Historian::append_state(const std::string& run_id, const model::CraneState& state) {
  std::unique_lock lock(mutex_);
  auto it = measured_.find(run_id);
  if (it == measured_.end()) {
    lock.unlock();
    open_measured(run_id, 0.0);
    lock.lock();
    it = measured_.find(run_id);
  }
  offer(it->second, state);
}

void Historian::append_live(const model::CraneState& state, double sample_period) {
  const std::string day = utc_today();
  std::lock_guard lock(mutex_);
  auto it = live_.find(day);
  if (it == live_.end()) {
    for (auto& [d, s] : live_) flush_stream(s);
    live_.clear();
    Stream stream;
    stream.path = data_dir_ / "live" / (day + ".ndjson");
    stream.decimation = config_.writeout_decimation;
    stream.last_flush = std::chrono::steady_clock::now();
    if (!fs::exists(stream.path))
      append_file(stream.path, header_line("live-" + day, sim::TraceKind::measured,
                                           sample_period * static_cast<double>(stream.decimation)));
    it = live_.emplace(day, std::move(stream)).first;
  }
  offer(it->second, state);
}

std::size_t Historian::offered_count(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = measured_.find(run_id);
  return it == measured_.end() ? 0 : it->second.offered;
}

std::size_t Historian::stored_count(const std::string& run_id) const {
  std::lock_guard lock(mutex_);
  auto it = measured_.find(run_id);
  return it == measured_.end() ? 0 : it->second.stored;
}

void Historian::flush_stream(Stream& stream) {
  stream.last_flush = std::chrono::steady_clock::now();
  if (stream.buffer.empty()) return;
  append_file(stream.path, stream.buffer);
  stream.buffer.clear();
}

void Historian::flush() {
  std::lock_guard lock(mutex_);
  for (auto& [id, s] : measured_) flush_stream(s);
  for (auto& [day, s] : live_) flush_stream(s);
}

void Historian::write_trace(const std::string& run_id, const sim::Trace& trace) {
  const fs::path path = run_dir(run_id) / (std::string(to_string(trace.kind)) + ".ndjson");
  std::string content = header_line(trace.id.empty() ? run_id : trace.id, trace.kind, trace.dt);
  for (const auto& s : trace.samples) content += sample_line(s);
  std::lock_guard lock(mutex_);
  find_run(run_id);
  write_atomic(path, content);
}

bool Historian::has_trace(const std::string& run_id, sim::TraceKind kind) const {
  if (!is_valid_run_id(run_id)) return false;
  return fs::exists(run_dir(run_id) / (std::string(to_string(kind)) + ".ndjson"));
}

sim::Trace Historian::query_trace(const std::string& run_id, sim::TraceKind kind, double t_from,
                                  double t_to) const {
  const fs::path path = run_dir(run_id) / (std::string(to_string(kind)) + ".ndjson");
  {
    std::lock_guard lock(mutex_);
    find_run(run_id);
  }
  if (!fs::exists(path))
    fail(ErrorCode::not_found,
         "run '" + run_id + "' has no " + std::string(to_string(kind)) + " trace");

  sim::Trace trace;
  trace.id = run_id;
  trace.kind = kind;
  for (const std::string& line : read_lines(path)) {
    const json j = json::parse(line);
    if (j.contains("header")) {
      trace.dt = j.value("dt", 0.0);
      continue;
    }
    const auto state = j.get<model::CraneState>();
    if (state.t >= t_from && state.t <= t_to) trace.samples.push_back(state);
  }
  return trace;
}

void Historian::store_report(const std::string& run_id, validation::ValidationReport report) {
  const fs::path path = run_dir(run_id) / "validation.json";
  std::lock_guard lock(mutex_);
  find_run(run_id);
  report.run_id = run_id;
  if (report.created_at.empty()) report.created_at = utc_now_iso();
  if (fs::exists(path)) {
    std::string previous_created;
    try {
      std::ifstream in(path);
      previous_created = json::parse(in).value("created_at", "");
    } catch (const std::exception&) {
    }
    if (!report.notes.empty()) report.notes += "; ";
    report.notes += "replaces report created at " + previous_created;
  }
  write_atomic(path, json(report).dump(2) + "\n");
}

validation::ValidationReport Historian::query_report(const std::string& run_id) const {
  const fs::path path = run_dir(run_id) / "validation.json";
  {
    std::lock_guard lock(mutex_);
    find_run(run_id);
  }
  std::ifstream in(path);
  if (!in) fail(ErrorCode::not_found, "run '" + run_id + "' has no validation report");
  try {
    return json::parse(in).get<validation::ValidationReport>();
  } catch (const json::exception& e) {
    fail(ErrorCode::storage, "corrupt validation report for '" + run_id + "': " + e.what());
  }
}

bool Historian::has_report(const std::string& run_id) const {
  if (!is_valid_run_id(run_id)) return false;
  return fs::exists(run_dir(run_id) / "validation.json");
}

}  // namespace cranetwin::historian

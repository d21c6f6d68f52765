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

#pragma once

// Append-only, plain-file time-series store.
//
//   <data_dir>/runs/index.ndjson           run lifecycle events, append-only
//   <data_dir>/runs/<run_id>/manifest.json latest RunRecord
//   <data_dir>/runs/<run_id>/<kind>.ndjson header line, then one CraneState per line
//   <data_dir>/runs/<run_id>/validation.json
//   <data_dir>/live/<yyyy-mm-dd>.ndjson    idle telemetry
//
// Readers only consume '\n'-terminated lines, so a sample is either fully
// visible or not at all.

#include <chrono>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "historian/types.hpp"
#include "model/crane_model.hpp"
#include "sim/simulation.hpp"
#include "validation/report.hpp"

namespace cranetwin::historian {

class Historian {
 public:
  explicit Historian(std::filesystem::path data_dir, LoggerConfig config = {});
  ~Historian();
  Historian(const Historian&) = delete;
  Historian& operator=(const Historian&) = delete;

  const std::filesystem::path& data_dir() const { return data_dir_; }

  LoggerConfig logger_config() const;
  // Applies to streams opened afterwards.
  void set_logger_config(const LoggerConfig& config);

  // Throws Error(conflict) on a duplicate id.
  std::string create_run(const RunRecord& record);
  // Throws Error(not_found) for an unknown id. Flushes the run's streams.
  void complete_run(const std::string& run_id, RunStatus status);
  std::vector<RunRecord> list_runs() const;
  RunRecord get_run(const std::string& run_id) const;
  bool has_run(const std::string& run_id) const;

  // Starts the measured stream of a run; sample_period is the spacing of the
  // states that will be offered to append_state.
  void open_measured(const std::string& run_id, double sample_period);
  // Retains every writeout_decimation-th offered sample.
  void append_state(const std::string& run_id, const model::CraneState& state);
  void append_live(const model::CraneState& state, double sample_period);
  // Number of samples offered / retained for a run's measured stream.
  std::size_t offered_count(const std::string& run_id) const;
  std::size_t stored_count(const std::string& run_id) const;

  void flush();

  // Replaces a whole trace file atomically.
  void write_trace(const std::string& run_id, const sim::Trace& trace);
  bool has_trace(const std::string& run_id, sim::TraceKind kind) const;

  // Samples with t_from <= t <= t_to, in time order.
  sim::Trace query_trace(const std::string& run_id, sim::TraceKind kind,
                         double t_from = -std::numeric_limits<double>::infinity(),
                         double t_to = std::numeric_limits<double>::infinity()) const;

  // Latest report wins; replacing an existing one is recorded in its notes.
  void store_report(const std::string& run_id, validation::ValidationReport report);
  validation::ValidationReport query_report(const std::string& run_id) const;
  bool has_report(const std::string& run_id) const;

  std::filesystem::path run_dir(const std::string& run_id) const;

 private:
  struct Stream {
    std::filesystem::path path;
    std::string buffer;
    std::size_t offered = 0;
    std::size_t stored = 0;
    std::size_t decimation = 1;
    std::chrono::steady_clock::time_point last_flush;
  };

  void load_index();
  void append_index(const std::string& line);
  void write_manifest(const RunRecord& record);
  void flush_stream(Stream& stream);
  void offer(Stream& stream, const model::CraneState& state);
  const RunRecord& find_run(const std::string& run_id) const;

  std::filesystem::path data_dir_;
  mutable std::mutex mutex_;
  LoggerConfig config_;
  std::map<std::string, RunRecord> runs_;
  std::vector<std::string> order_;
  std::map<std::string, Stream> measured_;
  std::map<std::string, Stream> live_;
};

// True when run_id is usable as a directory name.
bool is_valid_run_id(const std::string& run_id);

}  // namespace cranetwin::historian

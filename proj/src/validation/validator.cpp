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

#include "validation/validator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bus/topic.hpp"
#include "common/error.hpp"
#include "common/util.hpp"
#include "io/codec.hpp"
#include "validation/metrics.hpp"

namespace cranetwin::validation {

namespace {

constexpr double kTimeSlack = 1e-9;

double signal_of(const model::CraneState& s, Signal signal) {
  switch (signal) {
    case Signal::x: return s.x;
    case Signal::theta: return s.theta;
    case Signal::l: return s.l;
  }
  return 0.0;
}

// Linear interpolation of `signal` at time t; samples are time-ordered.
double interpolate(const std::vector<model::CraneState>& samples, double t, Signal signal) {
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const model::CraneState& s, double value) { return s.t < value; });
  if (it == samples.begin()) return signal_of(samples.front(), signal);
  if (it == samples.end()) return signal_of(samples.back(), signal);
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  // Grid points that coincide with a sample take it verbatim.
  if (hi.t - t <= kTimeSlack) return signal_of(hi, signal);
  if (t - lo.t <= kTimeSlack) return signal_of(lo, signal);
  const double frac = (t - lo.t) / (hi.t - lo.t);
  return signal_of(lo, signal) + frac * (signal_of(hi, signal) - signal_of(lo, signal));
}

}  // namespace

void ValidationSettings::validate() const {
  for (const auto& t : thresholds)
    require(std::isfinite(t.value) && t.value >= 0.0, ErrorCode::domain,
            "threshold for (" + std::string(to_string(t.signal)) + ", " +
                std::string(to_string(t.metric)) + ") must be finite and >= 0");
}

double threshold_floor(Signal signal) noexcept {
  switch (signal) {
    case Signal::x: return 1e-4;      // m
    case Signal::theta: return 1e-4;  // rad
    case Signal::l: return 1e-4;      // m
  }
  return 1e-4;
}

std::vector<Threshold> calibrated_thresholds(const std::vector<MetricResult>& calibration,
                                             double multiplier) {
  std::vector<Threshold> out;
  out.reserve(calibration.size());
  for (const auto& r : calibration)
    out.push_back({r.signal, r.metric, std::max(multiplier * r.value, threshold_floor(r.signal))});
  return out;
}

ValidationReport compare_traces(const sim::Trace& measured, const sim::Trace& simulated,
                                const ValidationSettings& settings) {
  settings.validate();
  require(!measured.samples.empty(), ErrorCode::domain, "measured trace is empty");
  require(!simulated.samples.empty(), ErrorCode::domain, "simulated trace is empty");

  const double t0 = std::max(measured.samples.front().t, simulated.samples.front().t);
  const double t1 = std::min(measured.samples.back().t, simulated.samples.back().t);
  if (t0 > t1 + kTimeSlack)
    fail(ErrorCode::domain, "measured and simulated traces do not overlap in time");

  std::vector<const model::CraneState*> grid;
  for (const auto& s : simulated.samples)
    if (s.t >= t0 - kTimeSlack && s.t <= t1 + kTimeSlack) grid.push_back(&s);
  if (grid.empty()) fail(ErrorCode::domain, "no simulated samples inside the overlap");

  ValidationReport report;
  report.run_id = measured.id;
  report.created_at = utc_now_iso();
  report.overall_pass = true;
  for (const Threshold& threshold : settings.thresholds) {
    std::vector<double> a, b;
    a.reserve(grid.size());
    b.reserve(grid.size());
    for (const auto* s : grid) {
      a.push_back(interpolate(measured.samples, s->t, threshold.signal));
      b.push_back(signal_of(*s, threshold.signal));
    }
    MetricResult r;
    r.signal = threshold.signal;
    r.metric = threshold.metric;
    switch (threshold.metric) {
      case Metric::rmse: r.value = rmse(a, b); break;
      case Metric::max_dev: r.value = max_dev(a, b); break;
      case Metric::dtw: r.value = dtw(a, b, settings.dtw_band); break;
    }
    r.threshold = threshold.value;
    r.pass = r.value <= r.threshold;
    report.overall_pass = report.overall_pass && r.pass;
    report.results.push_back(r);
  }
  std::ostringstream notes;
  notes.precision(6);
  notes << "compared " << grid.size() << " samples over [" << t0 << ", " << t1 << "] s";
  report.notes = notes.str();
  return report;
}

ValidationReport validate_run(historian::Historian& historian, const std::string& run_id,
                              const ValidationSettings& settings) {
  const sim::Trace measured = historian.query_trace(run_id, sim::TraceKind::measured);
  const sim::Trace simulated = historian.query_trace(run_id, sim::TraceKind::simulated);
  ValidationReport report = compare_traces(measured, simulated, settings);
  report.run_id = run_id;
  historian.store_report(run_id, report);
  return historian.query_report(run_id);
}

ValidationService::ValidationService(bus::Client& client, historian::Historian& historian,
                                     SettingsProvider settings)
    : client_(client), historian_(historian), settings_(std::move(settings)) {
  completed_sub_ = client_.subscribe(bus::topics::run_completed,
                                     [this](const bus::BusMessage& m) { on_completed(m); });
  simulated_sub_ = client_.subscribe(bus::topics::simulation_result,
                                     [this](const bus::BusMessage& m) { on_simulated(m); });
}

ValidationService::~ValidationService() {
  completed_sub_.reset();
  simulated_sub_.reset();
}

void ValidationService::on_completed(const bus::BusMessage& message) {
  const std::string run_id = message.payload.value("run_id", "");
  if (run_id.empty() || message.payload.value("status", "") != "completed") return;
  {
    std::lock_guard lock(mutex_);
    completed_.insert(run_id);
  }
  try_validate(run_id);
}

void ValidationService::on_simulated(const bus::BusMessage& message) {
  const std::string run_id = message.payload.value("run_id", "");
  if (run_id.empty() || !message.payload.value("ok", false)) return;
  {
    std::lock_guard lock(mutex_);
    simulated_.insert(run_id);
  }
  try_validate(run_id);
}

void ValidationService::try_validate(const std::string& run_id) {
  {
    std::lock_guard lock(mutex_);
    if (!completed_.contains(run_id) || !simulated_.contains(run_id)) return;
    completed_.erase(run_id);
    simulated_.erase(run_id);
  }
  try {
    validate_and_publish(run_id);
  } catch (const std::exception& e) {
    try {
      client_.publish(bus::topics::validation_report,
                      {{"run_id", run_id}, {"ok", false}, {"error", e.what()}});
    } catch (...) {
    }
  }
}

ValidationReport ValidationService::validate_and_publish(const std::string& run_id) {
  ValidationReport report = validate_run(historian_, run_id, settings_());
  nlohmann::json payload = report;
  payload["ok"] = true;
  client_.publish(bus::topics::validation_report, payload);
  if (!report.overall_pass) {
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& r : report.results)
      if (!r.pass) failed.push_back(r);
    client_.publish(bus::topics::validation_alert, {{"run_id", run_id},
                                                    {"created_at", report.created_at},
                                                    {"failed", failed},
                                                    {"message", "validation threshold breached"}});
  }
  return report;
}

}  // namespace cranetwin::validation

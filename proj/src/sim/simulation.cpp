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

#include "sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "common/util.hpp"

namespace cranetwin::sim {

using model::CraneParameters;
using model::CraneState;
using trajectory::Trajectory;

std::string_view to_string(TraceKind kind) noexcept {
  switch (kind) {
    case TraceKind::measured: return "measured";
    case TraceKind::simulated: return "simulated";
    case TraceKind::envelope_lower: return "envelope_lower";
    case TraceKind::envelope_upper: return "envelope_upper";
  }
  return "simulated";
}

TraceKind parse_trace_kind(std::string_view text) {
  if (text == "measured") return TraceKind::measured;
  if (text == "simulated") return TraceKind::simulated;
  if (text == "envelope_lower") return TraceKind::envelope_lower;
  if (text == "envelope_upper") return TraceKind::envelope_upper;
  fail(ErrorCode::not_found, "unknown trace kind '" + std::string(text) + "'");
}

std::string_view to_string(PerturbedParameter p) noexcept {
  switch (p) {
    case PerturbedParameter::rope_length: return "l";
    case PerturbedParameter::swing_damping: return "c_theta";
    case PerturbedParameter::wind_gain: return "k_w";
  }
  return "l";
}

PerturbedParameter parse_perturbed_parameter(std::string_view text) {
  if (text == "l") return PerturbedParameter::rope_length;
  if (text == "c_theta") return PerturbedParameter::swing_damping;
  if (text == "k_w") return PerturbedParameter::wind_gain;
  fail(ErrorCode::domain, "unknown perturbed parameter '" + std::string(text) + "'");
}

void EnvelopeConfig::validate() const {
  require(ensemble_size >= 1, ErrorCode::domain, "ensemble_size must be >= 1");
  require(std::isfinite(perturbation) && perturbation >= 0.0 && perturbation < 1.0,
          ErrorCode::domain, "perturbation must be in [0, 1)");
}

std::size_t playback_steps(const Trajectory& traj, double dt, const PlaybackOptions& options) {
  require(std::isfinite(options.hold) && options.hold >= 0.0, ErrorCode::domain,
          "hold must be >= 0");
  require(options.decimation >= 1, ErrorCode::domain, "decimation must be >= 1");
  const std::size_t motion = trajectory::step_count(traj, dt);
  if (motion == 0) return 0;
  const std::size_t total = motion + static_cast<std::size_t>(std::llround(options.hold / dt));
  const std::size_t n = options.decimation;
  return (total + n - 1) / n * n;
}

model::PlantInput playback_input(const Trajectory& traj, std::size_t step, double dt) {
  const double a = trajectory::command_at(traj, step, dt);
  if (traj.axis == trajectory::Axis::cart) return {a, 0.0};
  return {0.0, a};
}

Trace simulate(const Trajectory& traj, const CraneParameters& params, const CraneState& initial,
               double dt, const PlaybackOptions& options) {
  require(std::isfinite(dt) && dt > 0.0, ErrorCode::domain, "dt must be > 0");
  Trace trace;
  trace.id = make_id("sim");
  trace.kind = TraceKind::simulated;
  trace.dt = dt * static_cast<double>(options.decimation);

  const std::size_t total = playback_steps(traj, dt, options);
  trace.samples.reserve(total / options.decimation + 2);
  CraneState state = initial;
  trace.samples.push_back(state);
  for (std::size_t k = 0; k < total; ++k) {
    state = model::step_rk4(state, playback_input(traj, k, dt), dt, params);
    if ((k + 1) % options.decimation == 0) trace.samples.push_back(state);
  }
  return trace;
}

std::pair<Trace, Trace> confidence_envelope(const Trajectory& traj, const CraneParameters& params,
                                            const CraneState& initial, double dt,
                                            const EnvelopeConfig& cfg,
                                            const PlaybackOptions& options) {
  cfg.validate();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> factor(1.0 - cfg.perturbation, 1.0 + cfg.perturbation);
  auto has = [&](PerturbedParameter p) {
    return std::find(cfg.perturbed.begin(), cfg.perturbed.end(), p) != cfg.perturbed.end();
  };

  Trace lower = simulate(traj, params, initial, dt, options);
  Trace upper = lower;
  for (std::size_t member = 1; member < cfg.ensemble_size; ++member) {
    CraneParameters p = params;
    CraneState start = initial;
    // Draw every factor so the random stream does not depend on the subset.
    const double f_l = factor(rng);
    const double f_c = factor(rng);
    const double f_k = factor(rng);
    if (has(PerturbedParameter::rope_length)) start.l *= f_l;
    if (has(PerturbedParameter::swing_damping)) p.swing_damping *= f_c;
    if (has(PerturbedParameter::wind_gain)) p.wind_gain *= f_k;

    const Trace run = simulate(traj, p, start, dt, options);
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
      const CraneState& s = run.samples[i];
      CraneState& lo = lower.samples[i];
      CraneState& hi = upper.samples[i];
      lo.x = std::min(lo.x, s.x), hi.x = std::max(hi.x, s.x);
      lo.v = std::min(lo.v, s.v), hi.v = std::max(hi.v, s.v);
      lo.l = std::min(lo.l, s.l), hi.l = std::max(hi.l, s.l);
      lo.l_dot = std::min(lo.l_dot, s.l_dot), hi.l_dot = std::max(hi.l_dot, s.l_dot);
      lo.theta = std::min(lo.theta, s.theta), hi.theta = std::max(hi.theta, s.theta);
      lo.theta_dot = std::min(lo.theta_dot, s.theta_dot);
      hi.theta_dot = std::max(hi.theta_dot, s.theta_dot);
      lo.wind = std::min(lo.wind, s.wind), hi.wind = std::max(hi.wind, s.wind);
      lo.magnet_on = lo.magnet_on && s.magnet_on;
      hi.magnet_on = hi.magnet_on || s.magnet_on;
    }
  }
  lower.kind = TraceKind::envelope_lower;
  upper.kind = TraceKind::envelope_upper;
  return {std::move(lower), std::move(upper)};
}

}  // namespace cranetwin::sim

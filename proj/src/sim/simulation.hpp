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

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "model/crane_model.hpp"
#include "trajectory/trajectory.hpp"

namespace cranetwin::sim {

enum class TraceKind { measured, simulated, envelope_lower, envelope_upper };

std::string_view to_string(TraceKind kind) noexcept;
TraceKind parse_trace_kind(std::string_view text);

struct Trace {
  std::string id;  // run_id or sim_id
  TraceKind kind = TraceKind::simulated;
  double dt = 0.0;
  std::vector<model::CraneState> samples;
};

// How a trajectory is played on the plant.
struct PlaybackOptions {
  std::size_t decimation = 1;  // record every n-th integration step
  double hold = 0.0;           // extra time at zero command after the trajectory, s
};

// Total integration steps for playing `traj` at step dt followed by `hold`,
// rounded up to a whole number of sample periods so recorded traces stay
// uniformly spaced. A zero-duration trajectory is played for zero steps.
std::size_t playback_steps(const trajectory::Trajectory& traj, double dt,
                           const PlaybackOptions& options);

// Plant input for integration step `step` while playing `traj`.
model::PlantInput playback_input(const trajectory::Trajectory& traj, std::size_t step, double dt);

// Deterministic plant simulation via step_rk4; wind is held at its initial
// value. Samples are taken at step 0 and every `decimation` steps.
Trace simulate(const trajectory::Trajectory& traj, const model::CraneParameters& params,
               const model::CraneState& initial, double dt, const PlaybackOptions& options = {});

enum class PerturbedParameter { rope_length, swing_damping, wind_gain };

struct EnvelopeConfig {
  std::size_t ensemble_size = 16;
  double perturbation = 0.05;
  std::vector<PerturbedParameter> perturbed{PerturbedParameter::rope_length,
                                            PerturbedParameter::swing_damping,
                                            PerturbedParameter::wind_gain};
  std::uint64_t seed = 7;

  void validate() const;
};

std::string_view to_string(PerturbedParameter p) noexcept;
PerturbedParameter parse_perturbed_parameter(std::string_view text);

// Per-sample, per-signal min/max over an ensemble of simulations whose
// parameters are drawn uniformly from nominal * [1 - p, 1 + p]. Member 0 is
// always the nominal parameter set.
std::pair<Trace, Trace> confidence_envelope(const trajectory::Trajectory& traj,
                                            const model::CraneParameters& params,
                                            const model::CraneState& initial, double dt,
                                            const EnvelopeConfig& cfg,
                                            const PlaybackOptions& options = {});

}  // namespace cranetwin::sim

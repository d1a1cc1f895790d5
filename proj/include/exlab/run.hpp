/*
 * Copyright 2026 exlab contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "exlab/experiments.hpp"
#include "exlab/io.hpp"

namespace exlab {

enum class ExperimentKind { Theta, Phi, Giant, EU, Coupling };

const char* to_string(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Giant;
  EnsembleSpec ensemble = EnsembleSpec::rsh(40);
  std::vector<double> levels = {0.0};
  int replicates = 1;
  std::uint64_t seed = 1;
  // Resolution policy: sphere cells per local scale, planar cell side.
  double cells_per_scale = 4.0;
  double spacing = 0.25;
  // Planar arm estimates.
  double R = 10.0;
  double window = 0.0;
  // EU sweeps and coupling ladders.
  std::vector<double> radii;
  double delta = 0.01;
  Vec3 center = Vec3(1.0, 0.0, 0.0);
  double orthant_spacing = 0.05;
  int points = 32;
  std::vector<double> eps_ladder = {0.01, 0.02, 0.05, 0.1, 0.2};
  double reference = kNaN;
  // Not hashed.
  std::filesystem::path output_dir = ".";
  int jobs = 1;

  // Every hashed field with defaults filled, keys sorted.
  Json canonical() const;
  std::string hash() const;
  void validate() const;
};

// Reads a config document; unknown or mistyped fields raise ConfigError naming the field.
ExperimentConfig config_from_json(const Json& j, const ExperimentConfig& base = {});
ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base = {});

struct RunOutput {
  std::string config_hash;
  std::filesystem::path data;
  std::filesystem::path summary;  // empty when the experiment has no summary table
  std::filesystem::path manifest;
  std::size_t rows = 0;
  double wall_time = 0.0;
  Json result;  // experiment-level flags (monotonicity, slopes, ...)
};

// Writes <experiment>-<hash>.csv (and -summary.csv) plus a manifest into output_dir.
// Data rows carry no timing, so they are byte-identical for identical configs.
RunOutput run_experiment(const ExperimentConfig& config);

std::string code_version();

}  // namespace exlab

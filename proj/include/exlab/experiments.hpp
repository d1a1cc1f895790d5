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

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "exlab/geometry.hpp"
#include "exlab/samplers.hpp"

namespace exlab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct EstimateRecord {
  std::string name;
  double level = 0.0;
  double value = 0.0;
  double standard_error = 0.0;
  // Arm frequency minus TruncArm frequency, with its own binomial SE.
  double corrected = kNaN;
  double corrected_standard_error = kNaN;
  int M = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  double wall_time = 0.0;
};

// sqrt(p (1 - p) / M).
double binomial_se(double p, int M);

// --- limiting densities on the planar fields -----------------------------------

struct PlanarEstimateOptions {
  double R = 10.0;
  double window = 0.0;     // grid side; 0 means 2R + 2
  double spacing = 0.25;   // cell side in field units
  int waves = 1024;
  int jobs = 1;
};

// Side and cell count of the estimation window (odd count, so the origin is a cell centre).
struct PlanarWindow {
  double side = 0.0;
  int cells = 0;
};
PlanarWindow planar_window(const PlanarEstimateOptions& opt);

// Arm(t, R) at the origin over M samples; every level is evaluated on the same samples.
std::vector<EstimateRecord> estimate_planar(const EnsembleSpec& field, const std::vector<double>& levels, int M,
                                            std::uint64_t seed, const PlanarEstimateOptions& opt = {});
std::vector<EstimateRecord> estimate_theta(const std::vector<double>& levels, int M, std::uint64_t seed,
                                           const PlanarEstimateOptions& opt = {});
EstimateRecord estimate_theta(double t, int M, std::uint64_t seed, const PlanarEstimateOptions& opt = {});
std::vector<EstimateRecord> estimate_phi(double alpha, const std::vector<double>& levels, int M, std::uint64_t seed,
                                         const PlanarEstimateOptions& opt = {});
EstimateRecord estimate_phi(double alpha, double t, int M, std::uint64_t seed, const PlanarEstimateOptions& opt = {});

// --- giant components on the sphere -----------------------------------------------------

struct GiantAreaOptions {
  double cells_per_scale = 4.0;
  std::vector<double> eps_ladder = {0.01, 0.02, 0.05, 0.1, 0.2};
  double reference = kNaN;  // deviations are measured from this value, or from the sample mean
  int jobs = 1;
};

struct GiantReplicate {
  double level = 0.0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double area_fraction = 0.0;      // Area(V^a) / 4 pi
  double diameter_fraction = 0.0;  // Area(V^d) / 4 pi
  double giant_diameter = 0.0;
  bool coincide = false;
  std::size_t components = 0;
};

struct GiantLevelSummary {
  double level = 0.0;
  int M = 0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  double mean_diameter_giant = 0.0;
  double coincidence = 0.0;
  double reference = 0.0;
  std::vector<double> eps;
  std::vector<double> deviation;  // frequency of |Area(V^a)/4pi - reference| >= eps
  std::vector<bool> censored;     // frequency below 5/M
};

struct GiantAreaResult {
  EnsembleSpec spec;
  std::vector<GiantReplicate> rows;  // level-major, replicate order
  std::vector<GiantLevelSummary> levels;
};

GiantAreaResult giant_area_experiment(const EnsembleSpec& spec, const std::vector<double>& levels, int M,
                                      std::uint64_t seed, const GiantAreaOptions& opt = {});

// One-sided two-sample z of mean(hi) - mean(lo).
double two_sample_z(const GiantLevelSummary& hi, const GiantLevelSummary& lo);

// --- local uniqueness -----------------------------------------------------------------

struct EUSweepOptions {
  Vec3 center = Vec3(1.0, 0.0, 0.0);
  int jobs = 1;
};

struct EUEntry {
  double r = 0.0;
  double level = 0.0;
  int M = 0;
  int failures = 0;
  double value = 0.0;  // failure frequency
  double standard_error = 0.0;
  bool censored = false;
};

struct EUSweepResult {
  std::vector<EUEntry> entries;  // level-major, then r
  // No pair r < r' with e(r') exceeding e(r) by more than 3 pooled SE.
  bool monotone = true;
  std::vector<double> slope;  // per level: least-squares slope of log e against r; NaN with < 2 uncensored radii
};

EUSweepResult eu_sweep(const EnsembleSpec& spec, const std::vector<double>& levels, const std::vector<double>& radii,
                       double delta, int M, std::uint64_t seed, const EUSweepOptions& opt = {});

// --- coupling error ladders -------------------------------------------------------------

struct CouplingOptions {
  double spacing = 0.05;  // Kostlan: orthant grid spacing
  double margin = 0.05;
  int points = 32;        // zonal ensembles: evaluation points
  int jobs = 1;
};

struct CouplingEntry {
  double r = 0.0;
  int M = 0;
  double variance = 0.0;  // mean over replicates of the cell-averaged (f - f^(r))^2
  double standard_error = 0.0;
  double exact_variance = 0.0;
  double scaled = 0.0;    // variance * r * local_scale^{-1}
};

struct CouplingLadderResult {
  EnsembleSpec spec;
  std::vector<CouplingEntry> entries;
  // Every pair r < r' decreases by more than 2 SE of the matched difference.
  bool strictly_decreasing = true;
  double min_paired_z = std::numeric_limits<double>::infinity();
};

CouplingLadderResult coupling_ladder(const EnsembleSpec& spec, const std::vector<double>& radii, int M,
                                     std::uint64_t seed, const CouplingOptions& opt = {});

}  // namespace exlab

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
#include <functional>
#include <vector>

#include "exlab/geometry.hpp"
#include "exlab/grid.hpp"
#include "exlab/samplers.hpp"

namespace exlab {

// Smooth ramp: 0 on [0,1/4], 1 on [1/2,inf), C-infinity, slope at most kBumpSlopeBound.
double bump_eval(double x);
double bump_slope(double x);
inline constexpr double kBumpSlopeBound = 5.0;

struct LocalizationPoint {
  MultiIndex J;
  Vec3 v;
};

// v_{n,J} = (sqrt(j0/n), sqrt(j1/n), sqrt(j2/n)).
LocalizationPoint localization_point(int n, const MultiIndex& J);
std::vector<LocalizationPoint> localization_points(int n);

// Compact subset of the open positive orthant: every coordinate >= margin.
inline constexpr double kDefaultOrthantMargin = 0.05;
bool in_orthant_subset(const Vec3& x, double margin);
void require_orthant(const Grid& grid, double margin);
// Lat-lon points with the given angular spacing restricted to the orthant subset.
Grid orthant_points(double margin, double spacing);

struct CoupledPair {
  FieldSample full;
  FieldSample truncated;
  double range = 0.0;
  std::uint64_t shared_seed = 0;

  std::vector<double> difference() const;
};

struct SupportAudit {
  bool pass = true;
  std::size_t basis_checked = 0;
  std::size_t pairs_checked = 0;
  double max_support_diameter = 0.0;
  long witness_basis = -1;
  std::size_t witness_a = 0, witness_b = 0;
};

// Truncated Kostlan basis b_J(x) (1 - bump(d(x, v_J) / r)), evaluated on a fixed grid.
class KostlanCoupling {
 public:
  KostlanCoupling(int n, double r, GridPtr grid, double margin = kDefaultOrthantMargin);

  int degree() const { return n_; }
  double range() const { return r_; }
  const GridPtr& grid() const { return grid_; }
  std::size_t basis_size() const { return index_.size(); }

  CoupledPair pair(std::uint64_t seed) const;
  // Same construction from explicit coefficients.
  CoupledPair pair_from(const std::vector<double>& coeffs, std::uint64_t seed) const;
  std::vector<double> difference(std::uint64_t seed) const;
  std::vector<double> difference_from(const std::vector<double>& coeffs) const;
  // Exact pointwise Var(f - f^(r)).
  std::vector<double> difference_variance() const;
  // Basis functions whose truncation changes them somewhere on the grid.
  std::vector<bool> truncation_active() const;
  // Exhaustive check that no truncated basis function is supported on two cells at distance >= r.
  SupportAudit audit() const;

 private:
  int n_;
  double r_;
  GridPtr grid_;
  std::vector<MultiIndex> index_;
  std::vector<double> basis_;  // cell-major, full basis values
  std::vector<double> keep_;   // 1 - bump factors, same layout
};

std::vector<double> draw_kostlan_coefficients(int n, std::uint64_t seed);

CoupledPair kostlan_coupled(int n, double r, GridPtr grid, std::uint64_t seed,
                            double margin = kDefaultOrthantMargin);

struct LocalizationReport {
  int n = 0;
  double margin = 0.0;
  std::size_t evaluations = 0;
  std::size_t negative = 0;
  double fitted_C = 0.0;  // b <= C n^{-1/2} exp(-c n d^2)
  double fitted_c = 0.0;
  std::vector<double> bin_edges;
  std::vector<double> bin_max;  // max b over pairs with d in each bin
  bool monotone_bins = true;
  bool positive = true;
  // Peak check: b_J(v_J) is the maximum of b_J over the sampled points, for every J.
  bool peak_at_center = true;
};

LocalizationReport basis_localization_report(int n, double margin, int samples, std::uint64_t seed);
// Number of v_{n,J} within distance d of x.
std::size_t count_localization_points(int n, const Vec3& x, double d);

// --- zonal truncation ------------------------------------------------------------

struct ZonalTruncationOptions {
  double roundtrip_tolerance = 1e-8;
  double residual_tolerance = 1e-8;
  int min_expansion_degree = 256;
  int max_expansion_degree = 32768;
};

struct ZonalTruncation {
  ZonalCoefficients original;
  ZonalCoefficients truncated;  // c-tilde up to the sampling degree
  double range = 0.0;
  int expansion_degree = 0;     // degree used for the round-trip guard
  int sampling_degree = 0;
  int quadrature_nodes = 0;
  double roundtrip_error = 0.0;  // sup |re-synthesized q^(r) - q^(r)|
  double residual_sup = 0.0;     // sup_{theta > r} |K-tilde(theta)| on a 200-point grid
  double dropped_variance = 0.0;
};

// q(theta) = sum c sqrt(N) P(cos theta).
double zonal_q(const ZonalCoefficients& c, double theta);
// c-tilde_l for l = 0..L by composite Gauss-Legendre quadrature with 4L+8 nodes on the support.
std::vector<double> zonal_reexpand(const ZonalCoefficients& c, double r, int L, int* nodes_used = nullptr);
ZonalTruncation truncate_zonal(const ZonalCoefficients& c, double r, const ZonalTruncationOptions& opt = {});

class ZonalCoupling {
 public:
  ZonalCoupling(ZonalTruncation trunc, GridPtr grid);
  const ZonalTruncation& truncation() const { return trunc_; }
  const GridPtr& grid() const { return grid_; }
  CoupledPair pair(std::uint64_t seed) const;
  std::vector<double> difference(std::uint64_t seed) const;
  // Exact Var(f - f^(r)) = sum (c - c-tilde)^2.
  double difference_variance() const;

 private:
  ZonalTruncation trunc_;
  GridPtr grid_;
  std::vector<double> c_full_, c_trunc_;
};

CoupledPair zonal_truncated_pair(const ZonalCoefficients& coeffs, double r, GridPtr grid, std::uint64_t seed);

// --- sup statistics ------------------------------------------------------------

struct SupStats {
  int replicates = 0;
  std::vector<double> sups;        // per replicate, over the union of caps
  double mean = 0.0;
  double standard_error = 0.0;
  std::vector<double> thresholds;
  std::vector<double> exceedance;  // frequency of sup > threshold
  std::vector<bool> censored;      // frequency below 5/M
  // Successive log-frequency slopes are nonincreasing and the last measured slope is below -1.
  bool sub_exponential_tail = true;
};

using DifferenceSampler = std::function<std::vector<double>(std::uint64_t)>;

SupStats coupling_sup_stats(const DifferenceSampler& diff, const Grid& grid, const std::vector<SphericalCap>& caps,
                            int M, std::uint64_t master_seed, const std::vector<double>& thresholds);

}  // namespace exlab

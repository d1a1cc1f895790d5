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
#include <string>
#include <vector>

#include "exlab/grid.hpp"
#include "exlab/rng.hpp"
#include "exlab/spectral.hpp"

namespace exlab {

struct EnsembleSpec {
  enum class Kind { Kostlan, RSH, BandLimited, Mono, Isotropic, BargmannFock, PlaneWave };
  Kind kind = Kind::RSH;
  int n = 1;
  int ell = 0;
  double alpha = 0.0;
  double beta = 0.5;
  int waves = 1024;
  ZonalCoefficients zonal;  // Isotropic only

  static EnsembleSpec kostlan(int n);
  static EnsembleSpec rsh(int ell);
  static EnsembleSpec bandlimited(double alpha, int ell);
  static EnsembleSpec mono(double beta, int ell);
  static EnsembleSpec isotropic(ZonalCoefficients c);
  static EnsembleSpec bargmann_fock(int waves = 1024);
  static EnsembleSpec plane_wave(double alpha, int waves = 1024);

  bool planar() const { return kind == Kind::BargmannFock || kind == Kind::PlaneWave; }
  // 1/sqrt(n) or 1/l on the sphere; 1 for planar fields.
  double local_scale() const;
  KernelSpec kernel() const;
  double covariance(double distance) const;
  std::string describe() const;
};

const char* to_string(EnsembleSpec::Kind k);

struct FieldSample {
  GridPtr grid;
  std::vector<double> values;
  // Spherical harmonic ensembles: a_{l,m} for l in [coeff_lmin, coeff_lmax], index l^2 + l + m - coeff_lmin^2.
  // Kostlan: a_J in kostlan_multi_indices order. Planar: (xi_x, xi_y, phase) per wave.
  std::vector<double> coeffs;
  int coeff_lmin = 0;
  int coeff_lmax = -1;
  EnsembleSpec spec;
  std::uint64_t seed = 0;
};

// Budgets: Kostlan degree cap and harmonic degree cap.
inline constexpr int kKostlanDegreeCap = 512;
inline constexpr int kHarmonicDegreeCap = 1500;

// --- spherical harmonics --------------------------------------------------

// Fully normalized associated Legendre values Pbar_l^m(cos theta), l = m..lmax (no Condon-Shortley phase).
std::vector<double> normalized_legendre(int lmax, int m, double theta);
// Real spherical harmonic Y_{l,m}: sqrt(2) Pbar cos(m phi) for m > 0, Pbar for m = 0, sqrt(2) Pbar sin(|m| phi) for m < 0.
double real_ylm(int ell, int m, const Vec3& x);

inline std::size_t harmonic_index(int ell, int m) { return static_cast<std::size_t>(ell * ell + ell + m); }

// Draws a_{l,m} for l in [lmin, lmax] from the coefficient stream of `seed`.
std::vector<double> draw_harmonic_coefficients(std::uint64_t seed, int lmin, int lmax);

// f = sum_l w_l sum_m a_{l,m} Y_{l,m} with a laid out from lmin; weights indexed by degree (size lmax+1).
std::vector<double> synthesize_harmonics(const std::vector<double>& weights, const std::vector<double>& coeffs,
                                         int lmin, const Grid& grid);

FieldSample sample_rsh(int ell, GridPtr grid, std::uint64_t seed);
FieldSample sample_bandlimited(const KernelSpec& spec, GridPtr grid, std::uint64_t seed);
FieldSample sample_isotropic(const ZonalCoefficients& coeffs, GridPtr grid, std::uint64_t seed);

// --- Kostlan -----------------------------------------------------------------

struct MultiIndex {
  int j0, j1, j2;
};
// Multi-indices with |J| = n: j0 descending, then j1 descending.
std::vector<MultiIndex> kostlan_multi_indices(int n);
// sqrt(n! / (j0! j1! j2!)) via log-gamma.
std::vector<double> kostlan_weights(int n);
// b_{n,J}(x) for every J.
std::vector<double> kostlan_basis(int n, const Vec3& x);
std::vector<double> synthesize_kostlan(int n, const std::vector<double>& coeffs, const Grid& grid);
FieldSample sample_kostlan(int n, GridPtr grid, std::uint64_t seed);

// --- planar limit fields ---------------------------------------------------

struct WaveSuperposition {
  std::vector<Vec2> frequencies;
  std::vector<double> phases;
  int size() const { return static_cast<int>(phases.size()); }
};

WaveSuperposition draw_waves(const EnsembleSpec& spec, std::uint64_t seed);
// h(x) = sqrt(2/K) sum cos(<xi,x> + phase).
std::vector<double> synthesize_waves(const WaveSuperposition& w, const Grid& grid);
FieldSample sample_planar(const EnsembleSpec& spec, GridPtr grid, std::uint64_t seed);

// Dispatch on spec.
FieldSample sample_field(const EnsembleSpec& spec, GridPtr grid, std::uint64_t seed);


}  // namespace exlab

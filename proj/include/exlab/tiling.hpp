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

#include "exlab/geometry.hpp"

namespace exlab {

// A closed cap (radius >= pi is the whole sphere) or a closed square.
struct TilingRegion {
  bool is_cap = true;
  SphericalCap cap;
  SphereSquare square;

  static TilingRegion make_cap(const Vec3& center, double radius);
  static TilingRegion make_square(const SphereSquare& sq);
  static TilingRegion sphere();

  bool full_sphere() const { return is_cap && cap.radius >= std::numbers::pi; }
  double area() const;
  Vec3 center() const { return is_cap ? cap.center : square.center(); }
  // Inradius: cap radius or square half-side.
  double size() const { return is_cap ? cap.radius : square.half_side; }
  bool contains(const Vec3& y) const { return is_cap ? cap.contains(y) : square_contains(square, y); }
  std::string describe() const;
};

struct Tiling {
  std::vector<SphereSquare> tiles;
  double u = 0.0;
  double epsilon = 0.0;
  TilingRegion region;
  std::string design;
};

struct TilingReport {
  // (i) small overlap
  bool covered = true;
  std::size_t coverage_samples = 0;
  Vec3 uncovered_witness = Vec3::Zero();
  bool exclusive_ok = true;
  double min_exclusive_fraction = 1.0;
  std::size_t worst_tile = 0;
  bool count_ok = true;
  std::size_t count = 0;
  double count_bound = 0.0;
  // (ii) local boundedness
  bool neighbors_ok = true;
  int max_neighbors = 0;
  std::size_t busiest_tile = 0;
  // (iii) isoperimetry, sampled
  bool isoperimetry_ok = true;
  int failing_s = 0;
  std::vector<std::size_t> failing_deletion;
  std::size_t largest_survivor = 0;

  bool pass() const { return covered && exclusive_ok && count_ok && neighbors_ok && isoperimetry_ok; }
  int failures() const;
  std::string summary() const;
};

struct TilingCheckOptions {
  // Coverage sample spacing and exclusivity quadrature order, relative to u.
  double coverage_step = 1.0 / 8.0;
  int quadrature = 20;
  int deletion_trials = 100;
  std::uint64_t seed = 0x7117;
};

// Geodesic distance between two tiles as point sets (0 when they meet).
double tile_distance(const SphereSquare& a, const SphereSquare& b);
TilingReport check_tiling(const Tiling& t, const TilingCheckOptions& opt = {});
// u-connectivity graph of the tiles.
std::vector<std::vector<std::size_t>> tile_graph(const Tiling& t);

// 1 - exclusive-area fraction of the central tile of a 5x5 exp-mapped lattice patch.
double lattice_overlap_error(double u);
// Largest u with lattice_overlap_error(u) < eps / 2; computed by bisection and cached.
double curvature_threshold(double eps);

struct TilingInfeasible : std::runtime_error {
  TilingInfeasible(const std::string& what, Tiling best, TilingReport report)
      : std::runtime_error(what), best(std::move(best)), report(std::move(report)) {}
  Tiling best;
  TilingReport report;
};

// Candidate designs: exp-mapped square lattices (two offsets) and concentric rings about the
// region centre. Returns the first candidate passing check_tiling in a fixed order.
Tiling build_tiling(double u, double eps, const TilingRegion& region);

// Square tile of half-side u centred at c whose first axis points along `heading`.
SphereSquare tile_at(const Vec3& c, const Vec3& heading, double u);

}  // namespace exlab

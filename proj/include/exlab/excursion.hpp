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
#include <vector>

#include "exlab/geometry.hpp"
#include "exlab/grid.hpp"
#include "exlab/samplers.hpp"

namespace exlab {

struct ExcursionMask {
  GridPtr grid;
  double level = 0.0;
  std::vector<std::uint8_t> inside;  // values <= level

  std::size_t count() const;
  double area() const;
};

ExcursionMask excursion_mask(const FieldSample& sample, double t);
ExcursionMask make_mask(GridPtr grid, std::vector<std::uint8_t> inside, double level = 0.0);

struct Component {
  std::size_t id = 0;
  double area = 0.0;
  std::size_t cells = 0;
  std::size_t representative = 0;  // smallest cell index
  bool touches_boundary = false;   // some cell lies on the grid window boundary
};

struct ComponentLabeling {
  GridPtr grid;
  std::vector<std::int32_t> label;  // -1 outside the set
  std::vector<Component> components;  // ordered by representative

  std::vector<std::size_t> cells_of(std::size_t id) const;
  double component_area_sum() const;
};

ComponentLabeling label_components(const ExcursionMask& mask);
// Components of the cells with member[i] != 0 under the grid adjacency.
ComponentLabeling label_cells(GridPtr grid, const std::vector<std::uint8_t>& member);

enum class DiameterMode { Auto, Exact, Subsampled };
inline constexpr std::size_t kExactDiameterCap = 20000;
inline constexpr std::size_t kBoundarySampleCap = 2000;

double component_diameter(const Grid& grid, const std::vector<std::size_t>& cells, DiameterMode mode = DiameterMode::Auto);

enum class GiantBy { Area, Diameter };

struct Giant {
  std::size_t id = 0;
  double area = 0.0;
  double diameter = 0.0;
  std::size_t representative = 0;
};

Giant giant(const ComponentLabeling& lab, GiantBy by, DiameterMode mode = DiameterMode::Auto);

struct EventSpec {
  enum class Kind { AnnCross, Arm, TruncArm, EU };
  Kind kind = Kind::Arm;
  double r = 1.0;
  double level = 0.0;
  double window = 0.0;          // TruncArm window side; 0 means 8r
  Vec3 center = Vec3::Zero();   // origin for planar grids; a unit vector on the sphere
  double delta = 0.01;          // EU only

  static EventSpec ann_cross(double r, double t, Vec3 center = Vec3::Zero());
  static EventSpec arm(double r, double t, Vec3 center = Vec3::Zero());
  static EventSpec trunc_arm(double r, double t, double window = 0.0, Vec3 center = Vec3::Zero());
  static EventSpec eu(const Vec3& x, double r, double delta, double t);
};

const char* to_string(EventSpec::Kind k);

bool event_occurs(const FieldSample& sample, const EventSpec& ev);
bool event_occurs(const ExcursionMask& mask, const EventSpec& ev);

// Finite region family standing in for N(x, r): caps and squares inside D_{3r}(x).
struct EURegion {
  bool is_cap = true;
  SphericalCap cap;
  SphereSquare square;
  bool contains(const Vec3& y) const { return is_cap ? cap.contains(y) : square_contains(square, y); }
};

std::vector<EURegion> eu_region_family(const Vec3& x, double r);
bool eu_event(const FieldSample& sample, const Vec3& x, double r, double delta, double t);
bool eu_event(const ExcursionMask& mask, const Vec3& x, double r, double delta);
// Lat-lon window covering D_{3r}(x) with spacing at most delta r / 4.
Grid eu_grid(const Vec3& x, double r, double delta);

}  // namespace exlab

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
#include <memory>
#include <string>
#include <vector>

#include "exlab/geometry.hpp"

namespace exlab {

enum class GridKind { SphereLatLon, SphereWindow, SpherePatch, Planar, Points };
enum class Connectivity { Eight, Four };

const char* to_string(GridKind k);

// Settable cap on cell counts for grid construction.
std::size_t& grid_cell_budget();

// Structured discretization: sphere lat-lon grids (full or windowed), exp-map patches,
// planar windows, and bare point sets. Adjacency is computed from (row, col) on demand.
class Grid {
 public:
  // Iso-latitude grid with n_lat rows and 2 n_lat columns; polar rings are cliques.
  static Grid sphere(int n_lat, Connectivity conn = Connectivity::Eight);
  // Rows [row0,row1) and columns col0 .. col0+ncols-1 (mod n_lon) of the full grid with n_lat rows.
  static Grid sphere_window(int n_lat, int row0, int row1, int col0, int ncols,
                            Connectivity conn = Connectivity::Eight);
  // Exp-map image of an n x n lattice on [-h,h]^2 in the frame of `rotation`.
  static Grid sphere_patch(const Mat3& rotation, double half_side, int n, Connectivity conn = Connectivity::Eight);
  // Origin-centred square window of the plane, n cells per side.
  static Grid planar(double side_length, int n, Connectivity conn = Connectivity::Eight);
  static Grid points(std::vector<Vec3> pts, bool spherical = true);

  GridKind kind() const { return kind_; }
  bool spherical() const { return kind_ != GridKind::Planar && !(kind_ == GridKind::Points && !points_spherical_); }
  Connectivity connectivity() const { return conn_; }
  std::size_t size() const { return static_cast<std::size_t>(rows_) * cols_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int full_rows() const { return n_lat_; }
  int full_cols() const { return 2 * n_lat_; }
  int row_offset() const { return row0_; }
  int col_offset() const { return col0_; }
  bool wraps() const { return wraps_; }

  Vec3 center(std::size_t i) const;
  double area(std::size_t i) const;
  double total_area() const;
  // Maximum centre-to-centre spacing along rows or columns.
  double spacing() const { return spacing_; }
  double distance(const Vec3& a, const Vec3& b) const {
    return spherical() ? sph_dist(a, b) : (a - b).norm();
  }
  double distance(std::size_t i, std::size_t j) const { return distance(center(i), center(j)); }

  // Colatitude / longitude of lat-lon rows and columns (local indices).
  double row_theta(int r) const { return row_theta_[r]; }
  double col_phi(int c) const { return col_phi_[c]; }
  // Planar coordinates.
  double planar_x(int c) const { return -half_ + (c + 0.5) * h_; }
  double planar_y(int r) const { return -half_ + (r + 0.5) * h_; }
  double planar_side() const { return 2.0 * half_; }
  const Mat3& patch_rotation() const { return patch_rotation_; }
  double patch_half_side() const { return half_; }

  bool has_pole_rings() const { return kind_ == GridKind::SphereLatLon; }
  // A cell with an adjacency slot falling outside the window.
  bool on_window_boundary(std::size_t i) const;
  std::size_t nearest_cell(const Vec3& x) const;

  // Neighbours excluding the polar-ring cliques.
  template <class F>
  void for_each_local_neighbor(std::size_t i, F&& f) const;
  // Full adjacency including polar rings.
  template <class F>
  void for_each_neighbor(std::size_t i, F&& f) const;
  std::vector<std::size_t> neighbors(std::size_t i) const;

  // Short identity string, used in sidecars and hashes.
  std::string descriptor() const;

 private:
  GridKind kind_ = GridKind::Points;
  Connectivity conn_ = Connectivity::Eight;
  int rows_ = 0, cols_ = 0;
  int n_lat_ = 0, row0_ = 0, col0_ = 0;
  bool wraps_ = false;
  bool points_spherical_ = true;
  double half_ = 0.0, h_ = 0.0, spacing_ = 0.0;
  Mat3 patch_rotation_ = Mat3::Identity();
  std::vector<double> row_theta_, row_area_, col_phi_, cos_phi_, sin_phi_, sin_theta_, cos_theta_;
  std::vector<Vec3> pts_;
  std::vector<double> pt_area_;
};

template <class F>
void Grid::for_each_local_neighbor(std::size_t i, F&& f) const {
  if (kind_ == GridKind::Points) return;
  const int r = static_cast<int>(i / cols_);
  const int c = static_cast<int>(i % cols_);
  const bool eight = conn_ == Connectivity::Eight;
  for (int dr = -1; dr <= 1; ++dr) {
    const int rr = r + dr;
    if (rr < 0 || rr >= rows_) continue;
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      if (!eight && dr != 0 && dc != 0) continue;
      int cc = c + dc;
      if (wraps_) {
        cc = (cc + cols_) % cols_;
      } else if (cc < 0 || cc >= cols_) {
        continue;
      }
      f(static_cast<std::size_t>(rr) * cols_ + cc);
    }
  }
}

template <class F>
void Grid::for_each_neighbor(std::size_t i, F&& f) const {
  if (!has_pole_rings()) {
    for_each_local_neighbor(i, f);
    return;
  }
  const int r = static_cast<int>(i / cols_);
  if (r != 0 && r != rows_ - 1) {
    for_each_local_neighbor(i, f);
    return;
  }
  for_each_local_neighbor(i, [&](std::size_t j) {
    if (static_cast<int>(j / cols_) != r) f(j);
  });
  const std::size_t base = static_cast<std::size_t>(r) * cols_;
  for (int c = 0; c < cols_; ++c)
    if (base + c != i) f(base + c);
}

// Iso-latitude sphere grid whose row spacing is at most local_scale / cells_per_scale.
Grid build_grid(double cells_per_scale, double local_scale, Connectivity conn = Connectivity::Eight);

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace exlab

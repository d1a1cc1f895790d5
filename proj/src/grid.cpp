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
#include "exlab/grid.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "exlab/spectral.hpp"

namespace exlab {

const char* to_string(GridKind k) {
  switch (k) {
    case GridKind::SphereLatLon:
      return "sphere_latlon";
    case GridKind::SphereWindow:
      return "sphere_window";
    case GridKind::SpherePatch:
      return "sphere_patch";
    case GridKind::Planar:
      return "planar";
    case GridKind::Points:
      return "points";
  }
  return "unknown";
}

std::size_t& grid_cell_budget() {
  static std::size_t budget = 64u * 1024u * 1024u;
  return budget;
}

namespace {

void check_budget(std::size_t cells) {
  if (cells > grid_cell_budget())
    throw BudgetError("grid of " + std::to_string(cells) + " cells exceeds the cell budget of " +
                      std::to_string(grid_cell_budget()));
}

}  // namespace

Grid Grid::sphere(int n_lat, Connectivity conn) {
  if (n_lat < 2) throw DomainError("sphere grid needs at least 2 rows");
  return sphere_window(n_lat, 0, n_lat, 0, 2 * n_lat, conn);
}

Grid Grid::sphere_window(int n_lat, int row0, int row1, int col0, int ncols, Connectivity conn) {
  if (n_lat < 2) throw DomainError("sphere grid needs at least 2 rows");
  const int n_lon = 2 * n_lat;
  if (row0 < 0 || row1 > n_lat || row0 >= row1) throw DomainError("bad window row range");
  if (ncols < 1 || ncols > n_lon) throw DomainError("bad window column count");
  const bool full = row0 == 0 && row1 == n_lat && ncols == n_lon;
  if (!full && (row0 == 0 || row1 == n_lat)) throw GeometryError("partial windows may not contain a polar row");
  check_budget(static_cast<std::size_t>(row1 - row0) * ncols);
  Grid g;
  g.kind_ = full ? GridKind::SphereLatLon : GridKind::SphereWindow;
  g.conn_ = conn;
  g.n_lat_ = n_lat;
  g.row0_ = row0;
  g.col0_ = ((col0 % n_lon) + n_lon) % n_lon;
  g.rows_ = row1 - row0;
  g.cols_ = ncols;
  g.wraps_ = ncols == n_lon;
  const double dth = std::numbers::pi / n_lat;
  const double dph = 2.0 * std::numbers::pi / n_lon;
  for (int r = row0; r < row1; ++r) {
    const double th = (r + 0.5) * dth;
    g.row_theta_.push_back(th);
    g.sin_theta_.push_back(std::sin(th));
    g.cos_theta_.push_back(std::cos(th));
    g.row_area_.push_back((std::cos(r * dth) - std::cos((r + 1) * dth)) * dph);
  }
  for (int c = 0; c < ncols; ++c) {
    const int cc = (g.col0_ + c) % n_lon;
    const double ph = (cc + 0.5) * dph;
    g.col_phi_.push_back(ph);
    g.cos_phi_.push_back(std::cos(ph));
    g.sin_phi_.push_back(std::sin(ph));
  }
  g.spacing_ = dth;
  return g;
}

Grid Grid::sphere_patch(const Mat3& rotation, double half_side, int n, Connectivity conn) {
  if (n < 1 || !(half_side > 0.0) || half_side * std::sqrt(2.0) >= std::numbers::pi)
    throw DomainError("bad patch geometry");
  check_budget(static_cast<std::size_t>(n) * n);
  Grid g;
  g.kind_ = GridKind::SpherePatch;
  g.conn_ = conn;
  g.rows_ = g.cols_ = n;
  g.half_ = half_side;
  g.h_ = 2.0 * half_side / n;
  g.patch_rotation_ = rotation;
  g.spacing_ = g.h_;
  const TangentFrame f = frame_of(rotation);
  g.pts_.reserve(static_cast<std::size_t>(n) * n);
  g.pt_area_.reserve(static_cast<std::size_t>(n) * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      const Vec2 w(-half_side + (c + 0.5) * g.h_, -half_side + (r + 0.5) * g.h_);
      const double rho = w.norm();
      g.pts_.push_back(exp_map(f, w));
      g.pt_area_.push_back(g.h_ * g.h_ * (rho > 0.0 ? std::sin(rho) / rho : 1.0));
    }
  return g;
}

Grid Grid::planar(double side_length, int n, Connectivity conn) {
  if (n < 1 || !(side_length > 0.0)) throw DomainError("bad planar grid");
  check_budget(static_cast<std::size_t>(n) * n);
  Grid g;
  g.kind_ = GridKind::Planar;
  g.conn_ = conn;
  g.rows_ = g.cols_ = n;
  g.half_ = side_length / 2;
  g.h_ = side_length / n;
  g.spacing_ = g.h_;
  return g;
}

Grid Grid::points(std::vector<Vec3> pts, bool spherical) {
  Grid g;
  g.kind_ = GridKind::Points;
  g.points_spherical_ = spherical;
  g.rows_ = 1;
  g.cols_ = static_cast<int>(pts.size());
  if (spherical)
    for (auto& p : pts) p = make_point(p);
  g.pts_ = std::move(pts);
  g.pt_area_.assign(g.pts_.size(), 0.0);
  return g;
}

Vec3 Grid::center(std::size_t i) const {
  switch (kind_) {
    case GridKind::SphereLatLon:
    case GridKind::SphereWindow: {
      const std::size_t r = i / cols_, c = i % cols_;
      return {sin_theta_[r] * cos_phi_[c], sin_theta_[r] * sin_phi_[c], cos_theta_[r]};
    }
    case GridKind::Planar: {
      const int r = static_cast<int>(i / cols_), c = static_cast<int>(i % cols_);
      return {planar_x(c), planar_y(r), 0.0};
    }
    default:
      return pts_[i];
  }
}

double Grid::area(std::size_t i) const {
  switch (kind_) {
    case GridKind::SphereLatLon:
    case GridKind::SphereWindow:
      return row_area_[i / cols_];
    case GridKind::Planar:
      return h_ * h_;
    default:
      return pt_area_[i];
  }
}

double Grid::total_area() const {
  CompensatedSum<double> acc;
  for (std::size_t i = 0; i < size(); ++i) acc.add(area(i));
  return acc.value();
}

bool Grid::on_window_boundary(std::size_t i) const {
  if (kind_ == GridKind::SphereLatLon || kind_ == GridKind::Points) return false;
  const int r = static_cast<int>(i / cols_), c = static_cast<int>(i % cols_);
  if (r == 0 || r == rows_ - 1) return true;
  if (!wraps_ && (c == 0 || c == cols_ - 1)) return true;
  return false;
}

std::size_t Grid::nearest_cell(const Vec3& x) const {
  auto refine = [&](std::size_t guess) {
    std::size_t best = guess;
    double bd = distance(center(guess), x);
    bool improved = true;
    while (improved) {
      improved = false;
      for_each_local_neighbor(best, [&](std::size_t j) {
        const double d = distance(center(j), x);
        if (d < bd) {
          bd = d;
          best = j;
          improved = true;
        }
      });
    }
    return best;
  };
  switch (kind_) {
    case GridKind::SphereLatLon:
    case GridKind::SphereWindow: {
      const Vec3 p = make_point(x);
      const double th = std::acos(std::clamp(p.z(), -1.0, 1.0));
      double ph = std::atan2(p.y(), p.x());
      if (ph < 0) ph += 2.0 * std::numbers::pi;
      const int n_lon = 2 * n_lat_;
      int r = std::clamp(static_cast<int>(th / std::numbers::pi * n_lat_), 0, n_lat_ - 1) - row0_;
      int c = static_cast<int>(ph / (2.0 * std::numbers::pi) * n_lon) % n_lon;
      c = ((c - col0_) % n_lon + n_lon) % n_lon;
      if (r < 0 || r >= rows_ || c >= cols_) throw GeometryError("point outside the grid window");
      return refine(static_cast<std::size_t>(r) * cols_ + c);
    }
    case GridKind::Planar: {
      const int c = static_cast<int>(std::floor((x.x() + half_) / h_));
      const int r = static_cast<int>(std::floor((x.y() + half_) / h_));
      if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw GeometryError("point outside the planar window");
      return static_cast<std::size_t>(r) * cols_ + c;
    }
    case GridKind::SpherePatch: {
      const Vec2 w = log_map(frame_of(patch_rotation_), make_point(x));
      const int c = static_cast<int>(std::floor((w.x() + half_) / h_));
      const int r = static_cast<int>(std::floor((w.y() + half_) / h_));
      if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw GeometryError("point outside the patch");
      return refine(static_cast<std::size_t>(r) * cols_ + c);
    }
    case GridKind::Points:
      break;
  }
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = distance(center(i), x);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

std::vector<std::size_t> Grid::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for_each_neighbor(i, [&](std::size_t j) { out.push_back(j); });
  return out;
}

std::string Grid::descriptor() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind_) << ":conn=" << (conn_ == Connectivity::Eight ? 8 : 4);
  switch (kind_) {
    case GridKind::SphereLatLon:
      os << ";n_lat=" << n_lat_ << ";n_lon=" << 2 * n_lat_;
      break;
    case GridKind::SphereWindow:
      os << ";n_lat=" << n_lat_ << ";rows=" << row0_ << "+" << rows_ << ";cols=" << col0_ << "+" << cols_;
      break;
    case GridKind::SpherePatch:
      os << ";n=" << rows_ << ";half_side=" << half_ << ";center=" << patch_rotation_(0, 2) << ","
         << patch_rotation_(1, 2) << "," << patch_rotation_(2, 2);
      break;
    case GridKind::Planar:
      os << ";n=" << rows_ << ";side=" << 2 * half_;
      break;
    case GridKind::Points:
      os << ";count=" << pts_.size();
      break;
  }
  return os.str();
}

Grid build_grid(double cells_per_scale, double local_scale, Connectivity conn) {
  if (!(local_scale > 0.0)) throw DomainError("local scale must be positive");
  if (!(cells_per_scale >= 4.0)) throw ResolutionError("resolution below 4 cells per local scale");
  const double rows = std::ceil(std::numbers::pi * cells_per_scale / local_scale - 1e-9);
  if (rows * rows * 2.0 > static_cast<double>(grid_cell_budget()))
    throw BudgetError("sphere grid exceeds the cell budget");
  return Grid::sphere(std::max(2, static_cast<int>(rows)), conn);
}

}  // namespace exlab

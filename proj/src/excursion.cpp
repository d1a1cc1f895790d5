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
#include "exlab/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>

#include "exlab/errors.hpp"

namespace exlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b)
      parent[b] = a;
    else
      parent[a] = b;
  }
};

}  // namespace

std::size_t ExcursionMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

double ExcursionMask::area() const {
  double s = 0.0;
  for (std::size_t i = 0; i < inside.size(); ++i)
    if (inside[i]) s += grid->area(i);
  return s;
}

ExcursionMask excursion_mask(const FieldSample& sample, double t) {
  if (!sample.grid) throw DomainError("sample has no grid");
  ExcursionMask m;
  m.grid = sample.grid;
  m.level = t;
  m.inside.resize(sample.values.size());
  for (std::size_t i = 0; i < sample.values.size(); ++i) m.inside[i] = sample.values[i] <= t ? 1 : 0;
  return m;
}

ExcursionMask make_mask(GridPtr grid, std::vector<std::uint8_t> inside, double level) {
  if (!grid) throw DomainError("null grid");
  if (inside.size() != grid->size()) throw DomainError("mask size does not match the grid");
  for (auto& v : inside) v = v ? 1 : 0;
  ExcursionMask m;
  m.grid = std::move(grid);
  m.level = level;
  m.inside = std::move(inside);
  return m;
}

std::vector<std::size_t> ComponentLabeling::cells_of(std::size_t id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] == static_cast<std::int32_t>(id)) out.push_back(i);
  return out;
}

double ComponentLabeling::component_area_sum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < label.size(); ++i)
    if (label[i] >= 0) s += grid->area(i);
  return s;
}

ComponentLabeling label_cells(GridPtr grid, const std::vector<std::uint8_t>& member) {
  if (!grid) throw DomainError("null grid");
  const Grid& g = *grid;
  const std::size_t n = g.size();
  if (member.size() != n) throw DomainError("membership size does not match the grid");
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!member[i]) continue;
    g.for_each_local_neighbor(i, [&](std::size_t j) {
      if (j > i && member[j]) uf.unite(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    });
  }
  if (g.has_pole_rings()) {
    for (int r : {0, g.rows() - 1}) {
      long first = -1;
      const std::size_t base = static_cast<std::size_t>(r) * g.cols();
      for (int c = 0; c < g.cols(); ++c) {
        if (!member[base + c]) continue;
        if (first < 0)
          first = static_cast<long>(base + c);
        else
          uf.unite(static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(base + c));
      }
    }
  }
  ComponentLabeling lab;
  lab.grid = grid;
  lab.label.assign(n, -1);
  std::vector<std::int32_t> id_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!member[i]) continue;
    const std::uint32_t root = uf.find(static_cast<std::uint32_t>(i));
    std::int32_t& id = id_of_root[root];
    if (id < 0) {
      id = static_cast<std::int32_t>(lab.components.size());
      Component c;
      c.id = static_cast<std::size_t>(id);
      c.representative = i;
      lab.components.push_back(c);
    }
    lab.label[i] = id;
    Component& c = lab.components[static_cast<std::size_t>(id)];
    c.area += g.area(i);
    ++c.cells;
    if (g.on_window_boundary(i)) c.touches_boundary = true;
  }
  return lab;
}

ComponentLabeling label_components(const ExcursionMask& mask) { return label_cells(mask.grid, mask.inside); }

// --- diameters -----------------------------------------------------------------

namespace {

struct FarPair {
  std::size_t a = 0, b = 0;
  double d = 0.0;
};

FarPair farthest_pair(const Grid& g, const std::vector<std::size_t>& cells) {
  FarPair best;
  if (cells.size() < 2) {
    if (!cells.empty()) best.a = best.b = cells[0];
    return best;
  }
  std::vector<Vec3> p(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) p[k] = g.center(cells[k]);
  std::size_t ba = 0, bb = 0;
  if (g.spherical()) {
    double mind = 2.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        const double d = p[i].dot(p[j]);
        if (d < mind) {
          mind = d;
          ba = i;
          bb = j;
        }
      }
  } else {
    double maxd = -1.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        const double d = (p[i] - p[j]).squaredNorm();
        if (d > maxd) {
          maxd = d;
          ba = i;
          bb = j;
        }
      }
  }
  best.a = cells[ba];
  best.b = cells[bb];
  best.d = g.distance(p[ba], p[bb]);
  return best;
}

// Monotone surrogate of distance: 1 - dot on the sphere, squared length in the plane.
inline double spread(const Grid& g, const Vec3& a, const Vec3& b) {
  return g.spherical() ? 1.0 - a.dot(b) : (a - b).squaredNorm();
}

// Farthest cell of `cells` from `from`.
template <class Cells>
std::pair<std::size_t, double> farthest_from(const Grid& g, const Cells& cells, std::size_t from) {
  const Vec3 x = g.center(from);
  std::size_t arg = from;
  double best = 0.0;
  for (auto c : cells) {
    const double d = spread(g, x, g.center(c));
    if (d > best) {
      best = d;
      arg = c;
    }
  }
  return {arg, g.distance(x, g.center(arg))};
}

// Boundary cells thinned to the sample cap, their farthest pair, then two double sweeps.
template <class Cells, class Member>
double subsampled_diameter(const Grid& g, const Cells& cells, Member&& member) {
  std::vector<std::size_t> boundary;
  for (auto c : cells) {
    bool edge = g.on_window_boundary(c);
    if (!edge) g.for_each_neighbor(c, [&](std::size_t j) { edge = edge || !member(j); });
    if (edge) boundary.push_back(c);
  }
  if (boundary.empty()) boundary.assign(cells.begin(), cells.end());
  std::vector<std::size_t> thin;
  const std::size_t stride = std::max<std::size_t>(1, (boundary.size() + kBoundarySampleCap - 1) / kBoundarySampleCap);
  for (std::size_t k = 0; k < boundary.size(); k += stride) thin.push_back(boundary[k]);
  FarPair fp = farthest_pair(g, thin);
  double best = fp.d;
  std::size_t ends[2] = {fp.a, fp.b};
  for (int round = 0; round < 2; ++round)
    for (std::size_t& e : ends) {
      const auto [arg, d] = farthest_from(g, cells, e);
      if (d > best) best = d;
      e = arg;
    }
  return best;
}

double subsampled_diameter(const Grid& g, std::vector<std::size_t> cells) {
  std::sort(cells.begin(), cells.end());
  return subsampled_diameter(g, cells, [&](std::size_t j) { return std::binary_search(cells.begin(), cells.end(), j); });
}

// Index of the largest-diameter component, ties to the smallest id. Diameters are bracketed
// by [rho, 2 rho] with rho the radius about the representative, and evaluated in descending
// order of the upper bound until no remaining component can win.
template <class Diameter>
std::pair<std::size_t, double> widest(const Grid& g, const std::vector<double>& rho, Diameter&& diameter) {
  const std::size_t nc = rho.size();
  const double cap = g.spherical() ? kPi : INFINITY;
  auto upper = [&](std::size_t id) { return std::min(cap, 2.0 * rho[id] * (1.0 + 1e-9) + 1e-12); };
  std::vector<std::size_t> order(nc);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return upper(a) > upper(b); });
  double best_d = -1.0;
  std::size_t best = 0;
  for (std::size_t id : order) {
    const double u = upper(id);
    if (u < best_d) break;
    if (u == best_d && id > best) continue;
    const double d = diameter(id);
    if (d > best_d || (d == best_d && id < best)) {
      best_d = d;
      best = id;
    }
  }
  return {best, best_d};
}

}  // namespace

double component_diameter(const Grid& grid, const std::vector<std::size_t>& cells, DiameterMode mode) {
  if (cells.empty()) throw DomainError("diameter of an empty cell set");
  if (cells.size() == 1) return 0.0;
  if (mode == DiameterMode::Auto) mode = cells.size() <= kExactDiameterCap ? DiameterMode::Exact : DiameterMode::Subsampled;
  if (mode == DiameterMode::Exact) {
    if (cells.size() > kExactDiameterCap)
      throw BudgetError("exact diameter limited to " + std::to_string(kExactDiameterCap) + " cells");
    return farthest_pair(grid, cells).d;
  }
  return subsampled_diameter(grid, cells);
}

Giant giant(const ComponentLabeling& lab, GiantBy by, DiameterMode mode) {
  if (lab.components.empty()) throw EmptyMaskError("no components: the excursion set is empty");
  const Grid& g = *lab.grid;
  const std::size_t nc = lab.components.size();
  std::vector<std::vector<std::size_t>> lists(nc);
  for (std::size_t i = 0; i < lab.label.size(); ++i)
    if (lab.label[i] >= 0) lists[static_cast<std::size_t>(lab.label[i])].push_back(i);
  auto diameter_of = [&](std::size_t id) { return component_diameter(g, lists[id], mode); };

  Giant out;
  if (by == GiantBy::Area) {
    std::size_t best = 0;
    for (std::size_t id = 1; id < nc; ++id)
      if (lab.components[id].area > lab.components[best].area) best = id;
    out.id = best;
    out.diameter = diameter_of(best);
  } else {
    std::vector<double> low(nc, 0.0);
    std::vector<Vec3> rep(nc);
    for (std::size_t id = 0; id < nc; ++id) rep[id] = g.center(lab.components[id].representative);
    for (std::size_t i = 0; i < lab.label.size(); ++i)
      if (lab.label[i] >= 0) {
        const auto id = static_cast<std::size_t>(lab.label[i]);
        low[id] = std::max(low[id], spread(g, rep[id], g.center(i)));
      }
    for (std::size_t id = 0; id < nc; ++id)
      low[id] = g.spherical() ? std::acos(std::clamp(1.0 - low[id], -1.0, 1.0)) : std::sqrt(low[id]);
    const auto [best, best_d] = widest(g, low, diameter_of);
    out.id = best;
    out.diameter = best_d;
  }
  out.area = lab.components[out.id].area;
  out.representative = lab.components[out.id].representative;
  return out;
}

// --- events --------------------------------------------------------------------------

EventSpec EventSpec::ann_cross(double r, double t, Vec3 center) {
  if (!(r > 0.0)) throw DomainError("event radius must be positive");
  EventSpec e;
  e.kind = Kind::AnnCross;
  e.r = r;
  e.level = t;
  e.center = center;
  return e;
}

EventSpec EventSpec::arm(double r, double t, Vec3 center) {
  if (!(r > 0.0)) throw DomainError("event radius must be positive");
  EventSpec e;
  e.kind = Kind::Arm;
  e.r = r;
  e.level = t;
  e.center = center;
  return e;
}

EventSpec EventSpec::trunc_arm(double r, double t, double window, Vec3 center) {
  if (!(r > 0.0)) throw DomainError("event radius must be positive");
  if (window < 0.0) throw DomainError("window side must be nonnegative");
  EventSpec e;
  e.kind = Kind::TruncArm;
  e.r = r;
  e.level = t;
  e.window = window;
  e.center = center;
  return e;
}

EventSpec EventSpec::eu(const Vec3& x, double r, double delta, double t) {
  if (!(r > 0.0)) throw DomainError("event radius must be positive");
  if (!(delta > 0.0 && delta <= 0.01)) throw DomainError("delta must lie in (0, 1/100]");
  EventSpec e;
  e.kind = Kind::EU;
  e.r = r;
  e.level = t;
  e.center = x;
  e.delta = delta;
  return e;
}

const char* to_string(EventSpec::Kind k) {
  switch (k) {
    case EventSpec::Kind::AnnCross: return "ann_cross";
    case EventSpec::Kind::Arm: return "arm";
    case EventSpec::Kind::TruncArm: return "trunc_arm";
    case EventSpec::Kind::EU: return "eu";
  }
  return "?";
}

namespace {

Vec3 event_center(const Grid& g, const EventSpec& ev) {
  if (g.spherical()) {
    if (std::abs(ev.center.norm() - 1.0) > 1e-9) throw DomainError("spherical events need a unit-vector center");
    return ev.center;
  }
  return Vec3(ev.center.x(), ev.center.y(), 0.0);
}

// Planar event regions must lie inside the simulation window.
void require_planar_window(const Grid& g, const Vec3& c, double half_extent) {
  if (g.kind() != GridKind::Planar) return;
  const double half = 0.5 * g.planar_side();
  if (std::max(std::abs(c.x()), std::abs(c.y())) + half_extent > half * (1.0 + 1e-12))
    throw GeometryError("event geometry extends beyond the simulation window");
}

// Closed square of half-side h about c (axis-aligned in the plane, exp-map image on the sphere).
struct SquareRegion {
  bool spherical;
  Vec3 c;
  double h;
  SphereSquare sq;
  SquareRegion(const Grid& g, const Vec3& center, double half) : spherical(g.spherical()), c(center), h(half) {
    if (spherical) sq = make_square(center, half);
  }
  bool contains(const Vec3& y) const {
    if (spherical) return square_contains(sq, y);
    const double eps = 1e-12 * std::max(1.0, h);
    return std::abs(y.x() - c.x()) <= h + eps && std::abs(y.y() - c.y()) <= h + eps;
  }
};

bool ann_cross(const ExcursionMask& m, const EventSpec& ev) {
  const Grid& g = *m.grid;
  const Vec3 c = event_center(g, ev);
  require_planar_window(g, c, 2.0 * ev.r);
  const SquareRegion inner(g, c, ev.r), outer(g, c, 2.0 * ev.r);
  const std::size_t n = g.size();
  std::vector<std::uint8_t> in_outer(n, 0), seen(n, 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.inside[i]) continue;
    const Vec3 y = g.center(i);
    if (!outer.contains(y)) continue;
    in_outer[i] = 1;
    if (inner.contains(y)) {
      seen[i] = 1;
      queue.push_back(i);
    }
  }
  auto touches_outside = [&](std::size_t i) {
    if (g.on_window_boundary(i)) return true;
    bool t = false;
    g.for_each_neighbor(i, [&](std::size_t j) { t = t || !outer.contains(g.center(j)); });
    return t;
  };
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (touches_outside(i)) return true;
    g.for_each_neighbor(i, [&](std::size_t j) {
      if (in_outer[j] && !seen[j]) {
        seen[j] = 1;
        queue.push_back(j);
      }
    });
  }
  return false;
}

bool arm(const ExcursionMask& m, const EventSpec& ev) {
  const Grid& g = *m.grid;
  const Vec3 c = event_center(g, ev);
  const bool truncated = ev.kind == EventSpec::Kind::TruncArm;
  double window = ev.window > 0.0 ? ev.window : 8.0 * ev.r;
  if (truncated && g.kind() == GridKind::Planar) {
    if (window > g.planar_side() * (1.0 + 1e-12)) throw GeometryError("TruncArm window exceeds the simulation window");
    require_planar_window(g, c, 0.5 * window);
  }
  if (!truncated) require_planar_window(g, c, ev.r);
  if (truncated && g.spherical() && 0.5 * window >= kPi) window = 0.0;
  auto in_window = [&](std::size_t i) {
    if (!truncated || window == 0.0) return true;
    const Vec3 y = g.center(i);
    if (g.spherical()) return sph_dist(c, y) <= 0.5 * window;
    const double h = 0.5 * window * (1.0 + 1e-12);
    return std::abs(y.x() - c.x()) <= h && std::abs(y.y() - c.y()) <= h;
  };
  const std::size_t start = g.nearest_cell(c);
  if (!m.inside[start] || !in_window(start)) return false;
  std::vector<std::uint8_t> seen(g.size(), 0);
  std::deque<std::size_t> queue{start};
  seen[start] = 1;
  bool reached = false, touches = false;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (g.distance(c, g.center(i)) >= ev.r) {
      reached = true;
      if (!truncated) return true;
    }
    if (g.on_window_boundary(i)) touches = true;
    g.for_each_neighbor(i, [&](std::size_t j) {
      if (!in_window(j)) {
        touches = true;
        return;
      }
      if (m.inside[j] && !seen[j]) {
        seen[j] = 1;
        queue.push_back(j);
      }
    });
  }
  return truncated ? reached && !touches : reached;
}

}  // namespace

bool event_occurs(const ExcursionMask& mask, const EventSpec& ev) {
  if (!mask.grid) throw DomainError("mask has no grid");
  switch (ev.kind) {
    case EventSpec::Kind::AnnCross: return ann_cross(mask, ev);
    case EventSpec::Kind::Arm:
    case EventSpec::Kind::TruncArm: return arm(mask, ev);
    case EventSpec::Kind::EU: return eu_event(mask, ev.center, ev.r, ev.delta);
  }
  return false;
}

bool event_occurs(const FieldSample& sample, const EventSpec& ev) {
  return event_occurs(excursion_mask(sample, ev.level), ev);
}

// --- EU -------------------------------------------------------------------------------

std::vector<EURegion> eu_region_family(const Vec3& x, double r) {
  if (!(r > 0.0) || 3.0 * r >= kPi / 2) throw DomainError("EU radius must satisfy 0 < 3r < pi/2");
  const TangentFrame fr = tangent_frame(x);
  std::vector<Vec3> centers{x};
  for (int k = 0; k < 6; ++k) {
    const double a = k * kPi / 3;
    centers.push_back(exp_map(fr, Vec2(std::cos(a), std::sin(a)) * (0.5 * r)));
  }
  for (int k = 0; k < 6; ++k) {
    const double a = k * kPi / 3 + kPi / 6;
    centers.push_back(exp_map(fr, Vec2(std::cos(a), std::sin(a)) * r));
  }
  std::vector<EURegion> out;
  for (const Vec3& c : centers)
    for (double f : {1.0, 1.5, 2.0}) {
      if (sph_dist(c, x) + f * r > 3.0 * r * (1.0 + 1e-12)) continue;
      EURegion reg;
      reg.is_cap = true;
      reg.cap = SphericalCap{c, f * r};
      out.push_back(reg);
    }
  for (double f : {1.0, 2.0})
    for (int k = 0; k < 4; ++k) {
      EURegion reg;
      reg.is_cap = false;
      reg.square = make_square(x, f * r, k * kPi / 8);
      out.push_back(reg);
    }
  return out;
}

Grid eu_grid(const Vec3& x, double r, double delta) {
  if (!(delta > 0.0 && delta <= 0.01)) throw DomainError("delta must lie in (0, 1/100]");
  const double R = 3.0 * r;
  const double theta = std::atan2(std::hypot(x.x(), x.y()), x.z());
  double phi = std::atan2(x.y(), x.x());
  if (phi < 0) phi += 2 * kPi;
  if (theta - R <= 0.0 || theta + R >= kPi) throw GeometryError("EU region D_{3r}(x) contains a pole");
  const int n_lat = static_cast<int>(std::ceil(kPi / (0.25 * delta * r)));
  const double dth = kPi / n_lat, dph = kPi / n_lat;
  const int row0 = std::max(0, static_cast<int>(std::floor((theta - R) / dth)) - 1);
  const int row1 = std::min(n_lat, static_cast<int>(std::ceil((theta + R) / dth)) + 1);
  const double half_phi = std::asin(std::min(1.0, std::sin(R) / std::sin(theta)));
  // Widest extent occurs off the centre row when the cap is far from the equator.
  double ext = half_phi;
  for (int k = 0; k <= 64; ++k) {
    const double th = theta - R + 2 * R * k / 64.0;
    const double cosd = std::cos(R), a = std::cos(theta) * std::cos(th), b = std::sin(theta) * std::sin(th);
    if (b <= 0) continue;
    const double cphi = (cosd - a) / b;
    if (cphi > -1 && cphi < 1) ext = std::max(ext, std::acos(cphi));
  }
  const int col_center = static_cast<int>(std::floor(phi / dph));
  const int half_cols = static_cast<int>(std::ceil(ext / dph)) + 2;
  int ncols = 2 * half_cols + 1;
  int col0 = col_center - half_cols;
  if (ncols >= 2 * n_lat) {
    ncols = 2 * n_lat;
    col0 = 0;
  }
  col0 = ((col0 % (2 * n_lat)) + 2 * n_lat) % (2 * n_lat);
  const std::size_t cells = static_cast<std::size_t>(row1 - row0) * ncols;
  if (cells > grid_cell_budget()) throw BudgetError("EU grid needs " + std::to_string(cells) + " cells");
  return Grid::sphere_window(n_lat, row0, row1, col0, ncols);
}

namespace {

// Components of a subset of the cells of D_{3r}(x), indexed by position in the local list.
struct LocalComponents {
  std::vector<std::int32_t> label;
  std::vector<std::vector<std::uint32_t>> cells;
};

// Cells of D_{3r}(x) with cached centres and forward adjacency, reused across the region family.
class EUWorkspace {
 public:
  EUWorkspace(const Grid& g, const Vec3& x, double r) : g_(g) {
    std::vector<std::int32_t> slot(g.size(), -1);
    const TangentFrame fr = tangent_frame(x);
    const double cos3 = std::cos(3.0 * r * (1.0 + 1e-9));
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Vec3 y = g.center(i);
      if (y.dot(x) < cos3) continue;
      slot[i] = static_cast<std::int32_t>(local_.size());
      local_.push_back(i);
      pts_.push_back(y);
      w_.push_back(log_map(fr, y));
    }
    const std::size_t n = local_.size();
    offset_.reserve(n + 1);
    offset_.push_back(0);
    open_.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t i = local_[p];
      bool open = g.on_window_boundary(i);
      g.for_each_neighbor(i, [&](std::size_t j) {
        const std::int32_t q = slot[j];
        if (q < 0)
          open = true;
        else if (q > static_cast<std::int32_t>(p))
          forward_.push_back(static_cast<std::uint32_t>(q));
      });
      open_[p] = open;
      offset_.push_back(static_cast<std::uint32_t>(forward_.size()));
    }
    parent_.resize(n);
    in_region_.assign(n, 0);
    member_.assign(n, 0);
    edge_.assign(n, 0);
    parts_.label.assign(n, -1);
    holes_.label.assign(n, -1);
  }

  std::size_t cell(std::size_t p) const { return local_[p]; }
  const std::vector<std::uint32_t>& region() const { return region_; }
  std::vector<std::uint8_t>& member() { return member_; }
  LocalComponents& parts() { return parts_; }
  LocalComponents& holes() { return holes_; }

  void set_region(const EURegion& u) {
    for (std::uint32_t p : region_) {
      in_region_[p] = 0;
      member_[p] = 0;
      parts_.label[p] = holes_.label[p] = -1;
    }
    region_.clear();
    if (u.is_cap) {
      const double c = std::cos(u.cap.radius + 1e-12);
      for (std::size_t p = 0; p < local_.size(); ++p)
        if (pts_[p].dot(u.cap.center) >= c) region_.push_back(static_cast<std::uint32_t>(p));
    } else {
      // Squares are centred at x; their log coordinates are rotations of those in x's frame.
      const TangentFrame sf = u.square.frame();
      const TangentFrame xf = tangent_frame(u.square.center());
      const double ca = sf.e1.dot(xf.e1), sa = sf.e1.dot(xf.e2);
      const double h = u.square.half_side + 1e-12;
      for (std::size_t p = 0; p < local_.size(); ++p) {
        const Vec2& w = w_[p];
        const double a = ca * w.x() + sa * w.y(), b = -sa * w.x() + ca * w.y();
        if (std::max(std::abs(a), std::abs(b)) <= h) region_.push_back(static_cast<std::uint32_t>(p));
      }
    }
    for (std::uint32_t p : region_) in_region_[p] = 1;
  }

  // Components of the member cells of the current region.
  void label(LocalComponents& out) {
    for (std::uint32_t p : region_) parent_[p] = p;
    auto find = [&](std::uint32_t q) {
      while (parent_[q] != q) {
        parent_[q] = parent_[parent_[q]];
        q = parent_[q];
      }
      return q;
    };
    for (std::uint32_t p : region_) {
      if (!member_[p]) continue;
      for (std::uint32_t k = offset_[p]; k < offset_[p + 1]; ++k) {
        const std::uint32_t q = forward_[k];
        if (!in_region_[q] || !member_[q]) continue;
        const std::uint32_t a = find(p), b = find(q);
        if (a < b)
          parent_[b] = a;
        else if (b < a)
          parent_[a] = b;
      }
    }
    out.cells.clear();
    for (std::uint32_t p : region_) {
      if (!member_[p]) {
        out.label[p] = -1;
        continue;
      }
      const std::uint32_t root = find(p);
      if (root == p) {
        out.label[p] = static_cast<std::int32_t>(out.cells.size());
        out.cells.emplace_back();
      } else {
        out.label[p] = out.label[root];
      }
      out.cells[static_cast<std::size_t>(out.label[p])].push_back(p);
    }
  }

  // Radius about the first cell of each component.
  std::vector<double> radii(const LocalComponents& lc) const {
    std::vector<double> rho(lc.cells.size());
    for (std::size_t id = 0; id < lc.cells.size(); ++id) {
      const Vec3& rep = pts_[lc.cells[id][0]];
      double m = 1.0;
      for (std::uint32_t p : lc.cells[id]) m = std::min(m, rep.dot(pts_[p]));
      rho[id] = std::acos(std::clamp(m, -1.0, 1.0));
    }
    return rho;
  }

  // Exact up to the cap; beyond it, boundary cells thinned to the sample cap give a farthest
  // pair, refined by two sweeps over the whole boundary.
  double diameter(const LocalComponents& lc, std::size_t id) {
    const auto& ps = lc.cells[id];
    if (ps.size() <= kExactDiameterCap) return farthest(ps).d;
    const auto want = static_cast<std::int32_t>(id);
    std::vector<std::uint32_t> boundary;
    for (std::uint32_t p : region_) {
      const bool in = lc.label[p] == want;
      if (in && open_[p]) edge_[p] = 1;
      for (std::uint32_t k = offset_[p]; k < offset_[p + 1]; ++k) {
        const std::uint32_t q = forward_[k];
        if (in != (lc.label[q] == want)) edge_[p] = edge_[q] = 1;
      }
    }
    for (std::uint32_t p : ps)
      if (edge_[p]) boundary.push_back(p);
    for (std::uint32_t p : region_) edge_[p] = 0;
    // Cells just outside the region carry no mark that matters, but clear them too.
    for (std::uint32_t p : ps)
      for (std::uint32_t k = offset_[p]; k < offset_[p + 1]; ++k) edge_[forward_[k]] = 0;
    if (boundary.empty()) boundary = ps;
    std::vector<std::uint32_t> thin;
    const std::size_t stride = std::max<std::size_t>(1, (boundary.size() + kBoundarySampleCap - 1) / kBoundarySampleCap);
    for (std::size_t k = 0; k < boundary.size(); k += stride) thin.push_back(boundary[k]);
    const Pair fp = farthest(thin);
    double best = fp.d;
    std::uint32_t ends[2] = {fp.a, fp.b};
    for (int round = 0; round < 2; ++round)
      for (std::uint32_t& e : ends) {
        double m = 1.0;
        std::uint32_t arg = e;
        for (std::uint32_t p : boundary) {
          const double d = pts_[e].dot(pts_[p]);
          if (d < m) {
            m = d;
            arg = p;
          }
        }
        best = std::max(best, sph_dist(pts_[e], pts_[arg]));
        e = arg;
      }
    return best;
  }

 private:
  struct Pair {
    std::uint32_t a = 0, b = 0;
    double d = 0.0;
  };
  Pair farthest(const std::vector<std::uint32_t>& ps) const {
    Pair out{ps[0], ps[0], 0.0};
    double m = 2.0;
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = i + 1; j < ps.size(); ++j) {
        const double d = pts_[ps[i]].dot(pts_[ps[j]]);
        if (d < m) {
          m = d;
          out.a = ps[i];
          out.b = ps[j];
        }
      }
    out.d = sph_dist(pts_[out.a], pts_[out.b]);
    return out;
  }

  const Grid& g_;
  std::vector<std::size_t> local_;
  std::vector<Vec3> pts_;
  std::vector<Vec2> w_;
  std::vector<std::uint32_t> offset_, forward_, parent_;
  std::vector<std::uint8_t> open_, in_region_, member_, edge_;
  std::vector<std::uint32_t> region_;
  LocalComponents parts_, holes_;
};

}  // namespace

bool eu_event(const ExcursionMask& mask, const Vec3& x, double r, double delta) {
  if (!(delta > 0.0 && delta <= 0.01)) throw DomainError("delta must lie in (0, 1/100]");
  if (!mask.grid) throw DomainError("mask has no grid");
  const Grid& g = *mask.grid;
  if (!g.spherical()) throw DomainError("EU events are defined on the sphere");
  if (g.spacing() > 0.25 * delta * r * (1.0 + 1e-9))
    throw ResolutionError("grid spacing exceeds delta r / 4 for the EU event");
  const double dr = delta * r;
  const auto family = eu_region_family(x, r);
  EUWorkspace ws(g, x, r);
  auto& member = ws.member();
  auto& parts = ws.parts();
  auto& holes = ws.holes();
  for (const EURegion& u : family) {
    ws.set_region(u);
    bool any = false;
    for (std::uint32_t p : ws.region()) {
      member[p] = mask.inside[ws.cell(p)];
      any = any || member[p];
    }
    if (!any) return false;
    ws.label(parts);
    const auto vd = widest(g, ws.radii(parts), [&](std::size_t id) { return ws.diameter(parts, id); }).first;
    for (std::uint32_t p : ws.region()) member[p] = parts.label[p] != static_cast<std::int32_t>(vd);
    ws.label(holes);
    const auto rho = ws.radii(holes);
    for (std::size_t id = 0; id < rho.size(); ++id) {
      if (rho[id] >= dr) return false;
      if (2.0 * rho[id] < dr) continue;
      if (ws.diameter(holes, id) >= dr) return false;
    }
  }
  return true;
}

bool eu_event(const FieldSample& sample, const Vec3& x, double r, double delta, double t) {
  return eu_event(excursion_mask(sample, t), x, r, delta);
}

}  // namespace exlab

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
#include "exlab/tiling.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "exlab/errors.hpp"
#include "exlab/rng.hpp"

namespace exlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Uniform hash of unit vectors into cubes of a fixed chord side.
class PointHash {
 public:
  explicit PointHash(double side) : side_(side) {}
  void insert(const Vec3& p, std::uint32_t id) { buckets_[key(cell(p))].push_back(id); }
  // Ids within `reach` cells of p's cell in each coordinate.
  template <class F>
  void for_each_near(const Vec3& p, int reach, F&& f) const {
    const auto c = cell(p);
    for (int dx = -reach; dx <= reach; ++dx)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dz = -reach; dz <= reach; ++dz) {
          const auto it = buckets_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == buckets_.end()) continue;
          for (std::uint32_t id : it->second) f(id);
        }
  }

 private:
  std::array<int, 3> cell(const Vec3& p) const {
    return {static_cast<int>(std::floor(p.x() / side_)), static_cast<int>(std::floor(p.y() / side_)),
            static_cast<int>(std::floor(p.z() / side_))};
  }
  static std::int64_t key(const std::array<int, 3>& c) {
    return (static_cast<std::int64_t>(c[0] + 100000) * 200003 + (c[1] + 100000)) * 200003 + (c[2] + 100000);
  }
  double side_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> buckets_;
};

std::vector<Vec3> boundary_samples(const SphereSquare& sq, int per_edge = 32) {
  const TangentFrame f = sq.frame();
  const double h = sq.half_side;
  std::vector<Vec3> out;
  out.reserve(4 * per_edge);
  for (int k = 0; k < per_edge; ++k) {
    const double t = -h + 2.0 * h * k / per_edge;
    out.push_back(exp_map(f, Vec2(t, -h)));
    out.push_back(exp_map(f, Vec2(h, t)));
    out.push_back(exp_map(f, Vec2(-t, h)));
    out.push_back(exp_map(f, Vec2(-h, -t)));
  }
  return out;
}

double sampled_distance(const SphereSquare& a, const std::vector<Vec3>& ba, const SphereSquare& b,
                        const std::vector<Vec3>& bb) {
  if (square_contains(a, b.center()) || square_contains(b, a.center())) return 0.0;
  double best = -2.0;
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < ba.size(); ++i)
    for (std::size_t j = 0; j < bb.size(); ++j) {
      const double d = ba[i].dot(bb[j]);
      if (d > best) {
        best = d;
        ia = i;
        ib = j;
      }
    }
  return sph_dist(ba[ia], bb[ib]);
}

}  // namespace

// --- regions -----------------------------------------------------------------------------

TilingRegion TilingRegion::make_cap(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw DomainError("tiling region radius must be positive");
  TilingRegion r;
  r.is_cap = true;
  r.cap = SphericalCap{make_point(center), std::min(radius, kPi)};
  return r;
}

TilingRegion TilingRegion::make_square(const SphereSquare& sq) {
  TilingRegion r;
  r.is_cap = false;
  r.square = sq;
  return r;
}

TilingRegion TilingRegion::sphere() { return make_cap(north_pole(), kPi); }

double TilingRegion::area() const { return is_cap ? cap_area(cap.radius) : square.area(); }

std::string TilingRegion::describe() const {
  std::ostringstream os;
  if (full_sphere())
    os << "sphere";
  else if (is_cap)
    os << "cap(" << cap.radius << ")";
  else
    os << "square(" << square.half_side << ")";
  return os.str();
}

SphereSquare tile_at(const Vec3& c, const Vec3& heading, double u) {
  const Vec3 base = make_point(c);
  const Vec3 e1 = (heading - heading.dot(base) * base).normalized();
  Mat3 r;
  r.col(0) = e1;
  r.col(1) = base.cross(e1);
  r.col(2) = base;
  return SphereSquare(r, u);
}

double tile_distance(const SphereSquare& a, const SphereSquare& b) {
  return sampled_distance(a, boundary_samples(a), b, boundary_samples(b));
}

// --- checking ----------------------------------------------------------------------------

int TilingReport::failures() const {
  return !covered + !exclusive_ok + !count_ok + !neighbors_ok + !isoperimetry_ok;
}

std::string TilingReport::summary() const {
  std::ostringstream os;
  os << "coverage " << (covered ? "ok" : "FAIL") << " (" << coverage_samples << " samples";
  if (!covered) os << ", uncovered point " << uncovered_witness.transpose();
  os << "); exclusive " << (exclusive_ok ? "ok" : "FAIL") << " (min " << min_exclusive_fraction << " at tile "
     << worst_tile << "); count " << (count_ok ? "ok" : "FAIL") << " (" << count << " <= " << count_bound
     << "); neighbors " << (neighbors_ok ? "ok" : "FAIL") << " (max " << max_neighbors << " at tile "
     << busiest_tile << "); isoperimetry " << (isoperimetry_ok ? "ok" : "FAIL");
  if (!isoperimetry_ok) os << " (s=" << failing_s << ", largest connected " << largest_survivor << ")";
  return os.str();
}

std::vector<std::vector<std::size_t>> tile_graph(const Tiling& t) {
  const std::size_t n = t.tiles.size();
  std::vector<std::vector<std::size_t>> adj(n);
  if (n == 0) return adj;
  const double u = t.u;
  PointHash hash(u * std::sqrt(2.0) * 1.0001);
  std::vector<std::vector<Vec3>> edge(n);
  for (std::size_t i = 0; i < n; ++i) {
    hash.insert(t.tiles[i].center(), static_cast<std::uint32_t>(i));
    edge[i] = boundary_samples(t.tiles[i]);
  }
  const double reach = 2.0 * std::sqrt(2.0) * u + u;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 ci = t.tiles[i].center();
    hash.for_each_near(ci, 3, [&](std::uint32_t j) {
      if (j <= i) return;
      if (sph_dist(ci, t.tiles[j].center()) > reach * 1.0001) return;
      if (sampled_distance(t.tiles[i], edge[i], t.tiles[j], edge[j]) <= u * (1.0 + 1e-9)) {
        adj[i].push_back(j);
        adj[j].push_back(i);
      }
    });
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

namespace {

std::vector<Vec3> coverage_points(const TilingRegion& reg, double h) {
  std::vector<Vec3> pts;
  if (reg.is_cap) {
    const TangentFrame f = tangent_frame(reg.cap.center);
    const double R = std::min(reg.cap.radius, kPi);
    const int nr = std::max(1, static_cast<int>(std::ceil(R / h)));
    pts.push_back(reg.cap.center);
    for (int k = 1; k <= nr; ++k) {
      const double rho = R * k / nr;
      const int m = std::max(4, static_cast<int>(std::ceil(2 * kPi * std::sin(rho) / h)));
      for (int j = 0; j < m; ++j) {
        const double a = 2 * kPi * (j + 0.5 * (k & 1)) / m;
        pts.push_back(exp_map(f, Vec2(std::cos(a), std::sin(a)) * rho));
      }
    }
  } else {
    const TangentFrame f = reg.square.frame();
    const double v = reg.square.half_side;
    const int n = std::max(2, static_cast<int>(std::ceil(2 * v / h)) + 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        pts.push_back(exp_map(f, Vec2(-v + 2 * v * i / (n - 1), -v + 2 * v * j / (n - 1))));
  }
  return pts;
}

}  // namespace

TilingReport check_tiling(const Tiling& t, const TilingCheckOptions& opt) {
  TilingReport rep;
  const std::size_t n = t.tiles.size();
  rep.count = n;
  const double u = t.u;
  const double su = square_area(u);
  rep.count_bound = t.region.area() * (1.0 + t.epsilon) / su;
  rep.count_ok = static_cast<double>(n) <= rep.count_bound;
  if (n == 0) {
    rep.covered = false;
    rep.uncovered_witness = t.region.center();
    rep.exclusive_ok = rep.neighbors_ok = true;
    return rep;
  }
  PointHash hash(u * std::sqrt(2.0) * 1.0001);
  for (std::size_t i = 0; i < n; ++i) hash.insert(t.tiles[i].center(), static_cast<std::uint32_t>(i));

  // (i) coverage on a sample of the closed region, exclusivity by quadrature in log coordinates.
  const auto pts = coverage_points(t.region, opt.coverage_step * u);
  rep.coverage_samples = pts.size();
  for (const Vec3& p : pts) {
    bool hit = false;
    hash.for_each_near(p, 1, [&](std::uint32_t j) { hit = hit || square_contains(t.tiles[j], p, 1e-12); });
    if (!hit) {
      rep.covered = false;
      rep.uncovered_witness = p;
      break;
    }
  }
  const int q = opt.quadrature;
  const double step = 2.0 * u / q;
  for (std::size_t i = 0; i < n; ++i) {
    const TangentFrame f = t.tiles[i].frame();
    double total = 0.0, mine = 0.0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        const Vec2 w(-u + (a + 0.5) * step, -u + (b + 0.5) * step);
        const double r = w.norm();
        const double jac = r > 0 ? std::sin(r) / r : 1.0;
        const Vec3 p = exp_map(f, w);
        bool shared = false;
        hash.for_each_near(p, 1, [&](std::uint32_t j) {
          shared = shared || (j != i && square_contains(t.tiles[j], p, 0.0));
        });
        total += jac;
        if (!shared) mine += jac;
      }
    const double frac = mine / total;
    if (frac < rep.min_exclusive_fraction) {
      rep.min_exclusive_fraction = frac;
      rep.worst_tile = i;
    }
  }
  rep.exclusive_ok = rep.min_exclusive_fraction >= 1.0 - t.epsilon;

  // (ii) local boundedness
  const auto adj = tile_graph(t);
  for (std::size_t i = 0; i < n; ++i)
    if (static_cast<int>(adj[i].size()) > rep.max_neighbors) {
      rep.max_neighbors = static_cast<int>(adj[i].size());
      rep.busiest_tile = i;
    }
  rep.neighbors_ok = rep.max_neighbors <= 8;

  // (iii) isoperimetry: random deletions of s tiles leave a u-connected set of n - 4 s^2 tiles
  CounterStream rng(opt.seed, StreamTag::Auxiliary);
  const int smax = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<std::size_t> perm(n);
  std::vector<int> seen(n, -1);
  int stamp = 0;
  for (int s = 1; s <= smax && rep.isoperimetry_ok; ++s) {
    const double need = static_cast<double>(n) - 4.0 * s * s;
    if (need <= 1.0) break;
    for (int trial = 0; trial < opt.deletion_trials; ++trial) {
      std::iota(perm.begin(), perm.end(), 0);
      for (int k = 0; k < s; ++k) {
        const std::size_t j = k + static_cast<std::size_t>(rng.next_uniform() * (n - k));
        std::swap(perm[k], perm[std::min(j, n - 1)]);
      }
      ++stamp;
      for (int k = 0; k < s; ++k) seen[perm[k]] = stamp;
      std::size_t largest = 0;
      for (std::size_t start = 0; start < n; ++start) {
        if (seen[start] == stamp) continue;
        std::size_t size = 0;
        std::deque<std::size_t> dq{start};
        seen[start] = stamp;
        while (!dq.empty()) {
          const std::size_t i = dq.front();
          dq.pop_front();
          ++size;
          for (std::size_t j : adj[i])
            if (seen[j] != stamp) {
              seen[j] = stamp;
              dq.push_back(j);
            }
        }
        largest = std::max(largest, size);
      }
      if (static_cast<double>(largest) < need) {
        rep.isoperimetry_ok = false;
        rep.failing_s = s;
        rep.failing_deletion.assign(perm.begin(), perm.begin() + s);
        rep.largest_survivor = largest;
        break;
      }
    }
  }
  return rep;
}

// --- curvature threshold ---------------------------------------------------------------

namespace {

// Heading at exp_f(w) obtained by parallel transport of e1 along the radial geodesic.
Vec3 transported_e1(const TangentFrame& f, const Vec2& w) {
  const double rho = w.norm();
  if (rho == 0.0) return f.e1;
  const Vec3 d = (w.x() * f.e1 + w.y() * f.e2) / rho;
  const Vec3 dperp = f.base.cross(d);
  const Vec3 d_at = -std::sin(rho) * f.base + std::cos(rho) * d;
  return f.e1.dot(d) * d_at + f.e1.dot(dperp) * dperp;
}

// Slight overlap closes the hairline gaps left by curvature along shared edges.
constexpr double kLatticeSqueeze = 1e-3;

std::vector<SphereSquare> lattice_tiles(const TangentFrame& f, double u, double ox, double oy,
                                        const std::function<bool(const Vec2&)>& keep, int reach) {
  std::vector<SphereSquare> tiles;
  const double step = 2.0 * u * (1.0 - kLatticeSqueeze);
  for (int i = -reach; i <= reach; ++i)
    for (int j = -reach; j <= reach; ++j) {
      const Vec2 w(step * i + ox * (1.0 - kLatticeSqueeze), step * j + oy * (1.0 - kLatticeSqueeze));
      if (w.norm() >= kPi - 1e-9 || !keep(w)) continue;
      tiles.push_back(tile_at(exp_map(f, w), transported_e1(f, w), u));
    }
  return tiles;
}

}  // namespace

double lattice_overlap_error(double u) {
  if (!(u > 0.0 && u * 5.0 * std::sqrt(2.0) < kPi)) throw DomainError("lattice patch does not fit on the sphere");
  Tiling t;
  t.u = u;
  t.epsilon = 0.0;
  const TangentFrame f = tangent_frame(north_pole());
  t.tiles = lattice_tiles(f, u, 0.0, 0.0, [](const Vec2&) { return true; }, 2);
  double worst = 0.0;
  const int q = 40;
  const double step = 2.0 * u / q;
  for (std::size_t i = 0; i < t.tiles.size(); ++i) {
    const Vec2 w0 = log_map(f, t.tiles[i].center());
    if (std::max(std::abs(w0.x()), std::abs(w0.y())) > 1.5 * u) continue;
    const TangentFrame fi = t.tiles[i].frame();
    double total = 0.0, shared = 0.0;
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        const Vec2 w(-u + (a + 0.5) * step, -u + (b + 0.5) * step);
        const double r = w.norm();
        const double jac = r > 0 ? std::sin(r) / r : 1.0;
        const Vec3 p = exp_map(fi, w);
        bool other = false;
        for (std::size_t j = 0; j < t.tiles.size() && !other; ++j)
          other = j != i && square_contains(t.tiles[j], p, 0.0);
        total += jac;
        if (other) shared += jac;
      }
    worst = std::max(worst, shared / total);
  }
  return worst;
}

double curvature_threshold(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  static std::mutex mu;
  static std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(eps); it != cache.end()) return it->second;
  }
  const double target = eps / 2.0;
  double lo = 1e-3, hi = 0.99 * kPi / (5.0 * std::sqrt(2.0));
  double result;
  if (lattice_overlap_error(hi) < target) {
    result = hi;
  } else if (lattice_overlap_error(lo) >= target) {
    result = 0.0;
  } else {
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      (lattice_overlap_error(mid) < target ? lo : hi) = mid;
    }
    result = lo;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[eps] = result;
  return result;
}

// --- construction ------------------------------------------------------------------------

namespace {

// Half-width in angle of the arc at distance rho from the pole covered by a tile centred at
// distance c on the meridian phi = 0, first axis tangential; 0 when the arc misses the tile.
double ring_half_width(double c, double u, double rho) {
  const TangentFrame f = tangent_frame(north_pole());
  const SphereSquare sq = tile_at(exp_map(f, Vec2(c, 0.0)), f.e2, u);
  auto at = [&](double a) { return exp_map(f, Vec2(std::cos(a), std::sin(a)) * rho); };
  if (!square_contains(sq, at(0.0), 0.0)) return 0.0;
  double lo = 0.0, hi = std::min(kPi, 4.0 * u / std::max(std::sin(rho), 1e-3));
  if (square_contains(sq, at(hi), 0.0)) return hi;
  for (int it = 0; it < 50; ++it) {
    const double mid = 0.5 * (lo + hi);
    (square_contains(sq, at(mid), 0.0) ? lo : hi) = mid;
  }
  return lo;
}

// Tiles per ring for K rings filling [start, outer] radially, or an empty vector if some ring
// cannot cover its annulus.
std::vector<int> ring_counts(double u, double start, double outer, int K) {
  const double H = (outer - start) / K;
  std::vector<int> m(K);
  for (int k = 0; k < K; ++k) {
    const double c = start + (k + 0.5) * H;
    double hw = kPi;
    for (int i = 0; i <= 16; ++i) hw = std::min(hw, ring_half_width(c, u, c - 0.5 * H + H * i / 16.0));
    if (!(hw > 1e-9)) return {};
    // Slack for the spacing of the check's coverage samples.
    m[k] = std::max(3, static_cast<int>(std::ceil(kPi / (hw * (1.0 - 1e-6)))));
  }
  return m;
}

Tiling ring_design(double u, double eps, const TilingRegion& reg) {
  Tiling t;
  t.u = u;
  t.epsilon = eps;
  t.region = reg;
  t.design = "rings";
  const Vec3 x = reg.center();
  const TangentFrame f = tangent_frame(x);
  const bool full = reg.full_sphere();
  const double outer = full ? kPi - u : reg.cap.radius;
  t.tiles.push_back(tile_at(x, f.e1, u));
  if (full) t.tiles.push_back(tile_at(-x, f.e1, u));
  if (outer <= u) return t;
  const int K0 = std::max(1, static_cast<int>(std::ceil((outer - u) / (2.0 * u))));
  std::vector<int> best;
  int bestK = 0;
  long best_total = -1;
  for (int K = K0; K <= 2 * K0 + 2; ++K) {
    const auto m = ring_counts(u, u, outer, K);
    if (m.empty()) continue;
    const long total = std::accumulate(m.begin(), m.end(), 0L);
    if (best_total < 0 || total < best_total) {
      best_total = total;
      best = m;
      bestK = K;
    }
  }
  if (best.empty()) throw ConsistencyError("ring design failed to close");
  const double H = (outer - u) / bestK;
  double phase = 0.0;
  for (int k = 0; k < bestK; ++k) {
    const double c = u + (k + 0.5) * H;
    const int m = best[k];
    phase += kPi / m;
    for (int j = 0; j < m; ++j) {
      const double a = phase + 2.0 * kPi * j / m;
      const Vec2 dir(std::cos(a), std::sin(a));
      const Vec3 east = -dir.y() * f.e1 + dir.x() * f.e2;
      t.tiles.push_back(tile_at(exp_map(f, dir * c), east, u));
    }
  }
  return t;
}

Tiling lattice_design(double u, double eps, const TilingRegion& reg, double offset) {
  Tiling t;
  t.u = u;
  t.epsilon = eps;
  t.region = reg;
  t.design = offset == 0.0 ? "lattice" : "lattice-offset";
  const TangentFrame f = reg.is_cap ? tangent_frame(reg.cap.center) : reg.square.frame();
  const double v = reg.size();
  const int reach = static_cast<int>(std::ceil((v + 2.0 * u) / (2.0 * u))) + 1;
  std::function<bool(const Vec2&)> keep;
  if (reg.is_cap) {
    keep = [u, v](const Vec2& w) {
      const double dx = std::max(0.0, std::abs(w.x()) - u), dy = std::max(0.0, std::abs(w.y()) - u);
      return std::hypot(dx, dy) < v - 1e-9 * u;
    };
  } else {
    keep = [u, v](const Vec2& w) { return std::abs(w.x()) - u < v - 1e-9 * u && std::abs(w.y()) - u < v - 1e-9 * u; };
  }
  t.tiles = lattice_tiles(f, u, offset, offset, keep, reach);
  return t;
}

}  // namespace

Tiling build_tiling(double u, double eps, const TilingRegion& region) {
  if (!(u > 0.0)) throw DomainError("tile half-side must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0,1)");
  if (region.size() < u * (1.0 - 1e-12)) throw DomainError("region smaller than one tile");
  if (std::abs(region.size() - u) <= 1e-12 * std::max(1.0, u)) {
    Tiling t;
    t.u = u;
    t.epsilon = eps;
    t.region = region;
    t.design = "single";
    t.tiles.push_back(region.is_cap ? tile_at(region.cap.center, tangent_frame(region.cap.center).e1, u)
                                    : SphereSquare(region.square.rotation, u));
    return t;
  }
  const double rho = curvature_threshold(eps);
  if (!(u < rho)) {
    Tiling none;
    none.u = u;
    none.epsilon = eps;
    none.region = region;
    throw TilingInfeasible("u = " + std::to_string(u) + " is not below the curvature threshold " +
                               std::to_string(rho),
                           none, TilingReport{});
  }
  std::vector<Tiling> candidates;
  if (!region.full_sphere()) {
    const int m = static_cast<int>(std::ceil(region.size() / u - 1e-9));
    const double first = (region.is_cap || m % 2 == 1) ? 0.0 : u;
    candidates.push_back(lattice_design(u, eps, region, first));
    candidates.push_back(lattice_design(u, eps, region, u - first));
  }
  if (region.is_cap) candidates.push_back(ring_design(u, eps, region));
  std::size_t best = 0;
  TilingReport best_rep;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const TilingReport rep = check_tiling(candidates[k]);
    if (rep.pass()) return candidates[k];
    if (k == 0 || rep.failures() < best_rep.failures() ||
        (rep.failures() == best_rep.failures() && rep.count < best_rep.count)) {
      best = k;
      best_rep = rep;
    }
  }
  throw TilingInfeasible("no candidate design satisfies the tiling axioms for u = " + std::to_string(u) +
                             ", eps = " + std::to_string(eps) + " on " + region.describe() + "; best (" +
                             candidates[best].design + "): " + best_rep.summary(),
                         candidates[best], best_rep);
}

}  // namespace exlab

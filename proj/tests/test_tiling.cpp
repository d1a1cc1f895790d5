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
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "exlab/errors.hpp"
#include "exlab/tiling.hpp"

using namespace exlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Minimum distance between densely sampled boundaries.
double dense_distance(const SphereSquare& a, const SphereSquare& b, int per_edge) {
  auto ring = [&](const SphereSquare& s) {
    std::vector<Vec3> pts;
    const TangentFrame f = s.frame();
    const double h = s.half_side;
    for (int k = 0; k <= per_edge; ++k) {
      const double t = -h + 2 * h * k / per_edge;
      for (Vec2 w : {Vec2(t, -h), Vec2(t, h), Vec2(-h, t), Vec2(h, t)}) pts.push_back(exp_map(f, w));
    }
    return pts;
  };
  const auto pa = ring(a), pb = ring(b);
  double best = kPi;
  for (const auto& p : pa)
    for (const auto& q : pb) best = std::min(best, sph_dist(p, q));
  return best;
}

Tiling square_lattice(double u, double per_side) {
  const SphereSquare region = make_square(from_spherical(1.1, 0.3), u * per_side, 0.2);
  return build_tiling(u, 0.1, TilingRegion::make_square(region));
}

}  // namespace

TEST_CASE("tile distance") {
  const double u = 0.05;
  const Vec3 e = Vec3::UnitY();
  const auto a = tile_at(from_spherical(kPi / 2, 0.0), e, u);
  const auto touching = tile_at(from_spherical(kPi / 2, 2 * u), e, u);
  CHECK(tile_distance(a, touching) < 1e-12);
  CHECK(tile_distance(a, a) == 0.0);
  for (double gap : {0.3 * u, u, 1.7 * u}) {
    const auto b = tile_at(from_spherical(kPi / 2 + 0.4 * u, 2 * u + gap), e, u);
    CHECK(std::abs(tile_distance(a, b) - dense_distance(a, b, 800)) < 1e-4);
  }
}

TEST_CASE("degenerate region gives a single covering tile") {
  const double u = 0.1;
  const auto t = build_tiling(u, 0.1, TilingRegion::make_cap(from_spherical(0.7, 1.0), u));
  REQUIRE(t.tiles.size() == 1);
  const auto rep = check_tiling(t);
  CHECK(rep.covered);
  CHECK(rep.neighbors_ok);
  CHECK(rep.exclusive_ok);
  // One tile has more area than the cap it covers; the count bound cannot hold here.
  CHECK_FALSE(rep.count_ok);
  CHECK_THROWS_AS(build_tiling(u, 0.1, TilingRegion::make_cap(north_pole(), 0.5 * u)), DomainError);
}

TEST_CASE("square regions tile by the mapped lattice") {
  const double u = 0.02;
  const auto t = square_lattice(u, 4.85);
  CHECK(t.tiles.size() == 25);
  const auto rep = check_tiling(t);
  CHECK(rep.pass());
  CHECK(rep.count <= rep.count_bound);
  const auto adj = tile_graph(t);
  CHECK(adj[12].size() == 8);
  for (const auto& a : adj) CHECK(a.size() <= 8);

  const auto even = square_lattice(u, 5.85);
  CHECK(even.tiles.size() == 36);
  CHECK(check_tiling(even).pass());
}

TEST_CASE("small caps are tiled and every tile has at most eight neighbours") {
  const auto t = build_tiling(0.01, 0.1, TilingRegion::make_cap(from_spherical(2.0, -1.0), 0.5));
  const auto rep = check_tiling(t);
  CHECK(rep.pass());
  CHECK(rep.max_neighbors <= 8);
  CHECK(rep.count <= TilingRegion::make_cap(north_pole(), 0.5).area() * 1.1 / square_area(0.01));
}

TEST_CASE("deliberate violations are reported with witnesses") {
  auto t = square_lattice(0.02, 4.85);
  t.tiles.erase(t.tiles.begin() + 12);
  const auto rep = check_tiling(t);
  CHECK_FALSE(rep.covered);
  CHECK(t.region.contains(rep.uncovered_witness));
  for (const auto& tile : t.tiles) CHECK_FALSE(square_contains(tile, rep.uncovered_witness));

  Tiling fake;
  fake.u = 0.05;
  fake.epsilon = 0.1;
  fake.region = TilingRegion::make_cap(north_pole(), 0.5);
  fake.tiles = {tile_at(from_spherical(0.1, 0.0), Vec3::UnitY(), 0.05),
                tile_at(from_spherical(0.4, 3.0), Vec3::UnitY(), 0.05)};
  const auto r2 = check_tiling(fake);
  CHECK_FALSE(r2.covered);
  CHECK_FALSE(r2.pass());

  // A chain of tiles breaks apart after one deletion.
  Tiling chain;
  chain.u = 0.05;
  chain.epsilon = 0.1;
  chain.region = TilingRegion::make_cap(from_spherical(kPi / 2, 0.0), 0.05);
  for (int k = 0; k < 30; ++k) chain.tiles.push_back(tile_at(from_spherical(kPi / 2, 0.1 * k), Vec3::UnitZ(), 0.05));
  const auto r3 = check_tiling(chain);
  CHECK_FALSE(r3.isoperimetry_ok);
  CHECK(r3.failing_s >= 1);
  CHECK(r3.largest_survivor < 30 - 4 * r3.failing_s * r3.failing_s);
}

TEST_CASE("curvature threshold") {
  const double rho = curvature_threshold(0.1);
  CHECK(rho > 0.1);
  CHECK(curvature_threshold(0.1) == rho);
  CHECK(lattice_overlap_error(rho) < 0.05);
  CHECK(lattice_overlap_error(0.01) < lattice_overlap_error(0.4));
  CHECK_THROWS_AS(build_tiling(0.5, 0.1, TilingRegion::make_cap(north_pole(), 1.0)), TilingInfeasible);
}

TEST_CASE("large regions: the best candidate is reported when no design passes") {
  try {
    const auto t = build_tiling(0.1, 0.1, TilingRegion::make_cap(north_pole(), 1.0));
    CHECK(check_tiling(t).pass());
  } catch (const TilingInfeasible& e) {
    MESSAGE(std::string(e.what()));
    CHECK(e.report.covered);
    CHECK(e.report.failures() >= 1);
    CHECK_FALSE(e.best.tiles.empty());
  }
}

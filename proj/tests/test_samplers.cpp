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
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "exlab/errors.hpp"
#include "exlab/samplers.hpp"
#include "oracles.hpp"

using namespace exlab;

namespace {

struct PairStats {
  double mean = 0, se = 0;
};

// Monte Carlo estimate of E[f(x) f(y)] for a two-point grid.
template <class Draw>
PairStats pair_covariance(Draw&& draw, int reps) {
  double s = 0, s2 = 0;
  for (int k = 0; k < reps; ++k) {
    const auto v = draw(static_cast<std::uint64_t>(k) + 1000);
    const double p = v[0] * v[1];
    s += p;
    s2 += p * p;
  }
  const double m = s / reps;
  return {m, std::sqrt((s2 / reps - m * m) / reps)};
}

GridPtr two_points(double theta, bool spherical = true) {
  if (!spherical)
    return std::make_shared<const Grid>(Grid::points({Vec3(0.1, -0.2, 0), Vec3(0.1 + theta, -0.2, 0)}, false));
  const Vec3 a = from_spherical(1.1, 0.4);
  const Vec3 b = exp_map(a, Vec2(theta * std::cos(0.7), theta * std::sin(0.7)));
  return std::make_shared<const Grid>(Grid::points({a, b}));
}

double j0_series(double x) {
  double term = 1.0, sum = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 60; ++k) {
    term *= -q / (double(k) * k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("real spherical harmonics satisfy the addition formula at l = 40") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  const int ell = 40;
  for (int k = 0; k < 100; ++k) {
    const Vec3 x = Vec3(nd(gen), nd(gen), nd(gen)).normalized();
    double s = 0;
    for (int m = -ell; m <= ell; ++m) s += real_ylm(ell, m, x) * real_ylm(ell, m, x);
    CHECK(4.0 * std::numbers::pi / (2 * ell + 1) * s == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("zonal harmonic equals sqrt(N) P_l") {
  for (int ell : {0, 3, 17, 200}) {
    const Vec3 x = from_spherical(0.83, 2.0);
    CHECK(real_ylm(ell, 0, x) ==
          doctest::Approx(std::sqrt(legendre_weight(ell)) * static_cast<double>(oracle::legendre(ell, std::cos(0.83))))
              .epsilon(1e-11));
  }
}

TEST_CASE("normalized Legendre stays finite near the poles at high degree") {
  for (double th : {1e-6, 1e-3, 0.05, std::numbers::pi / 2, std::numbers::pi - 1e-4}) {
    const auto p = normalized_legendre(1500, 700, th);
    for (double v : p) CHECK(std::isfinite(v));
    const auto q = normalized_legendre(1500, 0, th);
    CHECK(q[1500] == doctest::Approx(std::sqrt(legendre_weight(1500)) *
                                     static_cast<double>(oracle::legendre(1500, std::cos(th))))
                         .epsilon(1e-8));
  }
  CHECK_THROWS_AS(normalized_legendre(1501, 0, 0.3), BudgetError);
}

TEST_CASE("row synthesis matches per-point synthesis") {
  auto g = std::make_shared<const Grid>(Grid::sphere(24));
  const FieldSample s = sample_bandlimited(KernelSpec::bandlimited(0.3, 20), g, 99);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < g->size(); ++i) pts.push_back(g->center(i));
  auto pg = std::make_shared<const Grid>(Grid::points(pts));
  const FieldSample t = sample_bandlimited(KernelSpec::bandlimited(0.3, 20), pg, 99);
  REQUIRE(s.values.size() == t.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(s.values[i] == doctest::Approx(t.values[i]).epsilon(1e-10));
}

TEST_CASE("Kostlan row synthesis matches per-point synthesis") {
  for (int n : {1, 7, 64}) {
    auto g = std::make_shared<const Grid>(Grid::sphere_window(40, 3, 30, 70, 25));
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < g->size(); ++i) pts.push_back(g->center(i));
    auto pg = std::make_shared<const Grid>(Grid::points(pts));
    const auto a = sample_kostlan(n, g, 5), b = sample_kostlan(n, pg, 5);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(std::abs(a.values[i] - b.values[i]) < 1e-11);
  }
}

TEST_CASE("sampling is reproducible") {
  auto g = std::make_shared<const Grid>(Grid::sphere(16));
  const auto a = sample_kostlan(20, g, 5), b = sample_kostlan(20, g, 5), c = sample_kostlan(20, g, 6);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  const auto r1 = sample_rsh(9, g, 5), r2 = sample_rsh(9, g, 5);
  CHECK(r1.values == r2.values);
  for (double v : a.values) CHECK(std::isfinite(v));
  CHECK(a.values.size() == g->size());
}

TEST_CASE("Kostlan analytic variance is one") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  for (int n : {1, 2, 7, 32, 64}) {
    for (int k = 0; k < 20; ++k) {
      const Vec3 x = Vec3(nd(gen), nd(gen), nd(gen)).normalized();
      double s = 0;
      for (double b : kostlan_basis(n, x)) s += b * b;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(sample_kostlan(513, std::make_shared<const Grid>(Grid::points({north_pole()})), 1), BudgetError);
}

TEST_CASE("Kostlan with zero coefficients is identically zero") {
  const Grid g = Grid::sphere(8);
  const auto v = synthesize_kostlan(10, std::vector<double>(66, 0.0), g);
  for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("Kostlan n = 1 is the linear form") {
  auto g = two_points(0.9);
  const auto s = sample_kostlan(1, g, 17);
  const auto idx = kostlan_multi_indices(1);
  for (int i = 0; i < 2; ++i) {
    const Vec3 x = g->center(i);
    double f = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) f += s.coeffs[k] * (idx[k].j0 ? x.x() : idx[k].j1 ? x.y() : x.z());
    CHECK(s.values[i] == doctest::Approx(f).epsilon(1e-14));
  }
  const auto st = pair_covariance([&](std::uint64_t sd) { return sample_kostlan(1, g, sd).values; }, 10000);
  CHECK(std::abs(st.mean - std::cos(0.9)) < 4 * st.se);
}

TEST_CASE("Kostlan n = 64 covariance at 0.2") {
  auto g = two_points(0.2);
  const auto st = pair_covariance([&](std::uint64_t sd) { return sample_kostlan(64, g, sd).values; }, 4000);
  CHECK(std::abs(st.mean - kostlan_kernel(64, 0.2)) < 4 * st.se);
}

TEST_CASE("spherical harmonic ensemble covariances") {
  SUBCASE("l = 0 is constant") {
    auto g = std::make_shared<const Grid>(Grid::sphere(6));
    const auto s = sample_rsh(0, g, 3);
    for (double v : s.values) CHECK(v == doctest::Approx(s.values[0]).epsilon(1e-13));
    CHECK(s.values[0] == doctest::Approx(s.coeffs[0]).epsilon(1e-13));
  }
  SUBCASE("l = 1") {
    auto g = two_points(1.3);
    const auto st = pair_covariance([&](std::uint64_t sd) { return sample_rsh(1, g, sd).values; }, 10000);
    CHECK(std::abs(st.mean - std::cos(1.3)) < 4 * st.se);
  }
  SUBCASE("band-limited alpha = 0, l = 8 at 0.5") {
    auto g = two_points(0.5);
    const auto sp = KernelSpec::bandlimited(0.0, 8);
    const auto st = pair_covariance([&](std::uint64_t sd) { return sample_bandlimited(sp, g, sd).values; }, 10000);
    CHECK(std::abs(st.mean - static_cast<double>(oracle::windowed_kernel(0, 8, std::cos(0.5)))) < 4 * st.se);
  }
  SUBCASE("isotropic two-term") {
    auto g = two_points(0.8);
    ZonalCoefficients z;
    z.c = {std::sqrt(0.5), std::sqrt(0.5)};
    const auto st = pair_covariance([&](std::uint64_t sd) { return sample_isotropic(z, g, sd).values; }, 10000);
    CHECK(std::abs(st.mean - 0.5 * (1.0 + std::cos(0.8))) < 4 * st.se);
  }
}

TEST_CASE("single-degree window reproduces the spherical harmonic field") {
  auto g = std::make_shared<const Grid>(Grid::sphere(12));
  const auto a = sample_bandlimited(KernelSpec::bandlimited(1.0, 10), g, 8);
  const auto b = sample_rsh(10, g, 8);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
  ZonalCoefficients z = ZonalCoefficients::rsh(10);
  const auto c = sample_isotropic(z, g, 8);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(c.values[i] == doctest::Approx(b.values[i]).epsilon(1e-12));
  ZonalCoefficients zero;
  zero.c.assign(5, 0.0);
  for (double v : sample_isotropic(zero, g, 8).values) CHECK(v == 0.0);
}

TEST_CASE("unit variance at grid points") {
  auto g = std::make_shared<const Grid>(Grid::points({from_spherical(0.01, 0.0), from_spherical(1.0, 2.0),
                                                      from_spherical(3.1, -1.0)}));
  const int reps = 4000;
  for (const EnsembleSpec& sp : {EnsembleSpec::kostlan(30), EnsembleSpec::rsh(25), EnsembleSpec::mono(0.5, 100)}) {
    std::vector<double> s(3, 0), s2(3, 0);
    for (int k = 0; k < reps; ++k) {
      const auto v = sample_field(sp, g, 50000 + k).values;
      for (int i = 0; i < 3; ++i) {
        s[i] += v[i] * v[i];
        s2[i] += v[i] * v[i] * v[i] * v[i];
      }
    }
    for (int i = 0; i < 3; ++i) {
      const double m = s[i] / reps, se = std::sqrt((s2[i] / reps - m * m) / reps);
      CHECK(std::abs(m - 1.0) < 4 * se);
    }
  }
  CHECK(KernelSpec::mono(0.5, 100).window_low() == 90);
}

TEST_CASE("isotropy: covariance depends only on the angle") {
  const double th = 0.35;
  auto g1 = std::make_shared<const Grid>(Grid::points({from_spherical(0.3, 0.0), from_spherical(0.3 + th, 0.0)}));
  const Vec3 a = from_spherical(2.0, 1.0);
  auto g2 = std::make_shared<const Grid>(Grid::points({a, exp_map(a, Vec2(0.0, th))}));
  const auto s1 = pair_covariance([&](std::uint64_t sd) { return sample_rsh(6, g1, sd).values; }, 8000);
  const auto s2 = pair_covariance([&](std::uint64_t sd) { return sample_rsh(6, g2, sd + 777777).values; }, 8000);
  CHECK(std::abs(s1.mean - s2.mean) < 5 * std::hypot(s1.se, s2.se));
}

TEST_CASE("planar fields") {
  SUBCASE("Bargmann-Fock covariance at distance 1") {
    auto g = two_points(1.0, false);
    const auto sp = EnsembleSpec::bargmann_fock(256);
    const auto st = pair_covariance([&](std::uint64_t sd) { return sample_planar(sp, g, sd).values; }, 6000);
    CHECK(std::abs(st.mean - std::exp(-0.5)) < 4 * st.se);
  }
  SUBCASE("random plane wave vanishes at the first Bessel zero") {
    double z = 2.4;
    for (int k = 0; k < 30; ++k) {
      const double h = 1e-6;
      z -= j0_series(z) / ((j0_series(z + h) - j0_series(z - h)) / (2 * h));
    }
    CHECK(z == doctest::Approx(2.4048).epsilon(1e-4));
    auto g = two_points(z, false);
    const auto sp = EnsembleSpec::plane_wave(1.0, 256);
    const auto st = pair_covariance([&](std::uint64_t sd) { return sample_planar(sp, g, sd).values; }, 6000);
    CHECK(std::abs(st.mean) < 4 * st.se);
    CHECK(std::abs(sp.covariance(z)) < 1e-9);
  }
  SUBCASE("annulus covariance formula matches a direct radial integral") {
    const EnsembleSpec sp = EnsembleSpec::plane_wave(0.4, 64);
    const double d = 3.1;
    double acc = 0;
    const int m = 4000;
    for (int k = 0; k < m; ++k) {
      const double rho = 0.4 + (k + 0.5) * 0.6 / m;
      acc += j0_series(rho * d) * 2 * rho * (0.6 / m);
    }
    CHECK(sp.covariance(d) == doctest::Approx(acc / (1 - 0.16)).epsilon(1e-6));
  }
  SUBCASE("one wave with phase pi/2 is a sinusoid") {
    WaveSuperposition w;
    w.frequencies = {Vec2(1.0, 0.0)};
    w.phases = {std::numbers::pi / 2};
    const Grid g = Grid::planar(10.0, 101);
    const auto v = synthesize_waves(w, g);
    for (int r = 0; r < 101; r += 10)
      for (int c = 0; c < 101; ++c)
        CHECK(v[r * 101 + c] == doctest::Approx(-std::sqrt(2.0) * std::sin(g.planar_x(c))).epsilon(1e-9));
  }
  SUBCASE("grid rows and direct evaluation agree") {
    const auto sp = EnsembleSpec::bargmann_fock(128);
    auto g = std::make_shared<const Grid>(Grid::planar(20.0, 151));
    const auto s = sample_planar(sp, g, 4);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < g->size(); i += 97) pts.push_back(g->center(i));
    const auto t = sample_planar(sp, std::make_shared<const Grid>(Grid::points(pts, false)), 4);
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(t.values[k] == doctest::Approx(s.values[k * 97]).epsilon(1e-9));
  }
  CHECK_THROWS_AS(sample_planar(EnsembleSpec::bargmann_fock(32), std::make_shared<const Grid>(Grid::planar(1, 3)), 1),
                  DomainError);
}

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

#include "doctest.h"
#include "exlab/errors.hpp"
#include "exlab/finite_range.hpp"
#include "oracles.hpp"

using namespace exlab;

namespace {

GridPtr orthant_cells(double spacing) { return std::make_shared<const Grid>(orthant_points(0.05, spacing)); }

// A fixed set of m cells inside the orthant subset, clustered around the diagonal.
GridPtr diagonal_cluster(int m, double spread) {
  const Vec3 c = Vec3(1, 1, 1).normalized();
  std::vector<Vec3> pts;
  for (int k = 0; k < m; ++k) {
    const double a = 2 * std::numbers::pi * k / m, rad = spread * std::sqrt((k + 0.5) / m);
    pts.push_back(exp_map(c, Vec2(rad * std::cos(a), rad * std::sin(a))));
  }
  return std::make_shared<const Grid>(Grid::points(pts));
}

}  // namespace

TEST_CASE("bump profile") {
  CHECK(bump_eval(0.2) == 0.0);
  CHECK(bump_eval(0.25) == 0.0);
  CHECK(bump_eval(0.6) == 1.0);
  CHECK(bump_eval(0.5) == 1.0);
  CHECK(bump_eval(0.0) == 0.0);
  const double mid = bump_eval(0.375);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(mid == doctest::Approx(0.5).epsilon(1e-12));
  double prev = 0.0, max_slope = 0.0;
  const int N = 200000;
  for (int i = 1; i <= N; ++i) {
    const double x = 0.25 + 0.25 * i / N;
    const double v = bump_eval(x);
    CHECK_MESSAGE(v >= prev - 1e-15, "monotone at ", x);
    max_slope = std::max(max_slope, (v - prev) / (0.25 / N));
    prev = v;
  }
  CHECK(max_slope <= kBumpSlopeBound + 1e-9);
  CHECK(max_slope >= kBumpSlopeBound - 1e-3);
  for (double x : {0.26, 0.3, 0.33, 0.41, 0.49}) {
    const double h = 1e-6;
    CHECK(bump_slope(x) == doctest::Approx((bump_eval(x + h) - bump_eval(x - h)) / (2 * h)).epsilon(1e-6));
    CHECK(bump_eval(x) + bump_eval(0.75 - x) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("localization points") {
  for (int n : {1, 5, 16, 64}) {
    const auto pts = localization_points(n);
    CHECK(pts.size() == static_cast<std::size_t>((n + 1) * (n + 2) / 2));
    for (const auto& p : pts) CHECK(p.v.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(localization_point(4, MultiIndex{1, 1, 1}), DomainError);
}

TEST_CASE("localization point separation and counting") {
  const int n = 16;
  const auto pts = localization_points(n);
  double dmin = 10;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) dmin = std::min(dmin, (pts[a].v - pts[b].v).norm());
  CHECK(dmin >= 1.0 / (3 * n));
  const Vec3 x = Vec3(0.5, 0.6, 0.7).normalized();
  const std::size_t cnt = count_localization_points(n, x, 0.3);
  const double rho = 1.0 / (6 * n);
  CHECK(cnt >= 1);
  CHECK(double(cnt) <= cap_area(0.3 + rho) / cap_area(rho));
  MESSAGE("fitted count constant c = ", cnt / (0.09 * n * n));
}

TEST_CASE("basis localization report") {
  const auto rep = basis_localization_report(16, 0.05, 400, 11);
  CHECK(rep.positive);
  CHECK(rep.negative == 0);
  CHECK(rep.evaluations == 400u * 153u);
  CHECK(rep.peak_at_center);
  CHECK(rep.monotone_bins);
  CHECK(rep.fitted_c > 0.0);
  CHECK(std::isfinite(rep.fitted_C));
  MESSAGE("fitted C = ", rep.fitted_C, ", c = ", rep.fitted_c);
}

TEST_CASE("Kostlan coupling requires the orthant subset") {
  auto g = std::make_shared<const Grid>(Grid::points({Vec3(0.02, 0.7, 0.7).normalized()}));
  CHECK_THROWS_AS(KostlanCoupling(16, 0.5, g), OrthantViolation);
  CHECK_THROWS_AS(KostlanCoupling(64, 0.05, diagonal_cluster(4, 0.1)), DomainError);
}

TEST_CASE("Kostlan coupling with a huge range leaves the field unchanged") {
  auto g = diagonal_cluster(30, 0.5);
  const KostlanCoupling kc(20, 2 * std::numbers::pi, g);
  const auto p = kc.pair(3);
  CHECK(p.full.values == p.truncated.values);
  for (double v : p.difference()) CHECK(v == 0.0);
  const auto s = sample_kostlan(20, g, 3);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(p.full.values[i] == doctest::Approx(s.values[i]).epsilon(1e-12));
}

TEST_CASE("Kostlan coupling shares coefficients") {
  auto g = diagonal_cluster(40, 0.6);
  const KostlanCoupling kc(32, 0.5, g);
  auto a = draw_kostlan_coefficients(32, 9);
  const auto act = kc.truncation_active();
  for (std::size_t k = 0; k < a.size(); ++k)
    if (act[k]) a[k] = 0.0;
  const auto p = kc.pair_from(a, 9);
  CHECK(p.full.values == p.truncated.values);
  const auto q = kc.pair(9);
  CHECK(q.full.coeffs == q.truncated.coeffs);
  const auto d = kc.difference(9);
  for (std::size_t i = 0; i < d.size(); ++i)
    CHECK(d[i] == doctest::Approx(q.full.values[i] - q.truncated.values[i]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("Kostlan support audit") {
  for (auto [n, r] : {std::pair{32, 0.5}, std::pair{64, 0.3}}) {
    const KostlanCoupling kc(n, r, orthant_cells(0.04));
    const auto a = kc.audit();
    CHECK(a.pass);
    CHECK(a.pairs_checked > 0);
    CHECK(a.max_support_diameter < r);
  }
}

TEST_CASE("Kostlan difference variance matches Monte Carlo and decreases in r") {
  auto g = diagonal_cluster(50, 0.6);
  const int n = 64, M = 400;
  const KostlanCoupling c4(n, 4.0 / 8.0, g), c8(n, 8.0 / 8.0, g);
  const auto v4 = c4.difference_variance(), v8 = c8.difference_variance();
  double mc4 = 0, mc8 = 0, dsum = 0, dsum2 = 0;
  for (int m = 0; m < M; ++m) {
    const auto d4 = c4.difference(100 + m), d8 = c8.difference(100 + m);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      a += d4[i] * d4[i];
      b += d8[i] * d8[i];
    }
    a /= g->size();
    b /= g->size();
    mc4 += a;
    mc8 += b;
    dsum += a - b;
    dsum2 += (a - b) * (a - b);
  }
  mc4 /= M;
  mc8 /= M;
  double an4 = 0, an8 = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    an4 += v4[i] / g->size();
    an8 += v8[i] / g->size();
  }
  CHECK(an8 <= an4);
  const double md = dsum / M, se = std::sqrt((dsum2 / M - md * md) / M);
  CHECK(md > 0);
  CHECK(std::abs(md - (an4 - an8)) < 4 * se);
}

TEST_CASE("zonal re-expansion agrees with an independent quadrature") {
  const auto c = ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 16));
  const double r = 0.6;
  const auto ct = zonal_reexpand(c, r, 200);
  const int panels = 8000;
  const long double h = 0.5L * r / panels;
  std::vector<long double> qr(panels + 1);
  for (int i = 0; i <= panels; ++i) {
    const double t = static_cast<double>(i * h);
    long double q = 0;
    for (int k = 0; k <= c.lmax(); ++k) q += c.c[k] * std::sqrt(legendre_weight(k)) * oracle::legendre(k, std::cos(t));
    qr[i] = q * (1.0L - bump_eval(t / r)) * std::sin(t);
  }
  for (int l : {0, 1, 7, 16, 40, 120}) {
    long double s = 0;
    for (int i = 0; i <= panels; ++i) {
      const long double w = (i == 0 || i == panels) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
      s += w * qr[i] * oracle::legendre(l, std::cos(static_cast<double>(i * h)));
    }
    const long double ref = std::sqrt(std::numbers::pi * (2 * l + 1)) * s * h / 3;
    CHECK(std::abs(ct[l] - static_cast<double>(ref)) < 1e-10);
  }
}

TEST_CASE("zonal truncation of the band-limited kernel") {
  const auto c = ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 64));
  const double r = 16.0 / 64;
  const auto t = truncate_zonal(c, r);
  CHECK(t.roundtrip_error <= 1e-8);
  CHECK(t.residual_sup < 1e-8);
  CHECK(t.sampling_degree <= kHarmonicDegreeCap);
  for (int k = 0; k < 12; ++k) {
    const double th = r + (std::numbers::pi - r) * (k + 0.5) / 12;
    long double s = 0;
    for (int l = 0; l <= t.truncated.lmax(); ++l)
      s += (long double)t.truncated.c[l] * t.truncated.c[l] * oracle::legendre(l, std::cos(th));
    CHECK(std::abs(static_cast<double>(s)) < 1e-8);
  }
  auto g = std::make_shared<const Grid>(Grid::sphere_window(400, 200, 201, 0, 20));
  const ZonalCoupling zc(t, g);
  const auto p = zc.pair(21);
  const auto s = sample_bandlimited(KernelSpec::bandlimited(0.5, 64), g, 21);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(p.full.values[i] == doctest::Approx(s.values[i]).epsilon(1e-10));
  const auto d = zc.difference(21);
  for (std::size_t i = 0; i < g->size(); ++i)
    CHECK(d[i] == doctest::Approx(p.full.values[i] - p.truncated.values[i]).epsilon(1e-9).scale(1.0));
  MESSAGE("Var(f - f^(r)) = ", zc.difference_variance(), ", ratio to 1/(l r) = ", zc.difference_variance() * 64 * r);
}

TEST_CASE("zonal truncation is the identity on well-localized kernels") {
  const auto base = ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 16));
  ZonalCoefficients loc;
  loc.c = zonal_reexpand(base, std::numbers::pi / 4, 1024);
  const auto t = truncate_zonal(loc, std::numbers::pi / 2);
  double dv = 0;
  for (int l = 0; l <= std::max(loc.lmax(), t.truncated.lmax()); ++l) {
    const double a = l <= loc.lmax() ? loc.c[l] : 0.0, b = l <= t.truncated.lmax() ? t.truncated.c[l] : 0.0;
    dv += (a - b) * (a - b);
  }
  CHECK(dv < 1e-6);
}

TEST_CASE("zonal coupling with zero coefficients or no truncation") {
  ZonalCoefficients zero;
  zero.c.assign(10, 0.0);
  auto g = std::make_shared<const Grid>(Grid::sphere(8));
  const auto p = zonal_truncated_pair(zero, 0.5, g, 2);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(p.full.values[i] == 0.0);
    CHECK(p.truncated.values[i] == 0.0);
  }
  ZonalTruncation same;
  same.original = ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 12));
  same.truncated = same.original;
  same.range = 1.0;
  const ZonalCoupling zc(same, g);
  const auto q = zc.pair(4);
  CHECK(q.full.values == q.truncated.values);
  CHECK(zc.difference_variance() == 0.0);
}

TEST_CASE("zonal difference variance matches Monte Carlo") {
  const auto c = ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 32));
  const ZonalCoupling zc(truncate_zonal(c, 1.0), std::make_shared<const Grid>(Grid::points({from_spherical(1.2, 0.3)})));
  const int M = 2000;
  double s = 0, s2 = 0;
  for (int m = 0; m < M; ++m) {
    const double v = zc.difference(500 + m)[0];
    s += v * v;
    s2 += v * v * v * v;
  }
  const double mean = s / M, se = std::sqrt((s2 / M - mean * mean) / M);
  CHECK(std::abs(mean - zc.difference_variance()) < 4 * se);
}

TEST_CASE("sup statistics of the coupling error") {
  auto g = diagonal_cluster(50, 0.4);
  const std::vector<SphericalCap> caps{{Vec3(1, 1, 1).normalized(), 0.45}};
  const KostlanCoupling same(64, 2 * std::numbers::pi, g);
  const auto s0 = coupling_sup_stats([&](std::uint64_t sd) { return same.difference(sd); }, *g, caps, 20, 1, {0.1});
  for (double v : s0.sups) CHECK(v == 0.0);

  const KostlanCoupling c1(64, 1.0 / 8, g), c2(64, 2.0 / 8, g);
  const std::vector<double> ladder{0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0};
  const auto s1 = coupling_sup_stats([&](std::uint64_t sd) { return c1.difference(sd); }, *g, caps, 200, 7, ladder);
  const auto s2 = coupling_sup_stats([&](std::uint64_t sd) { return c2.difference(sd); }, *g, caps, 200, 7, ladder);
  CHECK(s1.mean > s2.mean);
  int wins = 0;
  for (int m = 0; m < 200; ++m) wins += s1.sups[m] >= s2.sups[m];
  MESSAGE("paired wins ", wins, "/200; mean sups ", s1.mean, " ", s2.mean);
  for (std::size_t k = 0; k < ladder.size(); ++k)
    MESSAGE("t=", ladder[k], " p1=", s1.exceedance[k], " p2=", s2.exceedance[k]);
  CHECK(s1.sub_exponential_tail);
}

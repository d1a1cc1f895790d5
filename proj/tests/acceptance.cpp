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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "exlab/errors.hpp"
#include "exlab/excursion.hpp"
#include "exlab/experiments.hpp"
#include "exlab/finite_range.hpp"
#include "exlab/io.hpp"
#include "exlab/render.hpp"
#include "exlab/run.hpp"
#include "exlab/spectral.hpp"
#include "exlab/tiling.hpp"
#include "oracles.hpp"

using namespace exlab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s [%.1f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
              limit_s, in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Points at angles theta_k from a base point along a great circle.
std::vector<Vec3> arc_points(const Vec3& base, const Vec3& dir, const std::vector<double>& theta) {
  std::vector<Vec3> pts = {base};
  for (double t : theta) pts.push_back(std::cos(t) * base + std::sin(t) * dir);
  return pts;
}

// Empirical E[f(x0) f(x_k)] against the kernel, in SE units.
double worst_covariance_z(const EnsembleSpec& spec, GridPtr grid, const std::vector<double>& dist, int M,
                          std::uint64_t seed) {
  const std::size_t K = dist.size();
  std::vector<double> sum(K, 0.0), sq(K, 0.0);
  for (int i = 0; i < M; ++i) {
    const FieldSample s = sample_field(spec, grid, replicate_seed(seed, i));
    for (std::size_t k = 0; k < K; ++k) {
      const double p = s.values[0] * s.values[k + 1];
      sum[k] += p;
      sq[k] += p * p;
    }
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double mean = sum[k] / M;
    const double var = (sq[k] / M - mean * mean) * M / (M - 1.0);
    const double se = std::sqrt(var / M);
    worst = std::max(worst, std::abs(mean - spec.covariance(dist[k])) / se);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_output");
  fs::create_directories(out_dir);
  std::vector<EstimateRecord> phi_records;

  criterion(1, "Christoffel-Darboux kernel form equals the direct Legendre sum (1e-9)", 5, [] {
    double worst = 0.0;
    for (int ell : {1, 8, 64, 256})
      for (double alpha : {0.0, 0.5}) {
        const KernelSpec spec = KernelSpec::bandlimited(alpha, ell);
        for (int i = 0; i < 200; ++i) {
          const auto v = bandlimited_kernel_both(spec, kPi * (i + 0.5) / 200);
          worst = std::max(worst, std::abs(v.direct - v.jacobi) / std::max(1.0, std::abs(v.direct)));
        }
      }
    return Outcome{worst <= 1e-9, fmt("max error relative to max(1,|kernel|) %.3g", worst)};
  });

  criterion(2, "Kostlan kernel |cos|^n <= exp(-n theta^2/4), zero tolerance", 1, [] {
    int violations = 0, checked = 0;
    for (int n = 2; n <= 512; n *= 2)
      for (int k = 1; k <= 100; ++k) {
        const double th = k * (kPi / 2) / 100;
        ++checked;
        if (!(std::abs(kostlan_kernel(n, th)) <= std::exp(-th * th * n / 4.0))) ++violations;
      }
    return Outcome{violations == 0, std::to_string(violations) + " violations in " + std::to_string(checked)};
  });

  criterion(3, "sampler covariance within 4 SE (T_16, Kostlan 64, Bargmann-Fock; M=5000)", 180, [] {
    std::vector<double> theta;
    for (int k = 1; k <= 20; ++k) theta.push_back(k * kPi / 20);
    const Vec3 base = from_spherical(1.1, 0.4);
    const Vec3 dir = base.cross(Vec3(0.3, -0.5, 0.8)).normalized();
    auto sphere_pts = std::make_shared<const Grid>(Grid::points(arc_points(base, dir, theta)));
    const double z_rsh = worst_covariance_z(EnsembleSpec::rsh(16), sphere_pts, theta, 5000, 301);
    const double z_kos = worst_covariance_z(EnsembleSpec::kostlan(64), sphere_pts, theta, 5000, 302);
    std::vector<double> d;
    std::vector<Vec3> plane = {Vec3(0.2, -0.1, 0.0)};
    for (int k = 1; k <= 20; ++k) {
      d.push_back(0.15 * k);
      plane.push_back(plane[0] + d.back() * Vec3(0.6, 0.8, 0.0));
    }
    auto plane_pts = std::make_shared<const Grid>(Grid::points(plane, false));
    const double z_bf = worst_covariance_z(EnsembleSpec::bargmann_fock(), plane_pts, d, 5000, 303);
    const double worst = std::max({z_rsh, z_kos, z_bf});
    return Outcome{worst <= 4.0, fmt("worst |z|: T_16 %.2f", z_rsh) + fmt(", Kostlan %.2f", z_kos) + fmt(", BF %.2f", z_bf)};
  });

  criterion(4, "finite-range support audits and zonal residual < 1e-8", 60, [] {
    auto grid = std::make_shared<const Grid>(orthant_points(kDefaultOrthantMargin, 0.03));
    const SupportAudit a = KostlanCoupling(32, 0.5, grid).audit();
    const SupportAudit b = KostlanCoupling(64, 0.3, grid).audit();
    const ZonalTruncation z =
        truncate_zonal(ZonalCoefficients::from_spec(KernelSpec::bandlimited(0.5, 64)), 16.0 / 64);
    const bool ok = a.pass && b.pass && z.residual_sup < 1e-8;
    return Outcome{ok, std::string("audit (32,0.5) ") + (a.pass ? "ok" : "FAIL") + ", (64,0.3) " + (b.pass ? "ok" : "FAIL") +
                           fmt(", residual %.3g", z.residual_sup) + " (" + std::to_string(a.pairs_checked + b.pairs_checked) +
                           " pairs)"};
  });

  criterion(5, "coupling error strictly decreasing beyond 2 SE (Kostlan 64, band-limited 64; M=200)", 300, [] {
    const auto k = coupling_ladder(EnsembleSpec::kostlan(64), {0.2, 0.3, 0.5, 0.8}, 200, 501);
    const auto b = coupling_ladder(EnsembleSpec::bandlimited(0.0, 64), {8 / 64.0, 16 / 64.0, 32 / 64.0}, 200, 502);
    return Outcome{k.strictly_decreasing && b.strictly_decreasing,
                   fmt("min paired z: Kostlan %.1f", k.min_paired_z) + fmt(", band-limited %.1f", b.min_paired_z)};
  });

  criterion(6, "largest-component area at l=40 larger at t=+0.1 than t=-0.1 (z >= 5, M=200) and images", 600,
            [&] {
              const auto res = giant_area_experiment(EnsembleSpec::rsh(40), {-0.1, 0.1}, 200, 601);
              const double z = two_sample_z(res.levels[1], res.levels[0]);
              auto grid = std::make_shared<const Grid>(build_grid(4.0, 1.0 / 40));
              const FieldSample s = sample_rsh(40, grid, replicate_seed(601, 0));
              RenderSpec two;
              two.width = 800;
              two.levels = {-0.1, 0.1};
              RenderSpec comp = two;
              comp.palette = RenderSpec::Palette::Components;
              comp.levels = {0.1};
              comp.outline_giant = true;
              const fs::path a = out_dir / "figure_two_level.ppm", b = out_dir / "figure_components.ppm";
              write_file(a, render_ppm(s, two));
              write_file(b, render_ppm(s, comp));
              const bool images = fs::file_size(a) > 0 && fs::file_size(b) > 0;
              return Outcome{z >= 5.0 && images, fmt("mean %.4f", res.levels[0].mean) + fmt(" vs %.4f", res.levels[1].mean) +
                                                     fmt(", z = %.1f", z) + ", images " + a.string() + ", " + b.string()};
            });

  criterion(7, "theta ordering 0.3 < 1 < 3 beyond 3 SE, theta(-1) < 0.05, phi(1,3) > 0.8 (M=2000, R=10)", 600, [&] {
    const auto th = estimate_theta({-1.0, 0.3, 1.0, 3.0}, 2000, 701);
    phi_records = estimate_phi(1.0, {1.0, 3.0}, 2000, 702);
    auto beyond = [](const EstimateRecord& lo, const EstimateRecord& hi) {
      return hi.value - lo.value > 3.0 * std::hypot(lo.standard_error, hi.standard_error);
    };
    const bool ok = beyond(th[1], th[2]) && beyond(th[2], th[3]) && th[0].value < 0.05 && phi_records[1].value > 0.8;
    return Outcome{ok, fmt("theta(-1) %.4f", th[0].value) + fmt(", theta(0.3) %.4f", th[1].value) +
                           fmt(", theta(1) %.4f", th[2].value) + fmt(", theta(3) %.4f", th[3].value) +
                           fmt(", phi(1,3) %.4f", phi_records[1].value)};
  });

  criterion(8, "mean Area(V^a)/4pi at l=64, t=1 (M=100) within 0.05 of planar phi(1,1)", 900, [&] {
    if (phi_records.empty()) phi_records = estimate_phi(1.0, {1.0, 3.0}, 2000, 702);
    const auto res = giant_area_experiment(EnsembleSpec::rsh(64), {1.0}, 100, 801);
    const double phi = phi_records[0].corrected;
    const double diff = std::abs(res.levels[0].mean - phi);
    return Outcome{diff <= 0.05, fmt("sphere %.4f", res.levels[0].mean) + fmt(", planar %.4f", phi) +
                                     fmt(" (arm-only %.4f)", phi_records[0].value) + fmt(", |diff| %.4f", diff) +
                                     fmt(", V^a = V^d in %.2f", res.levels[0].coincidence)};
  });

  criterion(9, "union-find labels equal the BFS oracle (500 sphere 32x16, 100 planar 64x64)", 10, [] {
    std::mt19937_64 gen(901);
    std::uniform_real_distribution<double> dens(0.2, 0.8);
    auto mask = [&](std::size_t n) {
      std::bernoulli_distribution b(dens(gen));
      std::vector<std::uint8_t> m(n);
      for (auto& v : m) v = b(gen) ? 1 : 0;
      return m;
    };
    auto sphere = std::make_shared<const Grid>(Grid::sphere(16));
    auto plane = std::make_shared<const Grid>(Grid::planar(64.0, 64));
    int ok = 0;
    for (int k = 0; k < 500; ++k) {
      const auto m = mask(sphere->size());
      ok += oracle::same_partition(oracle::bfs_labels(16, 32, true, true, m), label_cells(sphere, m).label);
    }
    for (int k = 0; k < 100; ++k) {
      const auto m = mask(plane->size());
      ok += oracle::same_partition(oracle::bfs_labels(64, 64, false, false, m), label_cells(plane, m).label);
    }
    return Outcome{ok == 600, std::to_string(ok) + " of 600 partitions identical"};
  });

  criterion(10, "Area(V^a(t)) nondecreasing in t on 50 matched samples, exactly", 120, [] {
    const std::vector<double> levels = {-0.5, 0.0, 0.5, 1.0};
    auto grid = std::make_shared<const Grid>(build_grid(4.0, 1.0 / 32));
    int bad = 0;
    for (int i = 0; i < 50; ++i) {
      const FieldSample s = sample_rsh(32, grid, replicate_seed(1001, i));
      double prev = -1.0;
      for (double t : levels) {
        const ComponentLabeling lab = label_components(excursion_mask(s, t));
        double a = 0.0;
        for (const auto& c : lab.components) a = std::max(a, c.area);
        if (a < prev) ++bad;
        prev = a;
      }
    }
    return Outcome{bad == 0, std::to_string(bad) + " decreases in 150 steps"};
  });

  criterion(11, "1 worker and 8 workers give byte-identical data rows", 120, [&] {
    bool same = true;
    std::string detail;
    ExperimentConfig g;
    g.experiment = ExperimentKind::Giant;
    g.ensemble = EnsembleSpec::rsh(16);
    g.levels = {-0.2, 0.3};
    g.replicates = 24;
    g.seed = 1101;
    ExperimentConfig t = g;
    t.experiment = ExperimentKind::Theta;
    t.ensemble = EnsembleSpec::bargmann_fock();
    t.R = 4.0;
    t.replicates = 40;
    for (ExperimentConfig c : {g, t}) {
      c.jobs = 1;
      c.output_dir = out_dir / "determinism_1";
      const RunOutput a = run_experiment(c);
      c.jobs = 8;
      c.output_dir = out_dir / "determinism_8";
      const RunOutput b = run_experiment(c);
      const bool eq = read_file(a.data) == read_file(b.data) &&
                      (a.summary.empty() || read_file(a.summary) == read_file(b.summary));
      same = same && eq;
      detail += std::string(detail.empty() ? "" : ", ") + to_string(c.experiment) + " " + (eq ? "identical" : "DIFFER") +
                " (" + std::to_string(a.rows) + " rows)";
    }
    return Outcome{same, detail};
  });

  criterion(12, "tilings pass the axioms (u in {0.05, 0.1}, eps 0.1, sphere and cap(1.0))", 30, [] {
    bool all = true;
    std::string detail;
    for (double u : {0.05, 0.1})
      for (const TilingRegion& region : {TilingRegion::sphere(), TilingRegion::make_cap(Vec3::UnitZ(), 1.0)}) {
        std::string line = fmt("u=%.2f ", u) + region.describe() + ": ";
        try {
          const Tiling t = build_tiling(u, 0.1, region);
          const TilingReport rep = check_tiling(t);
          all = all && rep.pass();
          line += rep.pass() ? "pass" : rep.summary();
        } catch (const TilingInfeasible& e) {
          all = false;
          line += "infeasible, best " + e.best.design + " (" + e.report.summary() + ")";
        }
        detail += (detail.empty() ? "" : "; ") + line;
      }
    return Outcome{all, detail};
  });

  std::printf("acceptance: %d of 12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}

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
#include "exlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numbers>

#include "exlab/errors.hpp"
#include "exlab/excursion.hpp"
#include "exlab/finite_range.hpp"
#include "exlab/parallel.hpp"

namespace exlab {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;
};

MeanVar mean_var(const std::vector<double>& x) {
  MeanVar mv;
  if (x.empty()) return mv;
  for (double v : x) mv.mean += v;
  mv.mean /= x.size();
  if (x.size() > 1) {
    for (double v : x) mv.variance += (v - mv.mean) * (v - mv.mean);
    mv.variance /= (x.size() - 1);
  }
  return mv;
}

void require_replicates(int M) {
  if (M < 1) throw DomainError("replicate count must be >= 1");
}

void require_levels(const std::vector<double>& levels) {
  if (levels.empty()) throw DomainError("at least one level is required");
  for (double t : levels)
    if (!std::isfinite(t)) throw DomainError("levels must be finite");
}

std::vector<Vec3> fibonacci_points(int count) {
  std::vector<Vec3> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / count;
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    pts.emplace_back(rad * std::cos(golden * k), rad * std::sin(golden * k), z);
  }
  return pts;
}

}  // namespace

double binomial_se(double p, int M) { return M > 0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) / M) : kNaN; }

PlanarWindow planar_window(const PlanarEstimateOptions& opt) {
  if (!(opt.R > 0.0)) throw DomainError("arm radius must be positive");
  if (!(opt.spacing > 0.0)) throw DomainError("cell spacing must be positive");
  PlanarWindow w;
  w.side = opt.window > 0.0 ? opt.window : 2.0 * opt.R + 2.0;
  if (w.side < 2.0 * opt.R + 2.0 - 1e-12) throw GeometryError("window side must be at least 2R + 2");
  w.cells = static_cast<int>(std::ceil(w.side / opt.spacing - 1e-9));
  if (w.cells % 2 == 0) ++w.cells;
  return w;
}

std::vector<EstimateRecord> estimate_planar(const EnsembleSpec& field, const std::vector<double>& levels, int M,
                                            std::uint64_t seed, const PlanarEstimateOptions& opt) {
  if (!field.planar()) throw DomainError("planar estimates need a Bargmann-Fock or plane-wave field");
  require_replicates(M);
  require_levels(levels);
  const auto start = std::chrono::steady_clock::now();
  const PlanarWindow win = planar_window(opt);
  auto grid = std::make_shared<const Grid>(Grid::planar(win.side, win.cells));
  EnsembleSpec spec = field;
  spec.waves = opt.waves;
  const std::size_t L = levels.size();

  // Per replicate and level: bit 0 = Arm, bit 1 = Arm with the component reaching the window edge.
  const auto hits = parallel_map<std::vector<std::uint8_t>>(M, opt.jobs, [&](std::size_t i) {
    const FieldSample s = sample_field(spec, grid, replicate_seed(seed, i));
    std::vector<std::uint8_t> out(L, 0);
    for (std::size_t k = 0; k < L; ++k) {
      const ExcursionMask mask = excursion_mask(s, levels[k]);
      if (!event_occurs(mask, EventSpec::arm(opt.R, levels[k]))) continue;
      const bool bounded = event_occurs(mask, EventSpec::trunc_arm(opt.R, levels[k], win.side));
      out[k] = bounded ? 1 : 3;
    }
    return out;
  });

  std::vector<EstimateRecord> recs;
  const double wall = seconds_since(start);
  for (std::size_t k = 0; k < L; ++k) {
    int arm = 0, open = 0;
    for (const auto& h : hits) {
      arm += h[k] & 1;
      open += (h[k] >> 1) & 1;
    }
    EstimateRecord r;
    r.name = spec.kind == EnsembleSpec::Kind::BargmannFock ? "theta" : "phi";
    r.level = levels[k];
    r.value = static_cast<double>(arm) / M;
    r.standard_error = binomial_se(r.value, M);
    r.corrected = static_cast<double>(open) / M;
    r.corrected_standard_error = binomial_se(r.corrected, M);
    r.M = M;
    r.seed = seed;
    r.wall_time = wall;
    recs.push_back(r);
  }
  return recs;
}

std::vector<EstimateRecord> estimate_theta(const std::vector<double>& levels, int M, std::uint64_t seed,
                                           const PlanarEstimateOptions& opt) {
  return estimate_planar(EnsembleSpec::bargmann_fock(opt.waves), levels, M, seed, opt);
}

EstimateRecord estimate_theta(double t, int M, std::uint64_t seed, const PlanarEstimateOptions& opt) {
  return estimate_theta(std::vector<double>{t}, M, seed, opt).front();
}

std::vector<EstimateRecord> estimate_phi(double alpha, const std::vector<double>& levels, int M, std::uint64_t seed,
                                         const PlanarEstimateOptions& opt) {
  return estimate_planar(EnsembleSpec::plane_wave(alpha, opt.waves), levels, M, seed, opt);
}

EstimateRecord estimate_phi(double alpha, double t, int M, std::uint64_t seed, const PlanarEstimateOptions& opt) {
  return estimate_phi(alpha, std::vector<double>{t}, M, seed, opt).front();
}

GiantAreaResult giant_area_experiment(const EnsembleSpec& spec, const std::vector<double>& levels, int M,
                                      std::uint64_t seed, const GiantAreaOptions& opt) {
  if (spec.planar()) throw DomainError("giant components are measured on the sphere");
  require_replicates(M);
  require_levels(levels);
  if (opt.cells_per_scale < 4.0) throw ResolutionError("giant experiments need at least 4 cells per local scale");
  auto grid = std::make_shared<const Grid>(build_grid(opt.cells_per_scale, spec.local_scale()));
  const std::size_t L = levels.size();

  const auto per = parallel_map<std::vector<GiantReplicate>>(M, opt.jobs, [&](std::size_t i) {
    const std::uint64_t s_i = replicate_seed(seed, i);
    const FieldSample s = sample_field(spec, grid, s_i);
    std::vector<GiantReplicate> out(L);
    for (std::size_t k = 0; k < L; ++k) {
      GiantReplicate& g = out[k];
      g.level = levels[k];
      g.replicate = static_cast<int>(i);
      g.seed = s_i;
      const ComponentLabeling lab = label_components(excursion_mask(s, levels[k]));
      g.components = lab.components.size();
      if (lab.components.empty()) {
        g.coincide = true;
        continue;
      }
      std::size_t va = 0;
      for (std::size_t id = 1; id < lab.components.size(); ++id)
        if (lab.components[id].area > lab.components[va].area) va = id;
      const Giant gd = giant(lab, GiantBy::Diameter);
      g.area_fraction = lab.components[va].area / kFourPi;
      g.diameter_fraction = gd.area / kFourPi;
      g.giant_diameter = gd.diameter;
      g.coincide = va == gd.id;
    }
    return out;
  });

  GiantAreaResult res;
  res.spec = spec;
  for (std::size_t k = 0; k < L; ++k) {
    std::vector<double> a, d;
    int same = 0;
    for (int i = 0; i < M; ++i) {
      res.rows.push_back(per[i][k]);
      a.push_back(per[i][k].area_fraction);
      d.push_back(per[i][k].diameter_fraction);
      same += per[i][k].coincide ? 1 : 0;
    }
    GiantLevelSummary sum;
    sum.level = levels[k];
    sum.M = M;
    const MeanVar mv = mean_var(a);
    sum.mean = mv.mean;
    sum.variance = mv.variance;
    sum.standard_error = std::sqrt(mv.variance / M);
    sum.mean_diameter_giant = mean_var(d).mean;
    sum.coincidence = static_cast<double>(same) / M;
    sum.reference = std::isfinite(opt.reference) ? opt.reference : mv.mean;
    for (double eps : opt.eps_ladder) {
      int dev = 0;
      for (double v : a) dev += std::abs(v - sum.reference) >= eps ? 1 : 0;
      const double f = static_cast<double>(dev) / M;
      sum.eps.push_back(eps);
      sum.deviation.push_back(f);
      sum.censored.push_back(f < 5.0 / M);
    }
    res.levels.push_back(sum);
  }
  return res;
}

double two_sample_z(const GiantLevelSummary& hi, const GiantLevelSummary& lo) {
  const double se = std::sqrt(hi.standard_error * hi.standard_error + lo.standard_error * lo.standard_error);
  const double diff = hi.mean - lo.mean;
  if (se == 0.0) return diff > 0 ? std::numeric_limits<double>::infinity() : (diff < 0 ? -std::numeric_limits<double>::infinity() : 0.0);
  return diff / se;
}

EUSweepResult eu_sweep(const EnsembleSpec& spec, const std::vector<double>& levels, const std::vector<double>& radii,
                       double delta, int M, std::uint64_t seed, const EUSweepOptions& opt) {
  if (spec.planar()) throw DomainError("local uniqueness sweeps run on the sphere");
  require_replicates(M);
  require_levels(levels);
  if (radii.empty()) throw DomainError("at least one radius is required");
  const Vec3 x = opt.center.normalized();
  const std::size_t L = levels.size(), R = radii.size();
  std::vector<std::vector<int>> fail(L, std::vector<int>(R, 0));
  for (std::size_t j = 0; j < R; ++j) {
    auto grid = std::make_shared<const Grid>(eu_grid(x, radii[j], delta));
    if (grid->spacing() > spec.local_scale() / 4.0 + 1e-15)
      throw ResolutionError("EU grid coarser than a quarter of the local scale");
    const auto ok = parallel_map<std::vector<std::uint8_t>>(M, opt.jobs, [&](std::size_t i) {
      const FieldSample s = sample_field(spec, grid, replicate_seed(seed, i));
      std::vector<std::uint8_t> out(L);
      for (std::size_t k = 0; k < L; ++k) out[k] = eu_event(excursion_mask(s, levels[k]), x, radii[j], delta) ? 1 : 0;
      return out;
    });
    for (const auto& o : ok)
      for (std::size_t k = 0; k < L; ++k) fail[k][j] += o[k] ? 0 : 1;
  }

  EUSweepResult res;
  for (std::size_t k = 0; k < L; ++k) {
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < R; ++j) {
      EUEntry e;
      e.r = radii[j];
      e.level = levels[k];
      e.M = M;
      e.failures = fail[k][j];
      e.value = static_cast<double>(e.failures) / M;
      e.standard_error = binomial_se(e.value, M);
      e.censored = e.value < 5.0 / M;
      if (!e.censored) {
        xs.push_back(e.r);
        ys.push_back(std::log(e.value));
      }
      res.entries.push_back(e);
    }
    const EUEntry* row = &res.entries[k * R];
    for (std::size_t a = 0; a < R; ++a)
      for (std::size_t b = 0; b < R; ++b) {
        if (!(row[a].r < row[b].r)) continue;
        const double pooled = std::hypot(row[a].standard_error, row[b].standard_error);
        if (row[b].value - row[a].value > 3.0 * pooled) res.monotone = false;
      }
    double slope = kNaN;
    if (xs.size() >= 2) {
      const double mx = mean_var(xs).mean, my = mean_var(ys).mean;
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t q = 0; q < xs.size(); ++q) {
        sxy += (xs[q] - mx) * (ys[q] - my);
        sxx += (xs[q] - mx) * (xs[q] - mx);
      }
      if (sxx > 0.0) slope = sxy / sxx;
    }
    res.slope.push_back(slope);
  }
  return res;
}

CouplingLadderResult coupling_ladder(const EnsembleSpec& spec, const std::vector<double>& radii, int M,
                                     std::uint64_t seed, const CouplingOptions& opt) {
  require_replicates(M);
  if (radii.empty()) throw DomainError("at least one radius is required");
  for (double r : radii)
    if (!(r > 0.0)) throw DomainError("coupling radii must be positive");
  CouplingLadderResult res;
  res.spec = spec;
  const std::size_t R = radii.size();
  std::vector<std::vector<double>> stat(R);

  auto mean_square = [](const std::vector<double>& d) {
    double acc = 0.0;
    for (double v : d) acc += v * v;
    return d.empty() ? 0.0 : acc / d.size();
  };

  if (spec.kind == EnsembleSpec::Kind::Kostlan) {
    auto grid = std::make_shared<const Grid>(orthant_points(opt.margin, opt.spacing));
    for (std::size_t j = 0; j < R; ++j) {
      const KostlanCoupling coupling(spec.n, radii[j], grid, opt.margin);
      stat[j] = parallel_map<double>(M, opt.jobs, [&](std::size_t i) {
        return mean_square(coupling.difference(replicate_seed(seed, i)));
      });
      CouplingEntry e;
      e.exact_variance = mean_var(coupling.difference_variance()).mean;
      e.r = radii[j];
      res.entries.push_back(e);
    }
  } else if (!spec.planar()) {
    const ZonalCoefficients c =
        spec.kind == EnsembleSpec::Kind::Isotropic ? spec.zonal : ZonalCoefficients::from_spec(spec.kernel());
    auto grid = std::make_shared<const Grid>(Grid::points(fibonacci_points(std::max(1, opt.points))));
    for (std::size_t j = 0; j < R; ++j) {
      const ZonalCoupling coupling(truncate_zonal(c, radii[j]), grid);
      stat[j] = parallel_map<double>(M, opt.jobs, [&](std::size_t i) {
        return mean_square(coupling.difference(replicate_seed(seed, i)));
      });
      CouplingEntry e;
      e.exact_variance = coupling.difference_variance();
      e.r = radii[j];
      res.entries.push_back(e);
    }
  } else {
    throw DomainError("coupling ladders are defined for spherical ensembles");
  }

  for (std::size_t j = 0; j < R; ++j) {
    const MeanVar mv = mean_var(stat[j]);
    CouplingEntry& e = res.entries[j];
    e.M = M;
    e.variance = mv.mean;
    e.standard_error = std::sqrt(mv.variance / M);
    e.scaled = e.variance * radii[j] / spec.local_scale();
  }
  for (std::size_t a = 0; a < R; ++a)
    for (std::size_t b = 0; b < R; ++b) {
      if (!(radii[a] < radii[b])) continue;
      std::vector<double> d(M);
      for (int i = 0; i < M; ++i) d[i] = stat[a][i] - stat[b][i];
      const MeanVar mv = mean_var(d);
      const double se = std::sqrt(mv.variance / M);
      const double z = se > 0.0 ? mv.mean / se : (mv.mean > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      res.min_paired_z = std::min(res.min_paired_z, z);
      if (!(z > 2.0)) res.strictly_decreasing = false;
    }
  return res;
}

}  // namespace exlab

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
#include "exlab/finite_range.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "exlab/errors.hpp"
#include "exlab/rng.hpp"
#include "exlab/spectral.hpp"

namespace exlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRampLow = 0.25;
constexpr double kRampWidth = 0.25;
constexpr double kShoulder = 0.2;  // fraction of the ramp spent accelerating
constexpr double kPlateau = 1.0 / (1.0 - kShoulder);

// Smooth transition 0 -> 1 on [0,1], symmetric about 1/2.
double transition(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double transition_integral(double t) {
  static const GaussLegendreRule rule = gauss_legendre(64, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * transition(t * rule.nodes[i]);
  return t * s;
}

// Ramp value at y in [0, 1/2] of the normalized interval.
double ramp_lower(double y) {
  if (y < kShoulder) return kPlateau * kShoulder * transition_integral(y / kShoulder);
  return kPlateau * (0.5 * kShoulder + (y - kShoulder));
}

}  // namespace

double bump_eval(double x) {
  if (!(x > kRampLow)) return 0.0;
  if (x >= kRampLow + kRampWidth) return 1.0;
  const double y = (x - kRampLow) / kRampWidth;
  return y <= 0.5 ? ramp_lower(y) : 1.0 - ramp_lower(1.0 - y);
}

double bump_slope(double x) {
  if (!(x > kRampLow) || x >= kRampLow + kRampWidth) return 0.0;
  const double y = (x - kRampLow) / kRampWidth;
  const double e = std::min(y, 1.0 - y);
  const double g = e < kShoulder ? kPlateau * transition(e / kShoulder) : kPlateau;
  return g / kRampWidth;
}

// --- localization points -------------------------------------------------------

LocalizationPoint localization_point(int n, const MultiIndex& J) {
  if (n < 1 || J.j0 < 0 || J.j1 < 0 || J.j2 < 0 || J.j0 + J.j1 + J.j2 != n)
    throw DomainError("multi-index must satisfy |J| = n");
  const double dn = n;
  return {J, Vec3(std::sqrt(J.j0 / dn), std::sqrt(J.j1 / dn), std::sqrt(J.j2 / dn))};
}

std::vector<LocalizationPoint> localization_points(int n) {
  std::vector<LocalizationPoint> out;
  for (const auto& J : kostlan_multi_indices(n)) out.push_back(localization_point(n, J));
  return out;
}

bool in_orthant_subset(const Vec3& x, double margin) {
  return x.x() >= margin && x.y() >= margin && x.z() >= margin;
}

void require_orthant(const Grid& grid, double margin) {
  if (!grid.spherical()) throw DomainError("orthant subset requires a spherical grid");
  if (!(margin > 0.0)) throw DomainError("orthant margin must be positive");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!in_orthant_subset(grid.center(i), margin))
      throw OrthantViolation("cell " + std::to_string(i) + " lies outside the orthant subset");
}

Grid orthant_points(double margin, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("spacing must be positive");
  std::vector<Vec3> pts;
  const int nt = static_cast<int>(std::ceil((kPi / 2) / spacing));
  for (int i = 0; i < nt; ++i) {
    const double th = (i + 0.5) * (kPi / 2) / nt;
    const int np = std::max(1, static_cast<int>(std::ceil((kPi / 2) * std::sin(th) / spacing)));
    for (int j = 0; j < np; ++j) {
      const Vec3 x = from_spherical(th, (j + 0.5) * (kPi / 2) / np);
      if (in_orthant_subset(x, margin)) pts.push_back(x);
    }
  }
  if (pts.empty()) throw ResolutionError("no grid points inside the orthant subset");
  return Grid::points(std::move(pts));
}

std::vector<double> CoupledPair::difference() const {
  std::vector<double> d(full.values.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = full.values[i] - truncated.values[i];
  return d;
}

// --- Kostlan coupling ------------------------------------------------------------

std::vector<double> draw_kostlan_coefficients(int n, std::uint64_t seed) {
  CounterStream stream(seed, StreamTag::Coefficients);
  return stream.normals(0, static_cast<std::size_t>(n + 1) * (n + 2) / 2);
}

KostlanCoupling::KostlanCoupling(int n, double r, GridPtr grid, double margin)
    : n_(n), r_(r), grid_(std::move(grid)) {
  if (!grid_) throw DomainError("null grid");
  if (n < 1) throw DomainError("Kostlan degree must be >= 1");
  if (n > kKostlanDegreeCap) throw BudgetError("Kostlan degree exceeds cap");
  if (!(r >= 1.0 / std::sqrt(double(n)) - 1e-12)) throw DomainError("range must be at least 1/sqrt(n)");
  require_orthant(*grid_, margin);
  index_ = kostlan_multi_indices(n);
  const auto pts = localization_points(n);
  const std::size_t nb = index_.size();
  basis_.resize(grid_->size() * nb);
  keep_.resize(grid_->size() * nb);
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const Vec3 x = grid_->center(i);
    const auto b = kostlan_basis(n, x);
    for (std::size_t k = 0; k < nb; ++k) {
      basis_[i * nb + k] = b[k];
      keep_[i * nb + k] = 1.0 - bump_eval(sph_dist(x, pts[k].v) / r);
    }
  }
}

CoupledPair KostlanCoupling::pair_from(const std::vector<double>& coeffs, std::uint64_t seed) const {
  const std::size_t nb = index_.size();
  if (coeffs.size() != nb) throw DomainError("Kostlan coefficient vector has wrong length");
  CoupledPair p;
  p.range = r_;
  p.shared_seed = seed;
  for (FieldSample* s : {&p.full, &p.truncated}) {
    s->grid = grid_;
    s->spec = EnsembleSpec::kostlan(n_);
    s->seed = seed;
    s->coeffs = coeffs;
    s->values.assign(grid_->size(), 0.0);
  }
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const double* b = basis_.data() + i * nb;
    const double* w = keep_.data() + i * nb;
    double f = 0.0, g = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      const double t = coeffs[k] * b[k];
      f += t;
      g += t * w[k];
    }
    p.full.values[i] = f;
    p.truncated.values[i] = g;
  }
  return p;
}

CoupledPair KostlanCoupling::pair(std::uint64_t seed) const {
  return pair_from(draw_kostlan_coefficients(n_, seed), seed);
}

std::vector<double> KostlanCoupling::difference_from(const std::vector<double>& coeffs) const {
  const std::size_t nb = index_.size();
  if (coeffs.size() != nb) throw DomainError("Kostlan coefficient vector has wrong length");
  std::vector<double> d(grid_->size(), 0.0);
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const double* b = basis_.data() + i * nb;
    const double* w = keep_.data() + i * nb;
    double acc = 0.0;
    for (std::size_t k = 0; k < nb; ++k) acc += coeffs[k] * b[k] * (1.0 - w[k]);
    d[i] = acc;
  }
  return d;
}

std::vector<double> KostlanCoupling::difference(std::uint64_t seed) const {
  return difference_from(draw_kostlan_coefficients(n_, seed));
}

std::vector<double> KostlanCoupling::difference_variance() const {
  const std::size_t nb = index_.size();
  std::vector<double> v(grid_->size(), 0.0);
  for (std::size_t i = 0; i < grid_->size(); ++i)
    for (std::size_t k = 0; k < nb; ++k) {
      const double t = basis_[i * nb + k] * (1.0 - keep_[i * nb + k]);
      v[i] += t * t;
    }
  return v;
}

std::vector<bool> KostlanCoupling::truncation_active() const {
  const std::size_t nb = index_.size();
  std::vector<bool> act(nb, false);
  for (std::size_t i = 0; i < grid_->size(); ++i)
    for (std::size_t k = 0; k < nb; ++k)
      if (keep_[i * nb + k] != 1.0) act[k] = true;
  return act;
}

SupportAudit KostlanCoupling::audit() const {
  const std::size_t nb = index_.size();
  SupportAudit a;
  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < nb; ++k) {
    support.clear();
    for (std::size_t i = 0; i < grid_->size(); ++i)
      if (keep_[i * nb + k] > 0.0) support.push_back(i);
    ++a.basis_checked;
    for (std::size_t p = 0; p < support.size(); ++p)
      for (std::size_t q = p + 1; q < support.size(); ++q) {
        const double d = grid_->distance(support[p], support[q]);
        ++a.pairs_checked;
        a.max_support_diameter = std::max(a.max_support_diameter, d);
        if (d >= r_ && a.pass) {
          a.pass = false;
          a.witness_basis = static_cast<long>(k);
          a.witness_a = support[p];
          a.witness_b = support[q];
        }
      }
  }
  return a;
}

CoupledPair kostlan_coupled(int n, double r, GridPtr grid, std::uint64_t seed, double margin) {
  return KostlanCoupling(n, r, std::move(grid), margin).pair(seed);
}

// --- localization report -------------------------------------------------------------

std::size_t count_localization_points(int n, const Vec3& x, double d) {
  std::size_t c = 0;
  for (const auto& p : localization_points(n))
    if (sph_dist(p.v, x) <= d) ++c;
  return c;
}

LocalizationReport basis_localization_report(int n, double margin, int samples, std::uint64_t seed) {
  if (n < 1 || n > 256) throw DomainError("localization report requires 1 <= n <= 256");
  if (samples < 1) throw DomainError("need at least one sample point");
  LocalizationReport rep;
  rep.n = n;
  rep.margin = margin;
  const auto pts = localization_points(n);
  const std::size_t nb = pts.size();

  CounterStream stream(seed, StreamTag::Auxiliary);
  std::vector<Vec3> xs;
  std::uint64_t k = 0;
  while (static_cast<int>(xs.size()) < samples) {
    const auto a = stream.normal_pair(k++);
    const auto b = stream.normal_pair(k++);
    Vec3 v(std::abs(a[0]), std::abs(a[1]), std::abs(b[0]));
    if (v.norm() == 0.0) continue;
    v.normalize();
    if (in_orthant_subset(v, margin)) xs.push_back(v);
  }

  const double bin_width = 0.05;
  const int nbins = static_cast<int>(std::ceil((kPi / 2) / bin_width));
  rep.bin_edges.resize(nbins + 1);
  for (int i = 0; i <= nbins; ++i) rep.bin_edges[i] = i * bin_width;
  rep.bin_max.assign(nbins, 0.0);

  std::vector<double> peak(nb);
  for (std::size_t j = 0; j < nb; ++j) peak[j] = kostlan_basis(n, pts[j].v)[j];

  std::vector<double> ys, ds;
  const double half_log_n = 0.5 * std::log(double(n));
  for (const Vec3& x : xs) {
    const auto b = kostlan_basis(n, x);
    for (std::size_t j = 0; j < nb; ++j) {
      ++rep.evaluations;
      if (b[j] < 0.0) {
        ++rep.negative;
        rep.positive = false;
      }
      if (b[j] > peak[j] * (1.0 + 1e-12)) rep.peak_at_center = false;
      const double d = sph_dist(x, pts[j].v);
      const int bin = std::min(nbins - 1, static_cast<int>(d / bin_width));
      rep.bin_max[bin] = std::max(rep.bin_max[bin], b[j]);
      if (b[j] > 1e-250) {
        ys.push_back(std::log(b[j]) + half_log_n);
        ds.push_back(d);
      }
    }
  }

  // Decay along geodesic rays leaving each v_J, while the ray stays in the closed orthant.
  for (std::size_t j = 0; j < nb; ++j) {
    const TangentFrame fr = tangent_frame(pts[j].v);
    for (int dir = 0; dir < 8; ++dir) {
      const double ang = dir * kPi / 4;
      double prev = peak[j];
      for (int step = 1; step <= 40; ++step) {
        const Vec3 y = exp_map(fr, Vec2(std::cos(ang), std::sin(ang)) * (0.02 * step));
        if (y.x() < 0 || y.y() < 0 || y.z() < 0) break;
        const double v = kostlan_basis(n, y)[j];
        if (v > prev * (1.0 + 1e-12) + 1e-300) rep.monotone_bins = false;
        prev = v;
      }
    }
  }

  Eigen::MatrixXd X(ys.size(), 2);
  Eigen::VectorXd Y(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = -double(n) * ds[i] * ds[i];
    Y(i) = ys[i];
  }
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(Y);
  rep.fitted_C = std::exp(beta(0));
  rep.fitted_c = beta(1);
  return rep;
}

// --- zonal truncation --------------------------------------------------------------

double zonal_q(const ZonalCoefficients& c, double theta) {
  if (c.c.empty()) return 0.0;
  const auto p = legendre_table(c.lmax(), std::cos(theta));
  CompensatedSum<double> s;
  for (int l = 0; l <= c.lmax(); ++l) s.add(c.c[l] * std::sqrt(legendre_weight(l)) * p[l]);
  return s.value();
}

namespace {

// Legendre recurrence factors (2k+1)/(k+1) and k/(k+1).
struct LegendreFactors {
  std::vector<double> a, b;
  explicit LegendreFactors(int L) : a(std::max(L, 1)), b(std::max(L, 1)) {
    for (int k = 1; k < L; ++k) {
      a[k] = (2.0 * k + 1.0) / (k + 1.0);
      b[k] = k / (k + 1.0);
    }
  }
};

// acc_l += sum_j g_j P_l(x_j), l = 0..L, over a block of nodes evaluated together.
template <int B>
void accumulate_block(const LegendreFactors& f, int L, const double* x, const double* g, double* acc) {
  double p0[B], p1[B];
  double s0 = 0.0, s1 = 0.0;
  for (int j = 0; j < B; ++j) {
    p0[j] = 1.0;
    p1[j] = x[j];
    s0 += g[j];
    s1 += g[j] * x[j];
  }
  acc[0] += s0;
  if (L >= 1) acc[1] += s1;
  for (int k = 1; k < L; ++k) {
    const double a = f.a[k], b = f.b[k];
    double s = 0.0;
    for (int j = 0; j < B; ++j) {
      const double p2 = a * x[j] * p1[j] - b * p0[j];
      p0[j] = p1[j];
      p1[j] = p2;
      s += g[j] * p2;
    }
    acc[k + 1] += s;
  }
}

}  // namespace

std::vector<double> zonal_reexpand(const ZonalCoefficients& c, double r, int L, int* nodes_used) {
  if (L < 0) throw DomainError("negative expansion degree");
  const double knots[] = {0.0, 0.25 * r, 0.3 * r, 0.45 * r, 0.5 * r};
  const int total = 4 * L + 8;
  if (nodes_used) *nodes_used = total;
  std::vector<double> xs, gs;
  for (int piece = 0; piece < 4; ++piece) {
    // Composite rule: panels of at most 32 nodes, m nodes in total on this piece.
    const int m = total / 4 + (piece < total % 4 ? 1 : 0);
    const int panels = (m + 31) / 32;
    const double h = (knots[piece + 1] - knots[piece]) / panels;
    for (int q = 0; q < panels; ++q) {
      const int size = m / panels + (q < m % panels ? 1 : 0);
      const GaussLegendreRule rule = gauss_legendre(size, knots[piece] + q * h, knots[piece] + (q + 1) * h);
      for (int i = 0; i < size; ++i) {
        const double th = rule.nodes[i];
        const double g = zonal_q(c, th) * (1.0 - bump_eval(th / r)) * std::sin(th) * rule.weights[i];
        if (g == 0.0) continue;
        xs.push_back(std::cos(th));
        gs.push_back(g);
      }
    }
  }
  constexpr int B = 8;
  while (xs.size() % B) {
    xs.push_back(0.0);
    gs.push_back(0.0);
  }
  const LegendreFactors f(L);
  std::vector<double> acc(static_cast<std::size_t>(L) + 1, 0.0);
  for (std::size_t i = 0; i < xs.size(); i += B) accumulate_block<B>(f, L, xs.data() + i, gs.data() + i, acc.data());
  for (int l = 0; l <= L; ++l) acc[l] *= std::sqrt(kPi * (2.0 * l + 1.0));
  return acc;
}

namespace {

double kernel_partial(const std::vector<double>& ct, int L, double theta) {
  const auto p = legendre_table(L, std::cos(theta));
  double s = 0.0;
  for (int l = 0; l <= L; ++l) s += ct[l] * ct[l] * p[l];
  return s;
}

std::vector<double> residual_grid(double r) {
  std::vector<double> th(200);
  for (int k = 0; k < 200; ++k) th[k] = r + (kPi - r) * (k + 1) / 200.0;
  return th;
}

}  // namespace

ZonalTruncation truncate_zonal(const ZonalCoefficients& c, double r, const ZonalTruncationOptions& opt) {
  if (!(r > 0.0 && r <= kPi / 2 + 1e-12)) throw DomainError("range must lie in (0, pi/2]");
  for (double v : c.c)
    if (!std::isfinite(v)) throw DomainError("non-finite zonal coefficient");
  ZonalTruncation t;
  t.original = c;
  t.range = r;
  const int lmax = std::max(0, c.lmax());

  // Round-trip check points: dense inside the support, coarse outside.
  std::vector<double> check;
  for (int k = 0; k <= 400; ++k) check.push_back(r * k / 400.0);
  for (int k = 1; k <= 200; ++k) check.push_back(r + (kPi - r) * k / 200.0);
  std::vector<double> target(check.size());
  for (std::size_t j = 0; j < check.size(); ++j)
    target[j] = zonal_q(c, check[j]) * (1.0 - bump_eval(check[j] / r));

  int L = std::max(opt.min_expansion_degree, 4 * std::max(lmax, 1));
  std::vector<double> ct;
  for (;;) {
    ct = zonal_reexpand(c, r, L, &t.quadrature_nodes);
    std::vector<double> cq(ct.size());
    for (int l = 0; l <= L; ++l) cq[l] = ct[l] * std::sqrt(legendre_weight(l));
    double err = 0.0;
    for (std::size_t j = 0; j < check.size(); ++j) {
      const auto p = legendre_table(L, std::cos(check[j]));
      double s = 0.0;
      for (int l = 0; l <= L; ++l) s += cq[l] * p[l];
      err = std::max(err, std::abs(s - target[j]));
    }
    t.roundtrip_error = err;
    t.expansion_degree = L;
    if (err <= opt.roundtrip_tolerance) break;
    if (2 * L > opt.max_expansion_degree)
      throw ConsistencyError("zonal re-expansion round trip " + std::to_string(err) + " exceeds tolerance at degree " +
                             std::to_string(L));
    L *= 2;
  }

  std::vector<double> tail(static_cast<std::size_t>(L) + 2, 0.0);
  for (int l = L; l >= 0; --l) tail[l] = tail[l + 1] + ct[l] * ct[l];
  // Smallest degree whose realized kernel clears the residual tolerance with a factor-10 margin.
  const auto grid = residual_grid(r);
  int Ls = lmax;
  for (;;) {
    double res = 0.0;
    for (double th : grid) res = std::max(res, std::abs(kernel_partial(ct, Ls, th)));
    t.residual_sup = res;
    if (res < 0.1 * opt.residual_tolerance) break;
    if (Ls == L) {
      if (res < opt.residual_tolerance) break;
      throw ConsistencyError("truncated kernel residual does not vanish beyond the range");
    }
    Ls = std::min(L, Ls + 16);
  }
  if (Ls > kHarmonicDegreeCap)
    throw BudgetError("sampling degree " + std::to_string(Ls) + " exceeds the harmonic cap");
  t.sampling_degree = Ls;
  t.dropped_variance = tail[Ls + 1];
  t.truncated.c.assign(ct.begin(), ct.begin() + Ls + 1);
  return t;
}

ZonalCoupling::ZonalCoupling(ZonalTruncation trunc, GridPtr grid) : trunc_(std::move(trunc)), grid_(std::move(grid)) {
  if (!grid_) throw DomainError("null grid");
  if (!grid_->spherical()) throw DomainError("zonal coupling requires a spherical grid");
  const std::size_t L = std::max(trunc_.original.c.size(), trunc_.truncated.c.size());
  c_full_ = trunc_.original.c;
  c_trunc_ = trunc_.truncated.c;
  c_full_.resize(L, 0.0);
  c_trunc_.resize(L, 0.0);
}

namespace {

std::vector<double> to_weights(const std::vector<double>& c) {
  std::vector<double> w(c.size());
  for (std::size_t l = 0; l < c.size(); ++l) w[l] = c[l] / std::sqrt(legendre_weight(static_cast<int>(l)));
  return w;
}

}  // namespace

CoupledPair ZonalCoupling::pair(std::uint64_t seed) const {
  CoupledPair p;
  p.range = trunc_.range;
  p.shared_seed = seed;
  const int L = static_cast<int>(c_full_.size()) - 1;
  std::vector<double> a = L >= 0 ? draw_harmonic_coefficients(seed, 0, L) : std::vector<double>{};
  p.full.spec = EnsembleSpec::isotropic(trunc_.original);
  p.truncated.spec = EnsembleSpec::isotropic(trunc_.truncated);
  for (FieldSample* s : {&p.full, &p.truncated}) {
    s->grid = grid_;
    s->seed = seed;
    s->coeffs = a;
    s->coeff_lmin = 0;
    s->coeff_lmax = L;
  }
  p.full.values = synthesize_harmonics(to_weights(c_full_), a, 0, *grid_);
  p.truncated.values = synthesize_harmonics(to_weights(c_trunc_), a, 0, *grid_);
  return p;
}

std::vector<double> ZonalCoupling::difference(std::uint64_t seed) const {
  const int L = static_cast<int>(c_full_.size()) - 1;
  if (L < 0) return std::vector<double>(grid_->size(), 0.0);
  std::vector<double> d(c_full_.size());
  for (std::size_t l = 0; l < d.size(); ++l) d[l] = c_full_[l] - c_trunc_[l];
  return synthesize_harmonics(to_weights(d), draw_harmonic_coefficients(seed, 0, L), 0, *grid_);
}

double ZonalCoupling::difference_variance() const {
  double s = 0.0;
  for (std::size_t l = 0; l < c_full_.size(); ++l) s += (c_full_[l] - c_trunc_[l]) * (c_full_[l] - c_trunc_[l]);
  return s;
}

CoupledPair zonal_truncated_pair(const ZonalCoefficients& coeffs, double r, GridPtr grid, std::uint64_t seed) {
  return ZonalCoupling(truncate_zonal(coeffs, r), std::move(grid)).pair(seed);
}

// --- sup statistics --------------------------------------------------------------------

SupStats coupling_sup_stats(const DifferenceSampler& diff, const Grid& grid, const std::vector<SphericalCap>& caps,
                            int M, std::uint64_t master_seed, const std::vector<double>& thresholds) {
  if (M < 1) throw DomainError("need at least one replicate");
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& c : caps)
      if (c.contains(grid.center(i))) {
        cells.push_back(i);
        break;
      }
  if (cells.empty()) throw GeometryError("no grid cell lies in the given caps");
  SupStats s;
  s.replicates = M;
  s.thresholds = thresholds;
  double sum = 0.0, sum2 = 0.0;
  for (int m = 0; m < M; ++m) {
    const auto d = diff(replicate_seed(master_seed, static_cast<std::uint64_t>(m)));
    double sup = 0.0;
    for (std::size_t i : cells) sup = std::max(sup, std::abs(d[i]));
    s.sups.push_back(sup);
    sum += sup;
    sum2 += sup * sup;
  }
  s.mean = sum / M;
  s.standard_error = M > 1 ? std::sqrt(std::max(0.0, (sum2 / M - s.mean * s.mean) / (M - 1))) : 0.0;
  for (double t : thresholds) {
    const auto cnt = std::count_if(s.sups.begin(), s.sups.end(), [t](double v) { return v > t; });
    const double f = double(cnt) / M;
    s.exceedance.push_back(f);
    s.censored.push_back(f < 5.0 / M);
  }
  std::vector<double> slopes;
  int prev = -1;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (s.censored[k]) continue;
    if (prev >= 0)
      slopes.push_back((std::log(s.exceedance[k]) - std::log(s.exceedance[prev])) / (thresholds[k] - thresholds[prev]));
    prev = static_cast<int>(k);
  }
  for (std::size_t k = 1; k < slopes.size(); ++k)
    if (slopes[k] > slopes[k - 1] + 1e-12) s.sub_exponential_tail = false;
  if (!slopes.empty() && !(slopes.back() < -1.0)) s.sub_exponential_tail = false;
  return s;
}

}  // namespace exlab

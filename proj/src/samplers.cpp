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
#include "exlab/samplers.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "exlab/errors.hpp"

namespace exlab {

namespace {

constexpr double kPi = std::numbers::pi;

// Recurrence coefficients for ascending-l normalized associated Legendre functions.
struct LegendreTables {
  int lmax = -1;
  std::vector<std::size_t> offset;  // start of column m (entries l = m..lmax)
  std::vector<double> a, b;
  std::vector<double> log_sectoral;  // log sqrt((2m+1)/(2m))
  std::vector<double> first;         // sqrt(2m+3)

  explicit LegendreTables(int L) : lmax(L) {
    offset.resize(L + 2);
    std::size_t o = 0;
    for (int m = 0; m <= L; ++m) {
      offset[m] = o;
      o += static_cast<std::size_t>(L - m + 1);
    }
    offset[L + 1] = o;
    a.assign(o, 0.0);
    b.assign(o, 0.0);
    log_sectoral.assign(L + 1, 0.0);
    first.assign(L + 1, 0.0);
    for (int m = 0; m <= L; ++m) {
      if (m > 0) log_sectoral[m] = 0.5 * std::log((2.0 * m + 1.0) / (2.0 * m));
      first[m] = std::sqrt(2.0 * m + 3.0);
      for (int l = m + 2; l <= L; ++l) {
        const double l2 = double(l) * l, m2 = double(m) * m, lm1 = double(l - 1);
        a[offset[m] + (l - m)] = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
        b[offset[m] + (l - m)] = std::sqrt((lm1 * lm1 - m2) / (4.0 * lm1 * lm1 - 1.0));
      }
    }
  }
};

const LegendreTables& tables_for(int lmax) {
  thread_local std::unique_ptr<LegendreTables> cache;
  if (!cache || cache->lmax != lmax) cache = std::make_unique<LegendreTables>(lmax);
  return *cache;
}

constexpr double kRescale = 1e150;
const double kLogRescale = std::log(kRescale);

// Calls visit(l, Pbar_l^m(cos theta)) for l = m..lmax; values below the double range are skipped.
template <class Visit>
void legendre_column(const LegendreTables& t, int m, double x, double log_pmm, Visit&& visit) {
  const int L = t.lmax;
  double log_scale = log_pmm;
  double factor = std::exp(log_scale);
  double p_prev = 0.0, p = 1.0;
  if (factor != 0.0) visit(m, p * factor);
  if (m == L) return;
  double next = t.first[m] * x * p;
  p_prev = p;
  p = next;
  if (factor != 0.0) visit(m + 1, p * factor);
  const double* a = t.a.data() + t.offset[m];
  const double* b = t.b.data() + t.offset[m];
  for (int l = m + 2; l <= L; ++l) {
    next = a[l - m] * (x * p - b[l - m] * p_prev);
    p_prev = p;
    p = next;
    if (std::abs(p) > kRescale) {
      p /= kRescale;
      p_prev /= kRescale;
      log_scale += kLogRescale;
      factor = std::exp(log_scale);
    }
    if (factor != 0.0) visit(l, p * factor);
  }
}

void check_harmonic_degree(int lmax) {
  if (lmax > kHarmonicDegreeCap)
    throw BudgetError("harmonic degree " + std::to_string(lmax) + " exceeds cap " +
                      std::to_string(kHarmonicDegreeCap));
}

// Row coefficients A_m, B_m so that f(theta, phi) = sum_m A_m cos(m phi) + B_m sin(m phi).
void row_coefficients(const LegendreTables& t, const std::vector<double>& weights, const std::vector<double>& coeffs,
                      int lmin, double theta, std::vector<double>& A, std::vector<double>& B) {
  const int L = t.lmax;
  A.assign(L + 1, 0.0);
  B.assign(L + 1, 0.0);
  const double x = std::cos(theta), s = std::sin(theta);
  const double log_s = s > 0.0 ? std::log(s) : -INFINITY;
  const std::size_t base = static_cast<std::size_t>(lmin) * lmin;
  double log_pmm = -0.5 * std::log(4.0 * kPi);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) {
      log_pmm += t.log_sectoral[m] + log_s;
      if (!std::isfinite(log_pmm)) break;
    }
    double sa = 0.0, sb = 0.0;
    legendre_column(t, m, x, log_pmm, [&](int l, double p) {
      if (l < lmin || weights[l] == 0.0) return;
      const double wp = weights[l] * p;
      sa += wp * coeffs[harmonic_index(l, m) - base];
      if (m > 0) sb += wp * coeffs[harmonic_index(l, -m) - base];
    });
    if (m > 0) {
      A[m] = std::numbers::sqrt2 * sa;
      B[m] = std::numbers::sqrt2 * sb;
    } else {
      A[0] = sa;
    }
  }
}

double row_value(const std::vector<double>& A, const std::vector<double>& B, double phi) {
  const std::complex<double> z(std::cos(phi), std::sin(phi));
  const int L = static_cast<int>(A.size()) - 1;
  std::complex<double> acc(A[L], -B[L]);
  for (int m = L - 1; m >= 0; --m) acc = acc * z + std::complex<double>(A[m], -B[m]);
  return acc.real();
}

void spherical_coords(const Vec3& v, double& theta, double& phi) {
  theta = std::atan2(std::hypot(v.x(), v.y()), v.z());
  phi = std::atan2(v.y(), v.x());
}

void require_spherical(const Grid& g) {
  if (!g.spherical()) throw DomainError("spherical ensemble requires a spherical grid");
}

void require_planar(const Grid& g) {
  if (g.spherical()) throw DomainError("planar field requires a planar grid or planar points");
}

std::vector<double> harmonic_weights(const std::vector<double>& c) {
  std::vector<double> w(c.size());
  for (std::size_t l = 0; l < c.size(); ++l) w[l] = c[l] / std::sqrt(legendre_weight(static_cast<int>(l)));
  return w;
}

FieldSample harmonic_sample(const std::vector<double>& c, int lmin, GridPtr grid, std::uint64_t seed,
                            const EnsembleSpec& spec) {
  if (!grid) throw DomainError("null grid");
  require_spherical(*grid);
  const int lmax = static_cast<int>(c.size()) - 1;
  FieldSample s;
  s.grid = grid;
  s.spec = spec;
  s.seed = seed;
  if (lmax < 0) {
    s.values.assign(grid->size(), 0.0);
    return s;
  }
  check_harmonic_degree(lmax);
  s.coeff_lmin = lmin;
  s.coeff_lmax = lmax;
  s.coeffs = draw_harmonic_coefficients(seed, lmin, lmax);
  s.values = synthesize_harmonics(harmonic_weights(c), s.coeffs, lmin, *grid);
  return s;
}

}  // namespace

// --- EnsembleSpec ------------------------------------------------------------

EnsembleSpec EnsembleSpec::kostlan(int n) {
  KernelSpec::kostlan(n);
  EnsembleSpec s;
  s.kind = Kind::Kostlan;
  s.n = n;
  return s;
}

EnsembleSpec EnsembleSpec::rsh(int ell) {
  KernelSpec::legendre(ell);
  EnsembleSpec s;
  s.kind = Kind::RSH;
  s.ell = ell;
  return s;
}

EnsembleSpec EnsembleSpec::bandlimited(double alpha, int ell) {
  KernelSpec::bandlimited(alpha, ell);
  EnsembleSpec s;
  s.kind = Kind::BandLimited;
  s.alpha = alpha;
  s.ell = ell;
  return s;
}

EnsembleSpec EnsembleSpec::mono(double beta, int ell) {
  KernelSpec::mono(beta, ell);
  EnsembleSpec s;
  s.kind = Kind::Mono;
  s.beta = beta;
  s.ell = ell;
  return s;
}

EnsembleSpec EnsembleSpec::isotropic(ZonalCoefficients c) {
  for (double v : c.c)
    if (!std::isfinite(v)) throw DomainError("non-finite zonal coefficient");
  EnsembleSpec s;
  s.kind = Kind::Isotropic;
  s.zonal = std::move(c);
  return s;
}

EnsembleSpec EnsembleSpec::bargmann_fock(int waves) {
  if (waves < 1) throw DomainError("wave count must be >= 1");
  EnsembleSpec s;
  s.kind = Kind::BargmannFock;
  s.waves = waves;
  return s;
}

EnsembleSpec EnsembleSpec::plane_wave(double alpha, int waves) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  if (waves < 1) throw DomainError("wave count must be >= 1");
  EnsembleSpec s;
  s.kind = Kind::PlaneWave;
  s.alpha = alpha;
  s.waves = waves;
  return s;
}

double EnsembleSpec::local_scale() const {
  switch (kind) {
    case Kind::Kostlan: return 1.0 / std::sqrt(double(n));
    case Kind::RSH:
    case Kind::BandLimited:
    case Kind::Mono: return 1.0 / std::max(1, ell);
    case Kind::Isotropic: return 1.0 / std::max(1, zonal.lmax());
    default: return 1.0;
  }
}

KernelSpec EnsembleSpec::kernel() const {
  switch (kind) {
    case Kind::Kostlan: return KernelSpec::kostlan(n);
    case Kind::RSH: return KernelSpec::legendre(ell);
    case Kind::BandLimited: return KernelSpec::bandlimited(alpha, ell);
    case Kind::Mono: return KernelSpec::mono(beta, ell);
    default: throw DomainError(std::string("no kernel spec for ensemble ") + to_string(kind));
  }
}

double EnsembleSpec::covariance(double d) const {
  switch (kind) {
    case Kind::Isotropic: return zonal.kernel(d);
    case Kind::BargmannFock: return std::exp(-0.5 * d * d);
    case Kind::PlaneWave: {
      if (d == 0.0) return 1.0;
      if (alpha == 1.0) return std::cyl_bessel_j(0.0, d);
      const double inner = alpha > 0.0 ? alpha * std::cyl_bessel_j(1.0, alpha * d) : 0.0;
      return 2.0 * (std::cyl_bessel_j(1.0, d) - inner) / (d * (1.0 - alpha * alpha));
    }
    default: return kernel_value(kernel(), d);
  }
}

const char* to_string(EnsembleSpec::Kind k) {
  switch (k) {
    case EnsembleSpec::Kind::Kostlan: return "kostlan";
    case EnsembleSpec::Kind::RSH: return "rsh";
    case EnsembleSpec::Kind::BandLimited: return "bandlimited";
    case EnsembleSpec::Kind::Mono: return "mono";
    case EnsembleSpec::Kind::Isotropic: return "isotropic";
    case EnsembleSpec::Kind::BargmannFock: return "bargmann_fock";
    case EnsembleSpec::Kind::PlaneWave: return "plane_wave";
  }
  return "?";
}

std::string EnsembleSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind);
  switch (kind) {
    case Kind::Kostlan: os << "(n=" << n << ")"; break;
    case Kind::RSH: os << "(ell=" << ell << ")"; break;
    case Kind::BandLimited: os << "(alpha=" << alpha << ",ell=" << ell << ")"; break;
    case Kind::Mono: os << "(beta=" << beta << ",ell=" << ell << ")"; break;
    case Kind::Isotropic: os << "(lmax=" << zonal.lmax() << ")"; break;
    case Kind::BargmannFock: os << "(K=" << waves << ")"; break;
    case Kind::PlaneWave: os << "(alpha=" << alpha << ",K=" << waves << ")"; break;
  }
  return os.str();
}

// --- spherical harmonics -----------------------------------------------------

std::vector<double> normalized_legendre(int lmax, int m, double theta) {
  if (m < 0 || m > lmax) throw DomainError("order outside [0, lmax]");
  check_harmonic_degree(lmax);
  const LegendreTables& t = tables_for(lmax);
  const double s = std::sin(theta);
  double log_pmm = -0.5 * std::log(4.0 * kPi);
  for (int k = 1; k <= m; ++k) log_pmm += t.log_sectoral[k] + (s > 0 ? std::log(s) : -INFINITY);
  std::vector<double> out(lmax - m + 1, 0.0);
  if (std::isfinite(log_pmm))
    legendre_column(t, m, std::cos(theta), log_pmm, [&](int l, double p) { out[l - m] = p; });
  return out;
}

double real_ylm(int ell, int m, const Vec3& x) {
  if (ell < 0 || std::abs(m) > ell) throw DomainError("invalid (l, m)");
  double theta, phi;
  spherical_coords(x, theta, phi);
  const int am = std::abs(m);
  const double p = normalized_legendre(ell, am, theta)[ell - am];
  if (m == 0) return p;
  return std::numbers::sqrt2 * p * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

std::vector<double> draw_harmonic_coefficients(std::uint64_t seed, int lmin, int lmax) {
  if (lmin < 0 || lmax < lmin) throw DomainError("invalid coefficient degree range");
  const std::size_t first = static_cast<std::size_t>(lmin) * lmin;
  const std::size_t last = static_cast<std::size_t>(lmax + 1) * (lmax + 1);
  CounterStream stream(seed, StreamTag::Coefficients);
  return stream.normals(first, last - first);
}

std::vector<double> synthesize_harmonics(const std::vector<double>& weights, const std::vector<double>& coeffs,
                                         int lmin, const Grid& grid) {
  require_spherical(grid);
  const int lmax = static_cast<int>(weights.size()) - 1;
  std::vector<double> values(grid.size(), 0.0);
  if (lmax < 0) return values;
  check_harmonic_degree(lmax);
  const std::size_t need = static_cast<std::size_t>(lmax + 1) * (lmax + 1) - static_cast<std::size_t>(lmin) * lmin;
  if (coeffs.size() < need) throw DomainError("coefficient vector too short");
  const LegendreTables& t = tables_for(lmax);
  std::vector<double> A, B;
  if (grid.kind() == GridKind::SphereLatLon || grid.kind() == GridKind::SphereWindow) {
    for (int r = 0; r < grid.rows(); ++r) {
      row_coefficients(t, weights, coeffs, lmin, grid.row_theta(r), A, B);
      for (int c = 0; c < grid.cols(); ++c)
        values[static_cast<std::size_t>(r) * grid.cols() + c] = row_value(A, B, grid.col_phi(c));
    }
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double theta, phi;
      spherical_coords(grid.center(i), theta, phi);
      row_coefficients(t, weights, coeffs, lmin, theta, A, B);
      values[i] = row_value(A, B, phi);
    }
  }
  return values;
}

FieldSample sample_rsh(int ell, GridPtr grid, std::uint64_t seed) {
  return harmonic_sample(ZonalCoefficients::rsh(ell).c, ell, std::move(grid), seed, EnsembleSpec::rsh(ell));
}

FieldSample sample_bandlimited(const KernelSpec& spec, GridPtr grid, std::uint64_t seed) {
  EnsembleSpec es;
  if (spec.kind == KernelSpec::Kind::BandLimited)
    es = EnsembleSpec::bandlimited(spec.alpha, spec.ell);
  else if (spec.kind == KernelSpec::Kind::Mono)
    es = EnsembleSpec::mono(spec.beta, spec.ell);
  else
    throw DomainError("sample_bandlimited requires a band-limited or monochromatic spec");
  return harmonic_sample(ZonalCoefficients::from_spec(spec).c, spec.window_low(), std::move(grid), seed, es);
}

FieldSample sample_isotropic(const ZonalCoefficients& coeffs, GridPtr grid, std::uint64_t seed) {
  return harmonic_sample(coeffs.c, 0, std::move(grid), seed, EnsembleSpec::isotropic(coeffs));
}

// --- Kostlan -------------------------------------------------------------------

std::vector<MultiIndex> kostlan_multi_indices(int n) {
  if (n < 0) throw DomainError("negative Kostlan degree");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(n + 1) * (n + 2) / 2);
  for (int j0 = n; j0 >= 0; --j0)
    for (int j1 = n - j0; j1 >= 0; --j1) out.push_back({j0, j1, n - j0 - j1});
  return out;
}

std::vector<double> kostlan_weights(int n) {
  const auto idx = kostlan_multi_indices(n);
  std::vector<double> w(idx.size());
  const double lf = std::lgamma(n + 1.0);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto& J = idx[k];
    w[k] = std::exp(0.5 * (lf - std::lgamma(J.j0 + 1.0) - std::lgamma(J.j1 + 1.0) - std::lgamma(J.j2 + 1.0)));
  }
  return w;
}

namespace {

void powers(double x, int n, std::vector<double>& out) {
  out.resize(n + 1);
  out[0] = 1.0;
  for (int j = 1; j <= n; ++j) {
    const double v = out[j - 1] * x;
    out[j] = std::abs(v) < 1e-300 ? 0.0 : v;
  }
}

void check_kostlan_degree(int n) {
  if (n < 1) throw DomainError("Kostlan degree must be >= 1");
  if (n > kKostlanDegreeCap)
    throw BudgetError("Kostlan degree " + std::to_string(n) + " exceeds cap " + std::to_string(kKostlanDegreeCap));
}

}  // namespace

std::vector<double> kostlan_basis(int n, const Vec3& x) {
  check_kostlan_degree(n);
  const auto w = kostlan_weights(n);
  std::vector<double> p0, p1, p2;
  powers(x.x(), n, p0);
  powers(x.y(), n, p1);
  powers(x.z(), n, p2);
  std::vector<double> out(w.size());
  std::size_t k = 0;
  for (int j0 = n; j0 >= 0; --j0)
    for (int j1 = n - j0; j1 >= 0; --j1, ++k) out[k] = w[k] * p0[j0] * p1[j1] * p2[n - j0 - j1];
  return out;
}

std::vector<double> synthesize_kostlan(int n, const std::vector<double>& coeffs, const Grid& grid) {
  require_spherical(grid);
  check_kostlan_degree(n);
  const auto w = kostlan_weights(n);
  if (coeffs.size() != w.size()) throw DomainError("Kostlan coefficient vector has wrong length");
  std::vector<double> wa(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) wa[k] = w[k] * coeffs[k];
  std::vector<double> values(grid.size());
  std::vector<double> p0, p1, p2;
  if (grid.kind() == GridKind::SphereLatLon || grid.kind() == GridKind::SphereWindow) {
    // x^j0 y^j1 z^j2 = sin^k(theta) cos^(n-k)(theta) cos^j0(phi) sin^j1(phi) with k = j0 + j1.
    const int cols = grid.cols();
    std::vector<double> colpoly(static_cast<std::size_t>(cols) * (n + 1), 0.0);
    for (int c = 0; c < cols; ++c) {
      powers(std::cos(grid.col_phi(c)), n, p0);
      powers(std::sin(grid.col_phi(c)), n, p1);
      double* pk = colpoly.data() + static_cast<std::size_t>(c) * (n + 1);
      std::size_t k = 0;
      for (int j0 = n; j0 >= 0; --j0)
        for (int j1 = n - j0; j1 >= 0; --j1, ++k) pk[j0 + j1] += wa[k] * p0[j0] * p1[j1];
    }
    std::vector<double> radial(n + 1);
    for (int r = 0; r < grid.rows(); ++r) {
      const double th = grid.row_theta(r);
      powers(std::sin(th), n, p0);
      powers(std::cos(th), n, p2);
      for (int k = 0; k <= n; ++k) radial[k] = p0[k] * p2[n - k];
      double* row = values.data() + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) {
        const double* pk = colpoly.data() + static_cast<std::size_t>(c) * (n + 1);
        double total = 0.0;
        for (int k = 0; k <= n; ++k) total += radial[k] * pk[k];
        row[c] = total;
      }
    }
    return values;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec3 x = grid.center(i);
    powers(x.x(), n, p0);
    powers(x.y(), n, p1);
    powers(x.z(), n, p2);
    double total = 0.0;
    std::size_t k = 0;
    for (int j0 = n; j0 >= 0; --j0) {
      double inner = 0.0;
      const int rest = n - j0;
      for (int j1 = rest; j1 >= 0; --j1, ++k) inner += wa[k] * p1[j1] * p2[rest - j1];
      total += p0[j0] * inner;
    }
    values[i] = total;
  }
  return values;
}

FieldSample sample_kostlan(int n, GridPtr grid, std::uint64_t seed) {
  if (!grid) throw DomainError("null grid");
  check_kostlan_degree(n);
  FieldSample s;
  s.grid = grid;
  s.spec = EnsembleSpec::kostlan(n);
  s.seed = seed;
  CounterStream stream(seed, StreamTag::Coefficients);
  s.coeffs = stream.normals(0, static_cast<std::size_t>(n + 1) * (n + 2) / 2);
  s.values = synthesize_kostlan(n, s.coeffs, *grid);
  return s;
}

// --- planar ----------------------------------------------------------------------

WaveSuperposition draw_waves(const EnsembleSpec& spec, std::uint64_t seed) {
  if (!spec.planar()) throw DomainError("draw_waves requires a planar ensemble");
  if (spec.waves < 1) throw DomainError("wave count must be >= 1");
  CounterStream stream(seed, StreamTag::Waves);
  WaveSuperposition w;
  w.frequencies.resize(spec.waves);
  w.phases.resize(spec.waves);
  for (int k = 0; k < spec.waves; ++k) {
    const auto blk = stream.block(static_cast<std::uint64_t>(k));
    const double u1 = to_open_unit(blk[0], blk[1]);
    const double u2 = to_open_unit(blk[2], blk[3]);
    const auto blk2 = stream.block(static_cast<std::uint64_t>(k) + (std::uint64_t{1} << 40));
    const double u3 = to_open_unit(blk2[0], blk2[1]);
    if (spec.kind == EnsembleSpec::Kind::BargmannFock) {
      const double rad = std::sqrt(-2.0 * std::log(u1));
      w.frequencies[k] = Vec2(rad * std::cos(2.0 * kPi * u2), rad * std::sin(2.0 * kPi * u2));
    } else {
      const double a2 = spec.alpha * spec.alpha;
      const double rad = spec.alpha == 1.0 ? 1.0 : std::sqrt(a2 + u1 * (1.0 - a2));
      w.frequencies[k] = Vec2(rad * std::cos(2.0 * kPi * u2), rad * std::sin(2.0 * kPi * u2));
    }
    w.phases[k] = 2.0 * kPi * u3;
  }
  return w;
}

std::vector<double> synthesize_waves(const WaveSuperposition& w, const Grid& grid) {
  require_planar(grid);
  if (w.size() < 1) throw DomainError("empty wave superposition");
  const double scale = std::sqrt(2.0 / w.size());
  std::vector<double> values(grid.size(), 0.0);
  if (grid.kind() == GridKind::Planar) {
    const int n = grid.cols();
    const double h = grid.planar_side() / n;
    const double x0 = grid.planar_x(0);
    for (int r = 0; r < grid.rows(); ++r) {
      const double y = grid.planar_y(r);
      double* row = values.data() + static_cast<std::size_t>(r) * n;
      for (int k = 0; k < w.size(); ++k) {
        const Vec2& xi = w.frequencies[k];
        const double start = xi.x() * x0 + xi.y() * y + w.phases[k];
        std::complex<double> z(std::cos(start), std::sin(start));
        const std::complex<double> step(std::cos(xi.x() * h), std::sin(xi.x() * h));
        for (int c = 0; c < n; ++c) {
          if ((c & 63) == 0 && c > 0) {
            const double arg = start + xi.x() * h * c;
            z = std::complex<double>(std::cos(arg), std::sin(arg));
          }
          row[c] += z.real();
          z *= step;
        }
      }
      for (int c = 0; c < n; ++c) row[c] *= scale;
    }
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec3 p = grid.center(i);
      double acc = 0.0;
      for (int k = 0; k < w.size(); ++k)
        acc += std::cos(w.frequencies[k].x() * p.x() + w.frequencies[k].y() * p.y() + w.phases[k]);
      values[i] = scale * acc;
    }
  }
  return values;
}

FieldSample sample_planar(const EnsembleSpec& spec, GridPtr grid, std::uint64_t seed) {
  if (!grid) throw DomainError("null grid");
  if (spec.waves < 64) throw DomainError("planar sampling requires at least 64 waves");
  const WaveSuperposition w = draw_waves(spec, seed);
  FieldSample s;
  s.grid = grid;
  s.spec = spec;
  s.seed = seed;
  s.values = synthesize_waves(w, *grid);
  s.coeffs.reserve(3 * w.size());
  for (int k = 0; k < w.size(); ++k) {
    s.coeffs.push_back(w.frequencies[k].x());
    s.coeffs.push_back(w.frequencies[k].y());
    s.coeffs.push_back(w.phases[k]);
  }
  return s;
}

FieldSample sample_field(const EnsembleSpec& spec, GridPtr grid, std::uint64_t seed) {
  switch (spec.kind) {
    case EnsembleSpec::Kind::Kostlan: return sample_kostlan(spec.n, std::move(grid), seed);
    case EnsembleSpec::Kind::RSH: return sample_rsh(spec.ell, std::move(grid), seed);
    case EnsembleSpec::Kind::BandLimited:
    case EnsembleSpec::Kind::Mono: return sample_bandlimited(spec.kernel(), std::move(grid), seed);
    case EnsembleSpec::Kind::Isotropic: return sample_isotropic(spec.zonal, std::move(grid), seed);
    case EnsembleSpec::Kind::BargmannFock:
    case EnsembleSpec::Kind::PlaneWave: return sample_planar(spec, std::move(grid), seed);
  }
  throw DomainError("unknown ensemble");
}

}  // namespace exlab

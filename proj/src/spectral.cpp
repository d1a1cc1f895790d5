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
#include "exlab/spectral.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace exlab {

namespace {

int floor_power(int ell, double beta) {
  return static_cast<int>(std::floor(std::pow(static_cast<double>(ell), beta) + 1e-12));
}

}  // namespace

KernelSpec KernelSpec::kostlan(int n) {
  if (n < 1) throw DomainError("Kostlan degree must be >= 1");
  KernelSpec s;
  s.kind = Kind::Kostlan;
  s.n = n;
  return s;
}

KernelSpec KernelSpec::legendre(int ell) {
  if (ell < 0) throw DomainError("degree must be >= 0");
  KernelSpec s;
  s.kind = Kind::Legendre;
  s.ell = ell;
  return s;
}

KernelSpec KernelSpec::bandlimited(double alpha, int ell) {
  if (ell < 0) throw DomainError("degree must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0,1]");
  KernelSpec s;
  s.kind = Kind::BandLimited;
  s.alpha = alpha;
  s.ell = ell;
  return s;
}

KernelSpec KernelSpec::mono(double beta, int ell) {
  if (ell < 1) throw DomainError("degree must be >= 1");
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
  KernelSpec s;
  s.kind = Kind::Mono;
  s.beta = beta;
  s.ell = ell;
  if (s.window_low() < 0) throw DomainError("empty monochromatic window");
  return s;
}

int KernelSpec::window_low() const {
  switch (kind) {
    case Kind::BandLimited:
      return static_cast<int>(std::floor(alpha * ell + 1e-12));
    case Kind::Mono:
      return ell - floor_power(ell, beta);
    case Kind::Legendre:
      return ell;
    case Kind::Kostlan:
      break;
  }
  return 0;
}

double KernelSpec::window_exponent() const {
  if (kind == Kind::Mono) return beta;
  if (kind == Kind::BandLimited && alpha >= 1.0) return beta;
  return 1.0;
}

double KernelSpec::normalizing_constant_sq() const {
  const double l0 = window_low();
  return 4.0 * std::numbers::pi / ((ell + 1.0) * (ell + 1.0) - l0 * l0);
}

std::string KernelSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Kostlan:
      os << "kostlan(n=" << n << ")";
      break;
    case Kind::Legendre:
      os << "legendre(ell=" << ell << ")";
      break;
    case Kind::BandLimited:
      os << "bandlimited(alpha=" << alpha << ",ell=" << ell << ")";
      break;
    case Kind::Mono:
      os << "mono(beta=" << beta << ",ell=" << ell << ")";
      break;
  }
  return os.str();
}

double kostlan_kernel(int n, double theta) {
  if (n < 0) throw DomainError("negative Kostlan degree");
  if (!(theta >= -kDomainTolerance && theta <= std::numbers::pi + kDomainTolerance))
    throw DomainError("angle outside [0,pi]");
  if (n == 0) return 1.0;
  const double half = std::numbers::pi / 2;
  if (theta == half) return 0.0;
  const bool reflected = theta > half;
  const double c = reflected ? std::cos(std::numbers::pi - theta) : std::cos(theta);
  if (c == 0.0) return 0.0;
  const double magnitude = std::exp(static_cast<double>(n) * std::log(std::abs(c)));
  return (reflected && (n & 1)) ? -magnitude : magnitude;
}

BandlimitedKernelValue bandlimited_kernel_both(const KernelSpec& spec, double theta) {
  if (spec.kind != KernelSpec::Kind::BandLimited && spec.kind != KernelSpec::Kind::Mono)
    throw DomainError("bandlimited_kernel requires a band-limited or monochromatic spec");
  const double x = std::cos(theta);
  const int ell = spec.ell;
  const int l0 = spec.window_low();
  const double c2 = spec.normalizing_constant_sq();

  const auto p = legendre_table<double>(ell, x);
  CompensatedSum<double> acc;
  for (int k = l0; k <= ell; ++k) acc.add(legendre_weight(k) * p[k]);
  const double direct = c2 * acc.value();

  const double four_pi = 4.0 * std::numbers::pi;
  double jac = (ell + 1.0) / four_pi * jacobi_p10<double>(ell, x);
  if (l0 > 0) jac -= l0 / four_pi * jacobi_p10<double>(l0 - 1, x);
  return {direct, c2 * jac};
}

double bandlimited_kernel(const KernelSpec& spec, double theta) {
  const auto v = bandlimited_kernel_both(spec, theta);
  if (std::abs(v.direct - v.jacobi) > 1e-9 * std::max(1.0, std::abs(v.direct)))
    throw ConsistencyError("direct and Christoffel-Darboux kernel forms disagree at theta=" +
                           std::to_string(theta));
  return v.jacobi;
}

double kernel_value(const KernelSpec& spec, double theta) {
  switch (spec.kind) {
    case KernelSpec::Kind::Kostlan:
      return kostlan_kernel(spec.n, theta);
    case KernelSpec::Kind::Legendre:
      return legendre_p<double>(spec.ell, std::cos(theta));
    default:
      return bandlimited_kernel(spec, theta);
  }
}

KernelBoundReport kernel_bound_report(const KernelSpec& spec, const std::vector<double>& theta_grid) {
  KernelBoundReport rep;
  rep.spec = spec;
  rep.theta = theta_grid;
  rep.explicit_bound = spec.kind == KernelSpec::Kind::Kostlan;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (double th : theta_grid) {
    if (!(th > 0.0 && th <= std::numbers::pi / 2 + kDomainTolerance))
      throw DomainError("bound grid must lie in (0, pi/2]");
    const double k = std::abs(kernel_value(spec, th));
    double ref;
    if (rep.explicit_bound) {
      ref = std::exp(-th * th * spec.n / 4.0);
      const double margin = ref - k;
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.argmax_theta = th;
      }
      if (k > ref) rep.pass = false;
    } else {
      const double l = static_cast<double>(std::max(spec.ell, 1));
      switch (spec.kind) {
        case KernelSpec::Kind::Legendre:
          ref = std::pow(th, -0.5) * std::pow(l, -0.5);
          break;
        case KernelSpec::Kind::Mono:
          ref = std::pow(th, -1.5) * std::pow(l, -0.5 - spec.beta);
          break;
        default:
          ref = spec.alpha >= 1.0 ? std::pow(th, -1.5) * std::pow(l, -0.5 - spec.beta)
                                  : std::pow(th, -1.5) * std::pow(l, -1.5);
          break;
      }
    }
    const double ratio = k / ref;
    rep.ratio.push_back(ratio);
    if (!rep.explicit_bound && ratio > rep.empirical_constant) {
      rep.empirical_constant = ratio;
      rep.argmax_theta = th;
    }
  }
  if (rep.explicit_bound && !rep.pass)
    throw BoundViolation("Kostlan decay bound violated at theta=" + std::to_string(rep.argmax_theta));
  return rep;
}

double ZonalCoefficients::total_variance() const {
  CompensatedSum<double> acc;
  for (double v : c) acc.add(v * v);
  return acc.value();
}

double ZonalCoefficients::kernel(double theta) const {
  if (c.empty()) return 0.0;
  const auto p = legendre_table<double>(lmax(), std::cos(theta));
  CompensatedSum<double> acc;
  for (std::size_t k = 0; k < c.size(); ++k) acc.add(c[k] * c[k] * p[k]);
  return acc.value();
}

ZonalCoefficients ZonalCoefficients::rsh(int ell) {
  ZonalCoefficients z;
  z.c.assign(static_cast<std::size_t>(ell) + 1, 0.0);
  z.c[ell] = 1.0;
  return z;
}

ZonalCoefficients ZonalCoefficients::from_spec(const KernelSpec& spec) {
  switch (spec.kind) {
    case KernelSpec::Kind::Legendre:
      return rsh(spec.ell);
    case KernelSpec::Kind::BandLimited:
    case KernelSpec::Kind::Mono: {
      ZonalCoefficients z;
      z.c.assign(static_cast<std::size_t>(spec.ell) + 1, 0.0);
      const double cl = std::sqrt(spec.normalizing_constant_sq());
      for (int k = spec.window_low(); k <= spec.ell; ++k) z.c[k] = cl * std::sqrt(legendre_weight(k));
      return z;
    }
    case KernelSpec::Kind::Kostlan:
      break;
  }
  throw DomainError("Kostlan kernels have no finite zonal expansion in this form");
}

GaussLegendreRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("quadrature order must be >= 1");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

}  // namespace exlab

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
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "exlab/errors.hpp"

namespace exlab {

inline constexpr double kDomainTolerance = 1e-12;

template <class Scalar>
Scalar check_unit_interval(Scalar x) {
  using std::abs;
  if (!(abs(x) <= Scalar(1) + Scalar(kDomainTolerance)))
    throw DomainError("argument outside [-1,1]: " + std::to_string(static_cast<double>(x)));
  if (x > Scalar(1)) return Scalar(1);
  if (x < Scalar(-1)) return Scalar(-1);
  return x;
}

// P_l(x) by (k+1)P_{k+1} = (2k+1)xP_k - kP_{k-1}.
template <class Scalar>
Scalar legendre_p(int ell, Scalar x) {
  if (ell < 0) throw DomainError("negative degree");
  x = check_unit_interval(x);
  Scalar p0 = 1, p1 = x;
  if (ell == 0) return p0;
  for (int k = 1; k < ell; ++k) {
    const Scalar p2 = (Scalar(2 * k + 1) * x * p1 - Scalar(k) * p0) / Scalar(k + 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// P_0..P_lmax at x.
template <class Scalar>
std::vector<Scalar> legendre_table(int lmax, Scalar x) {
  x = check_unit_interval(x);
  std::vector<Scalar> p(static_cast<std::size_t>(lmax) + 1);
  p[0] = 1;
  if (lmax >= 1) p[1] = x;
  for (int k = 1; k < lmax; ++k)
    p[k + 1] = (Scalar(2 * k + 1) * x * p[k] - Scalar(k) * p[k - 1]) / Scalar(k + 1);
  return p;
}

// Jacobi P_l^{(1,0)}: (n+2)(2n+1)P_{n+1} = ((2n+3)(2n+1)x + 1)P_n - n(2n+3)P_{n-1}.
template <class Scalar>
Scalar jacobi_p10(int ell, Scalar x) {
  if (ell < 0) throw DomainError("negative degree");
  x = check_unit_interval(x);
  Scalar p0 = 1, p1 = (Scalar(3) * x + Scalar(1)) / Scalar(2);
  if (ell == 0) return p0;
  for (int n = 1; n < ell; ++n) {
    const Scalar a = Scalar(2 * n + 3) * Scalar(2 * n + 1) * x + Scalar(1);
    const Scalar p2 = (a * p1 - Scalar(n) * Scalar(2 * n + 3) * p0) / (Scalar(n + 2) * Scalar(2 * n + 1));
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// Neumaier-compensated accumulator.
template <class Scalar>
struct CompensatedSum {
  Scalar sum = 0, comp = 0;
  void add(Scalar v) {
    using std::abs;
    const Scalar t = sum + v;
    if (abs(sum) >= abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  Scalar value() const { return sum + comp; }
};

inline double legendre_weight(int ell) { return (2.0 * ell + 1.0) / (4.0 * std::numbers::pi); }

struct KernelSpec {
  enum class Kind { Kostlan, Legendre, BandLimited, Mono };
  Kind kind = Kind::Legendre;
  int n = 1;
  int ell = 0;
  double alpha = 0.0;
  double beta = 0.5;

  static KernelSpec kostlan(int n);
  static KernelSpec legendre(int ell);
  static KernelSpec bandlimited(double alpha, int ell);
  static KernelSpec mono(double beta, int ell);

  // Lowest degree of the energy window [l0, l].
  int window_low() const;
  // Window exponent: 1 for alpha < 1, beta for the monochromatic case.
  double window_exponent() const;
  // C_l^2 = 4pi / ((l+1)^2 - l0^2).
  double normalizing_constant_sq() const;
  std::string describe() const;
};

// (cos theta)^n in log space; exactly 0 at theta = pi/2.
double kostlan_kernel(int n, double theta);

struct BandlimitedKernelValue {
  double direct;
  double jacobi;
};

// Gamma_l(theta) both ways; throws ConsistencyError on disagreement; returns the Jacobi form.
double bandlimited_kernel(const KernelSpec& spec, double theta);
BandlimitedKernelValue bandlimited_kernel_both(const KernelSpec& spec, double theta);

// Covariance of any spec at angle theta.
double kernel_value(const KernelSpec& spec, double theta);

struct KernelBoundReport {
  KernelSpec spec;
  bool explicit_bound = false;   // Kostlan: e^{-theta^2 n/4} checked pointwise
  bool pass = true;
  double worst_margin = 0.0;     // min over grid of bound - |kernel| (Kostlan)
  double empirical_constant = 0; // sup |kernel| / rate (other kinds)
  double argmax_theta = 0.0;
  std::vector<double> theta;
  std::vector<double> ratio;     // |kernel|/rate or |kernel|/bound
};

KernelBoundReport kernel_bound_report(const KernelSpec& spec, const std::vector<double>& theta_grid);

// Coefficients c_{l'} of an isotropic field f = sum c_{l'}/sqrt(N_{l'}) sum_m a_{l'm} Y_{l'm}.
struct ZonalCoefficients {
  std::vector<double> c;

  int lmax() const { return static_cast<int>(c.size()) - 1; }
  double total_variance() const;
  // K(theta) = sum c^2 P_{l'}(cos theta).
  double kernel(double theta) const;

  static ZonalCoefficients rsh(int ell);
  static ZonalCoefficients from_spec(const KernelSpec& spec);
};

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point rule on [a,b].
GaussLegendreRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace exlab

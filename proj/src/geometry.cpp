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
#include "exlab/geometry.hpp"

#include <algorithm>

#include "exlab/spectral.hpp"

namespace exlab {

TangentFrame tangent_frame(const Vec3& base) {
  const Vec3 b = make_point(base);
  Vec3 e1, e2;
  if (std::abs(b.z()) < 0.9) {
    e2 = (Vec3::UnitZ() - b.z() * b).normalized();
    e1 = e2.cross(b);
  } else {
    e1 = (Vec3::UnitX() - b.x() * b).normalized();
    e2 = b.cross(e1);
  }
  return {b, e1, e2};
}

TangentFrame frame_of(const Mat3& rotation) { return {rotation.col(2), rotation.col(0), rotation.col(1)}; }

Vec3 exp_map(const TangentFrame& f, const Vec2& w) {
  const double rho = w.norm();
  if (rho > std::numbers::pi + 1e-12) throw DomainError("tangent vector longer than pi");
  if (rho == 0.0) return f.base;
  const Vec3 dir = (w.x() * f.e1 + w.y() * f.e2) / rho;
  return make_point(std::cos(rho) * f.base + std::sin(rho) * dir);
}

Vec2 log_map(const TangentFrame& f, const Vec3& x) {
  const double a = x.dot(f.e1), b = x.dot(f.e2), c = x.dot(f.base);
  const double s = std::hypot(a, b);
  if (c < 0.0 && s < 1e-12) throw GeometryError("log map undefined at the antipode");
  if (s == 0.0) return Vec2::Zero();
  const double rho = std::atan2(s, c);
  return Vec2(a, b) * (rho / s);
}

Mat3 rotation_to(const Vec3& center, double angle) {
  const TangentFrame f = tangent_frame(center);
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r.col(0) = c * f.e1 + s * f.e2;
  r.col(1) = -s * f.e1 + c * f.e2;
  r.col(2) = f.base;
  return r;
}

SphereSquare::SphereSquare(const Mat3& r, double h) : rotation(r), half_side(std::min(h, std::numbers::pi / 2)) {
  if (!(h > 0.0)) throw DomainError("square half-side must be positive");
  const double orth = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (orth > 1e-10 || std::abs(r.determinant() - 1.0) > 1e-10) throw DomainError("square frame is not a rotation");
}

double SphereSquare::area() const { return square_area(half_side); }

double square_area(double h) {
  h = std::min(h, std::numbers::pi / 2);
  // integrate over the triangle 0 <= y <= x <= h in polar form: 8 * int_0^{pi/4} int_0^{h/cos a} sin(rho) drho da
  const auto rule = gauss_legendre(64, 0.0, std::numbers::pi / 4);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rmax = h / std::cos(rule.nodes[i]);
    acc += rule.weights[i] * (1.0 - std::cos(rmax));
  }
  return 8.0 * acc;
}

double square_margin(const SphereSquare& sq, const Vec3& x) {
  const Vec2 w = log_map(sq.frame(), x);
  return sq.half_side - std::max(std::abs(w.x()), std::abs(w.y()));
}

bool square_contains(const SphereSquare& sq, const Vec3& x, double slack) { return square_margin(sq, x) >= -slack; }

Mat3 random_rotation_from_uniforms(double u1, double u2, double u3) {
  // Shoemake's uniform quaternion
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t1 = 2.0 * std::numbers::pi * u2, t2 = 2.0 * std::numbers::pi * u3;
  const Eigen::Quaterniond q(b * std::cos(t2), a * std::sin(t1), a * std::cos(t1), b * std::sin(t2));
  return q.normalized().toRotationMatrix();
}

}  // namespace exlab

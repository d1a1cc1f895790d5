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

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "exlab/errors.hpp"

namespace exlab {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Points of S^2 are unit Vec3; make_point renormalizes.
inline Vec3 make_point(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw DomainError("zero vector is not a sphere point");
  return v / n;
}

inline Vec3 north_pole() { return Vec3::UnitZ(); }

// Colatitude theta in [0,pi], longitude phi.
inline Vec3 from_spherical(double theta, double phi) {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

inline double sph_dist(const Vec3& x, const Vec3& y) { return std::atan2(x.cross(y).norm(), x.dot(y)); }

struct TangentFrame {
  Vec3 base, e1, e2;
};

TangentFrame tangent_frame(const Vec3& base);
// Frame given by the columns of a rotation: e1 = R e_x, e2 = R e_y, base = R e_z.
TangentFrame frame_of(const Mat3& rotation);

Vec3 exp_map(const TangentFrame& frame, const Vec2& w);
inline Vec3 exp_map(const Vec3& base, const Vec2& w) { return exp_map(tangent_frame(base), w); }
Vec2 log_map(const TangentFrame& frame, const Vec3& x);
inline Vec2 log_map(const Vec3& base, const Vec3& x) { return log_map(tangent_frame(base), x); }

inline double cap_area(double r) {
  if (r <= 0.0) return 0.0;
  if (r >= std::numbers::pi) return 4.0 * std::numbers::pi;
  return 2.0 * std::numbers::pi * (1.0 - std::cos(r));
}

struct SphericalCap {
  Vec3 center = north_pole();
  double radius = 0.0;

  bool contains(const Vec3& x, double slack = 1e-12) const {
    if (radius < 0.0) return false;
    if (radius > std::numbers::pi) return true;
    return sph_dist(center, x) <= radius + slack;
  }
  double area() const { return cap_area(radius); }
};

// Rotation taking the north pole to `center`, with the tangent frame turned by `angle`.
Mat3 rotation_to(const Vec3& center, double angle = 0.0);

struct SphereSquare {
  Mat3 rotation = Mat3::Identity();
  double half_side = 0.0;

  SphereSquare() = default;
  SphereSquare(const Mat3& r, double h);

  Vec3 center() const { return rotation.col(2); }
  TangentFrame frame() const { return frame_of(rotation); }
  double area() const;
};

inline SphereSquare make_square(const Vec3& center, double h, double angle = 0.0) {
  return SphereSquare(rotation_to(center, angle), h);
}

// Area of exp([-r,r]^2), with Jacobian sin|w|/|w|.
double square_area(double half_side);

bool square_contains(const SphereSquare& sq, const Vec3& x, double slack = 1e-12);
// Signed margin: half_side - max(|w1|,|w2|) in log coordinates.
double square_margin(const SphereSquare& sq, const Vec3& x);

Mat3 random_rotation_from_uniforms(double u1, double u2, double u3);

}  // namespace exlab

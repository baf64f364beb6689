// Copyright 2026 The distsample Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "distsample/rng.hpp"

namespace distsample {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 u, Vec3 v) { return {u.x + v.x, u.y + v.y, u.z + v.z}; }
  friend constexpr Vec3 operator-(Vec3 u, Vec3 v) { return {u.x - v.x, u.y - v.y, u.z - v.z}; }
  friend constexpr Vec3 operator-(Vec3 u) { return {-u.x, -u.y, -u.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(const Vec3& u, const Vec3& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

constexpr Vec3 cross(const Vec3& u, const Vec3& v) {
  return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// sgn(x) = +1 for x >= 0, -1 otherwise. Zero maps to +1 everywhere in the
/// library; every protocol tie inherits this.
constexpr int sgn(double x) { return x >= 0.0 ? 1 : -1; }

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point on the Bloch sphere S2: a measurement direction or a hidden
/// variable.
class UnitVector3 {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Requires |v| = 1 within kTolerance.
  explicit UnitVector3(const Vec3& v) : v_(v) {
    if (!is_finite(v) || std::abs(norm(v) - 1.0) > kTolerance) {
      throw GeometryError("UnitVector3: norm deviates from 1 by more than 1e-12");
    }
  }
  UnitVector3(double x, double y, double z) : UnitVector3(Vec3{x, y, z}) {}

  /// Rescales any finite nonzero vector onto the sphere.
  static UnitVector3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!is_finite(v) || !(n > 0.0)) {
      throw GeometryError("UnitVector3: cannot normalize a zero or non-finite vector");
    }
    return UnitVector3(Unchecked{}, (1.0 / n) * v);
  }

  /// Unit vector at `theta` radians from +z towards +x in the x-z plane.
  static UnitVector3 in_xz_plane(double theta) {
    return normalized({std::sin(theta), 0.0, std::cos(theta)});
  }

  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  UnitVector3 operator-() const { return UnitVector3(Unchecked{}, -v_); }
  friend bool operator==(const UnitVector3&, const UnitVector3&) = default;

 private:
  struct Unchecked {};
  UnitVector3(Unchecked, const Vec3& v) : v_(v) {}

  Vec3 v_;
};

/// A vector in the closed Bloch ball; rank-one POVM elements.
class BallVector3 {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit BallVector3(const Vec3& v) : v_(v) {
    if (!is_finite(v) || norm(v) > 1.0 + kTolerance) {
      throw GeometryError("BallVector3: vector lies outside the Bloch ball");
    }
  }
  BallVector3(double x, double y, double z) : BallVector3(Vec3{x, y, z}) {}

  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  double length() const { return norm(v_); }
  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  /// Direction of the element; throws for the zero vector.
  UnitVector3 direction() const { return UnitVector3::normalized(v_); }

  friend bool operator==(const BallVector3&, const BallVector3&) = default;

 private:
  Vec3 v_;
};

/// Raw uniforms consumed by one call of sample_uniform_sphere.
inline constexpr int kSphereDraws = 2;

/// Uniform point on S2: z ~ U[-1,1), azimuth ~ U[0,2pi). Exactly two draws.
template <UniformSource G>
UnitVector3 sample_uniform_sphere(G& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return UnitVector3::normalized({r * std::cos(phi), r * std::sin(phi), z});
}

/// Right-handed orthonormal pair (e1, e2) perpendicular to `axis`.
inline std::pair<UnitVector3, UnitVector3> orthonormal_frame(const UnitVector3& axis) {
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const UnitVector3 e1 = UnitVector3::normalized(cross(axis, helper));
  const UnitVector3 e2 = UnitVector3::normalized(cross(axis, e1));
  return {e1, e2};
}

/// Rotation by `angle` radians about `axis` (Rodrigues).
inline Vec3 rotate(const Vec3& v, const UnitVector3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const Vec3& k = axis.vec();
  return c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
}

inline UnitVector3 rotate(const UnitVector3& v, const UnitVector3& axis, double angle) {
  return UnitVector3::normalized(rotate(v.vec(), axis, angle));
}

}  // namespace distsample

#pragma once

#include <Eigen/Dense>

namespace gyroctl {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// A point on the unit sphere S².
class UnitVec3 {
 public:
  static constexpr double kTolerance = 1e-12;

  /// Throws InvalidUnitVector unless | |v| - 1 | <= kTolerance.
  explicit UnitVec3(const Vec3& v);

  /// Normalizes any finite non-zero vector.
  static UnitVec3 normalized(const Vec3& v);

  static UnitVec3 e1() { return UnitVec3(Vec3::UnitX()); }
  static UnitVec3 e2() { return UnitVec3(Vec3::UnitY()); }
  static UnitVec3 e3() { return UnitVec3(Vec3::UnitZ()); }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const UnitVec3& o) const { return v_.dot(o.v_); }

  UnitVec3 operator-() const { return UnitVec3(-v_, Unchecked{}); }

 private:
  struct Unchecked {};
  UnitVec3(const Vec3& v, Unchecked) : v_(v) {}
  Vec3 v_;
};

/// An element of SO(3) stored as a 3x3 matrix.
class Rotation {
 public:
  static constexpr double kTolerance = 1e-10;

  Rotation() : m_(Mat3::Identity()) {}

  /// Throws InvalidRotation unless |mᵀm - I|_F <= 1e-10 and |det m - 1| <= 1e-10.
  explicit Rotation(const Mat3& m);

  static Rotation identity() { return Rotation(); }

  /// Nearest rotation in the Frobenius sense (polar factor), for any
  /// matrix with positive determinant.
  static Rotation project(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }
  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Unchecked{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// Image of e₃, i.e. the third column.
  UnitVec3 axis3() const { return UnitVec3::normalized(m_.col(2)); }

  double orthogonality_error() const;

  /// Re-projects onto SO(3); used after every integrator step.
  Rotation orthonormalized() const { return project(m_); }

 private:
  struct Unchecked {};
  Rotation(const Mat3& m, Unchecked) : m_(m) {}
  friend Rotation exp_so3(const Vec3& v);
  Mat3 m_;
};

/// hat(v)·w = v × w.
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws NotSkew when |S + Sᵀ|_F > 1e-9.
Vec3 vee(const Mat3& s);

/// Rodrigues formula, with Taylor coefficients below |v| = 1e-6.
Rotation exp_so3(const Vec3& v);

/// Principal logarithm, |result| in [0, π].
Vec3 log_so3(const Rotation& r);

/// Inverse right Jacobian of SO(3): if R(t) = R0·exp(θ(t)) then
/// θ̇ = right_jacobian_inv(θ)·ω for body rate ω.
Mat3 right_jacobian_inv(const Vec3& theta);

/// Great-circle distance in [0, π].
double geodesic_angle(const UnitVec3& a, const UnitVec3& b);

inline Vec2 project_xy(const Vec3& v) { return v.head<2>(); }
inline Vec3 lift_xy(const Vec2& v) { return Vec3(v.x(), v.y(), 0.0); }

/// A rotation whose third column is `target`: the shortest rotation
/// carrying e₃ onto it (a half turn about e₁ for the antipode).
Rotation rotation_to(const UnitVec3& target);

/// Rotation by `angle` radians about e₃.
Rotation rot_z(double angle);

}  // namespace gyroctl

#include "gyroctl/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gyroctl/errors.hpp"

namespace gyroctl {

UnitVec3::UnitVec3(const Vec3& v) : v_(v) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kTolerance) {
    throw InvalidUnitVector("vector is not of unit length");
  }
}

UnitVec3 UnitVec3::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw InvalidUnitVector("cannot normalize a zero or non-finite vector");
  }
  return UnitVec3(v / n, Unchecked{});
}

Rotation::Rotation(const Mat3& m) : m_(m) {
  if (!m.allFinite() || (m.transpose() * m - Mat3::Identity()).norm() > kTolerance ||
      std::abs(m.determinant() - 1.0) > kTolerance) {
    throw InvalidRotation("matrix is not in SO(3)");
  }
}

Rotation Rotation::project(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) = -u.col(2);
  }
  return Rotation(u * v.transpose(), Unchecked{});
}

double Rotation::orthogonality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 hat(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Vec3 vee(const Mat3& s) {
  if ((s + s.transpose()).norm() > 1e-9) {
    throw NotSkew("matrix is not skew-symmetric");
  }
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

Rotation exp_so3(const Vec3& v) {
  const double theta = v.norm();
  double a;  // sin θ / θ
  double b;  // (1 - cos θ) / θ²
  if (theta < 1e-6) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    const double s = std::sin(0.5 * theta) / theta;
    b = 2.0 * s * s;
  }
  const Mat3 k = hat(v);
  return Rotation(Mat3::Identity() + a * k + b * k * k, Rotation::Unchecked{});
}

Vec3 log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double theta = std::acos(c);
  const Vec3 w(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
  if (theta < 1e-6) {
    return 0.5 * (1.0 + theta * theta / 6.0) * w;
  }
  if (std::numbers::pi - theta < 1e-6) {
    // Near a half turn: axis from the symmetric part, sign from w.
    const Mat3 sym = 0.5 * (m + Mat3::Identity());
    int col = 0;
    sym.diagonal().maxCoeff(&col);
    Vec3 axis = sym.col(col).normalized();
    if (axis.dot(w) < 0.0) {
      axis = -axis;
    }
    return theta * axis;
  }
  return theta / (2.0 * std::sin(theta)) * w;
}

Mat3 right_jacobian_inv(const Vec3& theta) {
  const double t = theta.norm();
  const Mat3 k = hat(theta);
  double c;  // coefficient of θ̂²
  if (t < 1e-4) {
    c = 1.0 / 12.0 + t * t / 720.0;
  } else {
    c = 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  }
  return Mat3::Identity() + 0.5 * k + c * k * k;
}

double geodesic_angle(const UnitVec3& a, const UnitVec3& b) {
  return std::atan2(a.vec().cross(b.vec()).norm(), a.vec().dot(b.vec()));
}

Rotation rotation_to(const UnitVec3& target) {
  const Vec3 e3 = Vec3::UnitZ();
  const Vec3 axis = e3.cross(target.vec());
  const double s = axis.norm();
  const double c = e3.dot(target.vec());
  if (s < 1e-15) {
    return c > 0.0 ? Rotation::identity() : exp_so3(std::numbers::pi * Vec3::UnitX());
  }
  return exp_so3(std::atan2(s, c) / s * axis);
}

Rotation rot_z(double angle) { return exp_so3(angle * Vec3::UnitZ()); }

}  // namespace gyroctl

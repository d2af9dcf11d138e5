#pragma once

// Forward-mode dual numbers for derivative oracles in tests. Nesting
// Dual<Dual<double>> yields exact second derivatives.

#include <Eigen/Dense>

#include "gyroctl/geom.hpp"

namespace gyroctl::testing {

template <typename T>
struct Dual {
  T v{};  // value
  T d{};  // derivative

  Dual() = default;
  Dual(double x) : v(x), d(0.0) {}  // NOLINT(google-explicit-constructor)
  Dual(T value, T deriv) : v(value), d(deriv) {}

  Dual operator+(const Dual& o) const { return {v + o.v, d + o.d}; }
  Dual operator-(const Dual& o) const { return {v - o.v, d - o.d}; }
  Dual operator*(const Dual& o) const { return {v * o.v, v * o.d + d * o.v}; }
  Dual operator-() const { return {-v, -d}; }
  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
};

using D1 = Dual<double>;
using D2 = Dual<D1>;

/// The hyper-dual time variable t = 0 with unit first derivatives in both slots.
inline D2 time_variable() { return D2(D1(0.0, 1.0), D1(1.0, 0.0)); }

inline double value(const D2& x) { return x.v.v; }
inline double first(const D2& x) { return x.v.d; }
inline double second(const D2& x) { return x.d.d; }

template <typename T>
using Vec3T = Eigen::Matrix<T, 3, 1>;
template <typename T>
using Mat3T = Eigen::Matrix<T, 3, 3>;

template <typename T>
Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
  return Vec3T<T>(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2), a(0) * b(1) - a(1) * b(0));
}

template <typename T>
Mat3T<T> skew(const Vec3T<T>& w) {
  Mat3T<T> s;
  s << T(0.0), -w(2), w(1),
       w(2), T(0.0), -w(0),
       -w(1), w(0), T(0.0);
  return s;
}

/// Second-order Taylor polynomial of the attitude along Ṙ = R·hat(ω(t)) with
/// ω(0) = w, ω̇(0) = w_dot:  R(t) = R(I + tŴ + t²/2·(Ŵ² + Ŵ̇)).
inline Mat3T<D2> attitude_along_flow(const Mat3& R, const Vec3& w, const Vec3& w_dot) {
  const D2 t = time_variable();
  const Mat3 W = hat(w);
  const Mat3 quad = W * W + hat(w_dot);
  Mat3T<D2> out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double lin = 0.0;
      double q = 0.0;
      for (int k = 0; k < 3; ++k) {
        lin += R(i, k) * W(k, j);
        q += R(i, k) * quad(k, j);
      }
      out(i, j) = D2(R(i, j)) + t * D2(lin) + D2(0.5) * t * t * D2(q);
    }
  }
  return out;
}

/// ω_d(t) = k_P·E₂(e₃ × R(t)ᵀΓ_d) evaluated in hyper-dual arithmetic.
inline Eigen::Matrix<D2, 2, 1> omega_d_along_flow(const Mat3& R, const Vec3& w, const Vec3& w_dot,
                                                  const Vec3& gamma_d, double k_P) {
  const Mat3T<D2> Rt = attitude_along_flow(R, w, w_dot);
  Vec3T<D2> b;
  for (int i = 0; i < 3; ++i) {
    b(i) = D2(0.0);
    for (int k = 0; k < 3; ++k) b(i) += Rt(k, i) * D2(gamma_d(k));
  }
  const Vec3T<D2> e3(D2(0.0), D2(0.0), D2(1.0));
  const Vec3T<D2> c = cross<D2>(e3, b);
  return Eigen::Matrix<D2, 2, 1>(D2(k_P) * c(0), D2(k_P) * c(1));
}

/// First and second time derivative of ω_d along the flow.
struct OmegaDDerivs {
  Vec2 value;
  Vec2 first;
  Vec2 second;
};

inline OmegaDDerivs omega_d_derivs(const Mat3& R, const Vec3& w, const Vec3& w_dot, const Vec3& gamma_d,
                                   double k_P) {
  const auto wd = omega_d_along_flow(R, w, w_dot, gamma_d, k_P);
  OmegaDDerivs out;
  for (int i = 0; i < 2; ++i) {
    out.value(i) = value(wd(i));
    out.first(i) = first(wd(i));
    out.second(i) = second(wd(i));
  }
  return out;
}

}  // namespace gyroctl::testing

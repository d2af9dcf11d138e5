#include "gyroctl/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gyroctl/errors.hpp"

namespace gyroctl {

void BodyParams::validate() const {
  if (!(J_sym > 0.0)) throw ValidationError("BodyParams: J_sym > 0 violated");
  if (!(J_zz > 0.0)) throw ValidationError("BodyParams: J_zz > 0 violated");
  if (!(tau_m > 0.0)) throw ValidationError("BodyParams: tau_m > 0 violated");
  if (!std::isfinite(r_bar)) throw ValidationError("BodyParams: r_bar must be finite");
}

Mat2 gyro_matrix(double k) {
  Mat2 a;
  a << 0.0, -k,
       k, 0.0;
  return a;
}

Vec2 body_rates_deriv(const Vec2& omega, const Vec2& u, const GyroCoeffs& c) {
  return gyro_matrix(c.k) * omega + u;
}

Vec2 nonspin_rates_deriv(const Vec2& omega_bar, const Vec2& u_bar, const GyroCoeffs& c) {
  return gyro_matrix(c.k_bar) * omega_bar + u_bar;
}

namespace {

Vec3 euler_rhs(const Vec3& w, const Vec3& M2, const Vec3& J) {
  const Vec3 Jw = J.cwiseProduct(w);
  return (M2 - w.cross(Jw)).cwiseQuotient(J);
}

// Coefficients of the implicit LGVI equation and its Jacobian, as functions
// of θ = |f|:  a = sinθ/θ,  b = (1-cosθ)/θ²,  c1 = a'(θ)/θ,  c2 = b'(θ)/θ.
struct LgviCoeffs {
  double a, b, c1, c2;
};

LgviCoeffs lgvi_coeffs(double t) {
  const double t2 = t * t;
  LgviCoeffs c{};
  if (t < 1e-2) {
    c.a = 1.0 - t2 / 6.0 * (1.0 - t2 / 20.0);
    c.b = 0.5 - t2 / 24.0 * (1.0 - t2 / 30.0);
    c.c1 = -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0;
    c.c2 = -1.0 / 12.0 + t2 / 180.0 - t2 * t2 / 6720.0;
    if (t < 1e-4) return c;
  }
  const double s = std::sin(t);
  const double co = std::cos(t);
  const double sh = std::sin(0.5 * t);
  c.a = s / t;
  c.b = 2.0 * sh * sh / t2;
  if (t >= 1e-2) {
    c.c1 = (t * co - s) / (t2 * t);
    c.c2 = (t * s - 4.0 * sh * sh) / (t2 * t2);
  }
  return c;
}

// Solves a(θ)·Jf + b(θ)·(f × Jf) = g for f.
Vec3 solve_group_element(const Vec3& g, const Vec3& J, const StepOptions& opts) {
  const double gnorm = g.norm();
  if (gnorm == 0.0) return Vec3::Zero();
  const Mat3 Jm = J.asDiagonal();
  Vec3 f = g.cwiseQuotient(J);
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double t = f.norm();
    const LgviCoeffs c = lgvi_coeffs(t);
    const Vec3 Jf = J.cwiseProduct(f);
    const Vec3 fxJf = f.cross(Jf);
    const Vec3 G = c.a * Jf + c.b * fxJf - g;
    res = G.norm();
    if (res <= opts.tolerance * gnorm) return f;
    const Mat3 dG = c.c1 * Jf * f.transpose() + c.a * Jm + c.c2 * fxJf * f.transpose() +
                    c.b * (hat(f) * Jm - hat(Jf));
    const Vec3 df = dG.partialPivLu().solve(G);
    f -= df;
    if (df.norm() <= 4.0 * std::numeric_limits<double>::epsilon() * f.norm()) return f;
  }
  // Residual floor set by rounding in G itself.
  if (res <= 1e-12 * gnorm) return f;
  throw NoConvergence("LGVI group-element solve: residual " + std::to_string(res / gnorm) +
                      " after " + std::to_string(opts.max_iterations) + " iterations");
}

RigidState step_lgvi(const RigidState& s, const Vec3& M2, double h, const BodyParams& p,
                     const StepOptions& opts) {
  const Vec3 J(p.J_sym, p.J_sym, p.J_zz);
  const Vec3 Pi = J.cwiseProduct(s.omega2);
  const Vec3 f = solve_group_element(h * Pi + 0.5 * h * h * M2, J, opts);
  const Rotation F = exp_so3(f);
  const Vec3 Pi_next = F.matrix().transpose() * (Pi + 0.5 * h * M2) + 0.5 * h * M2;
  return {(s.R2 * F).orthonormalized(), Pi_next.cwiseQuotient(J)};
}

RigidState step_rk4_exp(const RigidState& s, const Vec3& M2, double h, const BodyParams& p) {
  const Vec3 J(p.J_sym, p.J_sym, p.J_zz);
  // Stage k: θ_k on the algebra, ω_k the rate; K = dexp⁻¹ map, L = ω̇.
  const Vec3& w1 = s.omega2;
  const Vec3 L1 = euler_rhs(w1, M2, J);
  const Vec3 K1 = w1;

  const Vec3 th2 = 0.5 * h * K1;
  const Vec3 w2 = w1 + 0.5 * h * L1;
  const Vec3 L2 = euler_rhs(w2, M2, J);
  const Vec3 K2 = right_jacobian_inv(th2) * w2;

  const Vec3 th3 = 0.5 * h * K2;
  const Vec3 w3 = w1 + 0.5 * h * L2;
  const Vec3 L3 = euler_rhs(w3, M2, J);
  const Vec3 K3 = right_jacobian_inv(th3) * w3;

  const Vec3 th4 = h * K3;
  const Vec3 w4 = w1 + h * L3;
  const Vec3 L4 = euler_rhs(w4, M2, J);
  const Vec3 K4 = right_jacobian_inv(th4) * w4;

  const Vec3 theta = h / 6.0 * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
  const Vec3 w_next = w1 + h / 6.0 * (L1 + 2.0 * L2 + 2.0 * L3 + L4);
  return {(s.R2 * exp_so3(theta)).orthonormalized(), w_next};
}

}  // namespace

RigidDeriv euler_deriv(const RigidState& s, const Vec3& M2, const BodyParams& p) {
  return {s.omega2, euler_rhs(s.omega2, M2, Vec3(p.J_sym, p.J_sym, p.J_zz))};
}

Vec2 motor_deriv(const Vec2& u, const Vec2& v_cmd, double tau_m) {
  return -(u - v_cmd) / tau_m;
}

Vec2 motor_advance(const Vec2& u, const Vec2& v_cmd, double tau_m, double h) {
  return v_cmd + (u - v_cmd) * std::exp(-h / tau_m);
}

Vec2 motor_mean(const Vec2& u, const Vec2& v_cmd, double tau_m, double h) {
  // (1 - e^{-x})/x without cancellation for small x.
  const double x = h / tau_m;
  const double frac = x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
  return v_cmd + (u - v_cmd) * frac;
}

RigidState step(const RigidState& s, const Vec3& M2, double h, const BodyParams& p,
                const StepOptions& opts) {
  if (!(h > 0.0 && h <= 1e-2)) {
    throw ValidationError("step size must satisfy 0 < h <= 1e-2, got " + std::to_string(h));
  }
  switch (opts.integrator) {
    case Integrator::lgvi:
      return step_lgvi(s, M2, h, p, opts);
    case Integrator::rk4_exp:
      return step_rk4_exp(s, M2, h, p);
  }
  return s;
}

double kinetic_energy(const RigidState& s, const BodyParams& p) {
  const Vec3 J(p.J_sym, p.J_sym, p.J_zz);
  return 0.5 * s.omega2.dot(J.cwiseProduct(s.omega2));
}

double angular_momentum_norm(const RigidState& s, const BodyParams& p) {
  return Vec3(p.J_sym, p.J_sym, p.J_zz).cwiseProduct(s.omega2).norm();
}

}  // namespace gyroctl

#pragma once

#include <numbers>

#include "gyroctl/geom.hpp"

namespace gyroctl {

/// Axis-symmetric body: J₂ = diag(J_sym, J_sym, J_zz), steady spin r̄ about
/// the body z axis, first-order torque actuators with time constant tau_m.
/// Defaults describe a small spinning tricopter; r̄ defaults to 1500 deg/s.
struct BodyParams {
  double J_sym = 1.55e-2;  // kg·m²
  double J_zz = 2.76e-2;   // kg·m²
  double r_bar = 1500.0 * std::numbers::pi / 180.0;  // rad/s
  double tau_m = 0.0846;   // s

  /// Throws ValidationError naming the violated invariant.
  void validate() const;
  Mat3 inertia() const { return Vec3(J_sym, J_sym, J_zz).asDiagonal(); }
};

/// Gyroscopic frequencies of the body frame (k) and the non-spinning frame (k̄).
struct GyroCoeffs {
  double k = 0.0;
  double k_bar = 0.0;

  static GyroCoeffs from(const BodyParams& p) {
    return {(p.J_zz - p.J_sym) * p.r_bar / p.J_sym, p.J_zz / p.J_sym * p.r_bar};
  }
};

struct RigidState {
  Rotation R2;  // body to inertial
  Vec3 omega2 = Vec3::Zero();  // body angular velocity in F₂, rad/s
};

/// Planar body rates, realized specific torque and its observer estimate.
struct CtlState {
  Vec2 omega = Vec2::Zero();
  Vec2 u = Vec2::Zero();
  Vec2 u_hat = Vec2::Zero();
};

/// [[0, -k], [k, 0]]
Mat2 gyro_matrix(double k);

/// ω̇ = A_skw·ω + u in the spinning body frame.
Vec2 body_rates_deriv(const Vec2& omega, const Vec2& u, const GyroCoeffs& c);

/// ω̄̇ = Ā_sk·ω̄ + ū in the non-spinning frame.
Vec2 nonspin_rates_deriv(const Vec2& omega_bar, const Vec2& u_bar, const GyroCoeffs& c);

struct RigidDeriv {
  Vec3 body_rate;   // Ṙ₂ = R₂·hat(body_rate)
  Vec3 omega2_dot;  // from Euler's equation
};

/// Euler's equation J₂ω̇₂ + ω₂ × J₂ω₂ = M₂ with the attitude kinematics.
RigidDeriv euler_deriv(const RigidState& s, const Vec3& M2, const BodyParams& p);

/// First-order actuator: u̇ = -(u - v)/tau_m.
Vec2 motor_deriv(const Vec2& u, const Vec2& v_cmd, double tau_m);

/// Exact solution of the actuator ODE after `h` seconds of constant command.
Vec2 motor_advance(const Vec2& u, const Vec2& v_cmd, double tau_m, double h);

/// Mean realized torque over the same interval, (1/h)∫u dt.
Vec2 motor_mean(const Vec2& u, const Vec2& v_cmd, double tau_m, double h);

enum class Integrator {
  lgvi,     // discrete Euler–Poincaré update with a Newton solve for F ∈ SO(3)
  rk4_exp,  // Munthe-Kaas RK4 on so(3) with exponential reconstruction
};

struct StepOptions {
  Integrator integrator = Integrator::lgvi;
  int max_iterations = 30;
  double tolerance = 1e-15;  // on the Newton residual, relative to |hΠ|
};

/// Advances the rigid body by h seconds under a body torque held constant
/// over the step. The attitude is updated by right multiplication with a
/// group element and re-projected onto SO(3) afterwards.
/// Requires 0 < h <= 1e-2; throws NoConvergence if the Newton solve stalls.
RigidState step(const RigidState& s, const Vec3& M2, double h, const BodyParams& p,
                const StepOptions& opts = {});

double kinetic_energy(const RigidState& s, const BodyParams& p);
double angular_momentum_norm(const RigidState& s, const BodyParams& p);

}  // namespace gyroctl

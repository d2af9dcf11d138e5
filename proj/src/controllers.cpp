#include "gyroctl/controllers.hpp"

#include <string>

#include "gyroctl/errors.hpp"

namespace gyroctl {

std::string_view to_string(Law law) {
  switch (law) {
    case Law::conventional: return "conventional";
    case Law::sp: return "sp";
    case Law::sp_motor: return "sp_motor";
    case Law::sp_motor_observer: return "sp_motor_observer";
  }
  return "?";
}

Law law_from_string(std::string_view name) {
  for (Law l : {Law::conventional, Law::sp, Law::sp_motor, Law::sp_motor_observer}) {
    if (name == to_string(l)) return l;
  }
  throw ValidationError("unknown control law '" + std::string(name) +
                        "' (expected conventional, sp, sp_motor or sp_motor_observer)");
}

std::string_view to_string(RateReading r) {
  return r == RateReading::body_rate ? "body_rate" : "planar_lift";
}

RateReading rate_reading_from_string(std::string_view name) {
  if (name == "body_rate") return RateReading::body_rate;
  if (name == "planar_lift") return RateReading::planar_lift;
  throw ValidationError("unknown rate reading '" + std::string(name) +
                        "' (expected body_rate or planar_lift)");
}

CtlMatrices CtlMatrices::make(const Gains& g, double k, double tau_m) {
  CtlMatrices m;
  m.A_skw = gyro_matrix(k);
  m.A_sym = g.k_D * Mat2::Identity();
  m.A = m.A_skw - m.A_sym;
  m.A_m = (-1.0 / tau_m) * Mat2::Identity();
  return m;
}

namespace {

// b = R₂ᵀΓ_d, the desired spin axis seen from the body.
Vec3 body_target(const Rotation& R2, const RefAttitude& ref) {
  return R2.matrix().transpose() * ref.Gamma_d().vec();
}

Vec2 sp_torque(const Vec2& omega, const Vec2& wd, const Vec2& wd_dot, const CtlMatrices& m) {
  return -m.A_sym * omega - m.A * wd + wd_dot;
}

// v = u_d - A_m⁻¹·u̇_d for a given planar angular acceleration and ω̈_d.
Vec2 compensated_command(const AttitudeInputs& att, const Vec2& omega_dot, const Vec2& wd_ddot,
                         const RefAttitude& ref, const Gains& g, const CtlMatrices& m) {
  const Vec2 omega = project_xy(att.omega2);
  const Vec2 wd = omega_d(att.R2, ref, g.k_P);
  const Vec2 wd_dot = omega_d_dot(att.R2, att.omega2, ref, g.k_P);
  const Vec2 u_d = sp_torque(omega, wd, wd_dot, m);
  const Vec2 u_d_dot = -m.A_sym * omega_dot - m.A * wd_dot + wd_ddot;
  return u_d - m.A_m.inverse() * u_d_dot;
}

}  // namespace

Vec2 omega_d(const Rotation& R2, const RefAttitude& ref, double k_P) {
  return k_P * project_xy(Vec3::UnitZ().cross(body_target(R2, ref)));
}

Vec2 omega_d_dot(const Rotation& R2, const Vec3& omega2, const RefAttitude& ref, double k_P) {
  const Vec3 b = body_target(R2, ref);
  return k_P * project_xy(Vec3::UnitZ().cross(b.cross(omega2)));
}

Vec2 omega_d_ddot(const Rotation& R2, const Vec3& omega2, const Vec3& omega2_dot,
                  const RefAttitude& ref, double k_P) {
  const Vec3 b = body_target(R2, ref);
  const Vec3 inner = omega2.cross(omega2.cross(b)) + b.cross(omega2_dot);
  return k_P * project_xy(Vec3::UnitZ().cross(inner));
}

Vec2 control_conventional(const Vec2& omega, const Vec2& omega_d, const Gains& g) {
  // The unit-gain ω_d term is added to a torque as written in the law.
  return -g.k_D * omega + omega_d;
}

Vec2 control_sp(const Vec2& omega, const Vec2& omega_d, const Vec2& omega_d_dot,
                const CtlMatrices& m) {
  return sp_torque(omega, omega_d, omega_d_dot, m);
}

Vec2 control_sp_motor(const AttitudeInputs& att, const Vec3& omega2_dot, const RefAttitude& ref,
                      const Gains& g, const CtlMatrices& m) {
  const Vec2 wd_ddot = omega_d_ddot(att.R2, att.omega2, omega2_dot, ref, g.k_P);
  return compensated_command(att, project_xy(omega2_dot), wd_ddot, ref, g, m);
}

Vec2 observer_update(const Vec2& u_hat, const Vec2& v_cmd, double tau_m, double h) {
  return motor_advance(u_hat, v_cmd, tau_m, h);
}

Vec2 control_sp_observer(const CtlState& state, const AttitudeInputs& att, const RefAttitude& ref,
                         const Gains& g, const CtlMatrices& m, RateReading reading) {
  const Vec2 omega = project_xy(att.omega2);
  const Vec2 omega_dot_est = m.A_skw * omega + state.u_hat;
  const Vec3 rate = reading == RateReading::body_rate ? att.omega2 : lift_xy(omega);
  const Vec2 wd_ddot = omega_d_ddot(att.R2, rate, lift_xy(omega_dot_est), ref, g.k_P);
  return compensated_command(att, omega_dot_est, wd_ddot, ref, g, m);
}

Eigen::MatrixXd lyapunov_bound_matrix(Law law, const Gains& g, double tau_m) {
  Eigen::MatrixXd q;
  switch (law) {
    case Law::conventional:
      q.resize(1, 1);
      q << -g.k_D;
      break;
    case Law::sp:
      q.resize(2, 2);
      q << -1.0, 0.5,
           0.5, -g.k_D;
      break;
    case Law::sp_motor:
    case Law::sp_motor_observer:
      q.resize(3, 3);
      q << -1.0, 0.5, 0.0,
           0.5, -g.k_D, 0.5,
           0.0, 0.5, -1.0 / tau_m;
      break;
  }
  return q;
}

GainCheck gain_check(Law law, const Gains& g, double tau_m) {
  GainCheck out;
  double threshold = 0.0;
  switch (law) {
    case Law::conventional: threshold = 0.0; break;
    case Law::sp: threshold = 0.25; break;
    case Law::sp_motor:
    case Law::sp_motor_observer: threshold = (1.0 + tau_m) / 4.0; break;
  }
  out.margin = g.k_D - threshold;
  out.pass = g.k_P > 0.0 && g.k_D > threshold;
  const Eigen::MatrixXd neg_q = -lyapunov_bound_matrix(law, g, tau_m);
  for (Eigen::Index n = 1; n <= neg_q.rows(); ++n) {
    out.minors.push_back(neg_q.topLeftCorner(n, n).determinant());
  }
  return out;
}

}  // namespace gyroctl

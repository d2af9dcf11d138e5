#include "gyroctl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gyroctl/errors.hpp"

namespace gyroctl {

double error_psi(const UnitVec3& Gamma, const UnitVec3& Gamma_d) { return 1.0 - Gamma_d.dot(Gamma); }

double lyapunov_value(Law law, const ErrorCoords& e, const Gains& g) {
  const double base = g.k_P * e.psi;
  switch (law) {
    case Law::conventional:
      return base + 0.5 * e.omega.squaredNorm();
    case Law::sp:
      return base + 0.5 * (e.omega - e.omega_d).squaredNorm();
    case Law::sp_motor:
    case Law::sp_motor_observer:
      return base + 0.5 * (e.omega - e.omega_d).squaredNorm() + 0.5 * e.u_e.squaredNorm();
  }
  return base;
}

Mat2 proportional_block(const Rotation& R_eq, const RefAttitude& ref, double k_P) {
  const Vec3 b = R_eq.matrix().transpose() * ref.Gamma_d().vec();
  const Mat3 full = k_P * hat(Vec3::UnitZ()) * hat(b);
  return full.topLeftCorner<2, 2>();
}

Rotation equilibrium_rotation(const UnitVec3& Gamma_eq, const RefAttitude& ref) {
  constexpr double tol = 1e-9;
  if ((Gamma_eq.vec() - ref.Gamma_d().vec()).norm() <= tol) return ref.R_d();
  if ((Gamma_eq.vec() + ref.Gamma_d().vec()).norm() <= tol) {
    return ref.R_d() * exp_so3(std::numbers::pi * Vec3::UnitX());
  }
  throw InvalidEquilibrium("closed-loop equilibria are only +Gamma_d and -Gamma_d");
}

namespace {

bool compensating(Law law) { return law == Law::sp_motor || law == Law::sp_motor_observer; }

}  // namespace

LinMatrix linearize(const LinProblem& prob, const UnitVec3& Gamma_eq) {
  const Rotation R_eq = equilibrium_rotation(Gamma_eq, prob.ref);
  const Mat2 P = proportional_block(R_eq, prob.ref, prob.gains.k_P);
  const CtlMatrices m = CtlMatrices::make(prob.gains, prob.body);
  const Mat2 I = Mat2::Identity();
  const Mat2 Z = Mat2::Zero();

  LinMatrix out;
  if (compensating(prob.law)) {
    out.S.resize(6, 6);
    out.S << P, I, Z,
             Z, m.A, I,
             Z, Z, m.A_m;
    out.labels = {"eta_x", "eta_y", "zeta_e_x", "zeta_e_y", "w_e_x", "w_e_y"};
    return out;
  }
  out.S.resize(4, 4);
  if (prob.law == Law::sp) {
    out.S << Z, I,
             -m.A * P, m.A + P;
  } else {
    out.S << Z, I,
             P, m.A;
  }
  out.labels = {"eta_x", "eta_y", "zeta_x", "zeta_y"};
  return out;
}

namespace {

// Closed loop of the reduced model Ṙ = R·hat(lift(ω)), ω̇ = A_skw·ω + u
// (and u̇ = A_m(u - v) for the compensating laws), written in the chart
// R = R_eq·exp(hat(η̄)).
Eigen::VectorXd closed_loop_field(const LinProblem& prob, const Rotation& R_eq,
                                  const Eigen::VectorXd& x) {
  const Gains& g = prob.gains;
  const CtlMatrices m = CtlMatrices::make(g, prob.body);
  const Vec3 eta = lift_xy(x.segment<2>(0));
  const Rotation R = R_eq * exp_so3(eta);

  auto eta_rate = [&](const Vec2& omega) -> Vec2 {
    return project_xy(right_jacobian_inv(eta) * lift_xy(omega));
  };

  Eigen::VectorXd dx(x.size());
  if (!compensating(prob.law)) {
    const Vec2 omega = x.segment<2>(2);
    const Vec2 wd = omega_d(R, prob.ref, g.k_P);
    const Vec2 u = prob.law == Law::sp
                       ? control_sp(omega, wd, omega_d_dot(R, lift_xy(omega), prob.ref, g.k_P), m)
                       : control_conventional(omega, wd, g);
    dx.segment<2>(0) = eta_rate(omega);
    dx.segment<2>(2) = m.A_skw * omega + u;
    return dx;
  }

  // (η, ω_e, u_e) -> (R, ω, u)
  const Vec2 wd = omega_d(R, prob.ref, g.k_P);
  const Vec2 omega = x.segment<2>(2) + wd;
  const Vec3 omega3 = lift_xy(omega);
  const Vec2 wd_dot = omega_d_dot(R, omega3, prob.ref, g.k_P);
  const Vec2 u_d = control_sp(omega, wd, wd_dot, m);
  const Vec2 u = x.segment<2>(4) + u_d;

  const Vec2 omega_dot = m.A_skw * omega + u;
  const AttitudeInputs att{R, omega3};
  const Vec2 v = control_sp_motor(att, lift_xy(omega_dot), prob.ref, g, m);
  const Vec2 u_dot = m.A_m * (u - v);
  const Vec2 wd_ddot = omega_d_ddot(R, omega3, lift_xy(omega_dot), prob.ref, g.k_P);
  const Vec2 u_d_dot = -m.A_sym * omega_dot - m.A * wd_dot + wd_ddot;

  dx.segment<2>(0) = eta_rate(omega);
  dx.segment<2>(2) = omega_dot - wd_dot;
  dx.segment<2>(4) = u_dot - u_d_dot;
  return dx;
}

}  // namespace

Eigen::MatrixXd finite_diff_jacobian(const LinProblem& prob, const UnitVec3& Gamma_eq, double eps) {
  if (!(eps >= 1e-8 && eps <= 1e-4)) {
    throw std::invalid_argument("finite_diff_jacobian: eps must lie in [1e-8, 1e-4]");
  }
  const Rotation R_eq = equilibrium_rotation(Gamma_eq, prob.ref);
  const int n = compensating(prob.law) ? 6 : 4;
  Eigen::MatrixXd jac(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd xp = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd xm = Eigen::VectorXd::Zero(n);
    xp(j) = eps;
    xm(j) = -eps;
    jac.col(j) = (closed_loop_field(prob, R_eq, xp) - closed_loop_field(prob, R_eq, xm)) / (2.0 * eps);
  }
  return jac;
}

Spectrum hurwitz(const Eigen::MatrixXd& S) {
  Spectrum out;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(S, /*computeEigenvectors=*/false);
  const auto& ev = solver.eigenvalues();
  out.abscissa = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    out.eigenvalues.push_back(ev(i));
    out.abscissa = std::max(out.abscissa, ev(i).real());
  }
  out.is_hurwitz = out.abscissa < -1e-9;
  return out;
}

PhasePortrait phase_portrait(double k_bar, double k_D, const Vec2& u_bar,
                             const std::vector<Vec2>& ic_grid, const PortraitOptions& opts) {
  if (k_D < 0.0) throw std::invalid_argument("phase_portrait: k_D must be non-negative");
  if (k_D == 0.0 && u_bar.squaredNorm() > 0.0) {
    throw SingularSystem("undamped gyroscope under constant torque has no steady state");
  }
  PhasePortrait pp;
  pp.k_bar = k_bar;
  pp.k_D = k_D;
  pp.u_bar = u_bar;
  pp.initial_conditions = ic_grid;

  if (k_D > 0.0) {
    pp.omega_ss = (k_D * Mat2::Identity() - gyro_matrix(k_bar)).partialPivLu().solve(u_bar);
  }
  if (u_bar.squaredNorm() > 0.0) {
    const double cross = u_bar.x() * pp.omega_ss.y() - u_bar.y() * pp.omega_ss.x();
    pp.lag_rad = std::atan2(std::abs(cross), u_bar.dot(pp.omega_ss));
  }

  const int steps = static_cast<int>(std::llround(opts.duration / opts.dt));
  const int stride = std::max(1, opts.stride);
  for (int i = 0; i <= steps; i += stride) pp.times.push_back(i * opts.dt);

  // Exact propagator of the linear system over one step: a damped rotation about ω_ss.
  const Mat2 phi = std::exp(-k_D * opts.dt) * Eigen::Rotation2Dd(k_bar * opts.dt).toRotationMatrix();
  for (const Vec2& ic : ic_grid) {
    std::vector<Vec2> traj;
    traj.reserve(pp.times.size());
    Vec2 d = ic - pp.omega_ss;
    for (int i = 0; i <= steps; ++i) {
      if (i % stride == 0) traj.push_back(i == 0 ? ic : Vec2(pp.omega_ss + d));
      d = phi * d;
    }
    pp.trajectories.push_back(std::move(traj));
  }
  return pp;
}

std::vector<Vec2> square_grid(int n, double half_width) {
  std::vector<Vec2> out;
  if (n <= 0) return out;
  if (n == 1) return {Vec2::Zero()};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.emplace_back(-half_width + 2.0 * half_width * i / (n - 1),
                       -half_width + 2.0 * half_width * j / (n - 1));
    }
  }
  return out;
}

TrajMetrics traj_metrics(const std::vector<UnitVec3>& gamma, double dt, const UnitVec3& Gamma_d,
                         double settle_threshold_deg) {
  if (gamma.empty()) throw std::invalid_argument("traj_metrics: empty series");
  constexpr double deg = 180.0 / std::numbers::pi;
  TrajMetrics m;
  m.final_error_deg = geodesic_angle(gamma.back(), Gamma_d) * deg;
  m.geodesic_rad = geodesic_angle(gamma.front(), Gamma_d);

  // Walk backwards to find where the error last rose above the threshold.
  std::optional<std::size_t> settled_from;
  for (std::size_t i = gamma.size(); i-- > 0;) {
    if (geodesic_angle(gamma[i], Gamma_d) * deg >= settle_threshold_deg) break;
    settled_from = i;
  }
  if (settled_from) m.settle_time_s = static_cast<double>(*settled_from) * dt;

  for (std::size_t i = 1; i < gamma.size(); ++i) {
    m.path_length_rad += geodesic_angle(gamma[i - 1], gamma[i]);
  }
  // Net progress toward Γ_d per unit arc; equals geodesic/path for a converged run.
  const double progress = std::max(0.0, m.geodesic_rad - geodesic_angle(gamma.back(), Gamma_d));
  m.efficiency = m.path_length_rad > 0.0 ? std::min(1.0, progress / m.path_length_rad) : 1.0;
  return m;
}

}  // namespace gyroctl

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "gyroctl/controllers.hpp"
#include "gyroctl/dynamics.hpp"
#include "gyroctl/geom.hpp"

namespace gyroctl {

/// Ψ = 1 - Γ_dᵀΓ, in [0, 2].
double error_psi(const UnitVec3& Gamma, const UnitVec3& Gamma_d);

/// Error coordinates from which every law's Lyapunov candidate is built.
struct ErrorCoords {
  double psi = 0.0;
  Vec2 omega = Vec2::Zero();
  Vec2 omega_d = Vec2::Zero();
  Vec2 u_e = Vec2::Zero();  // u - u_d, used by the compensating laws only
};

/// conventional: k_PΨ + ½|ω|²;  sp: k_PΨ + ½|ω_e|²;
/// sp_motor(_observer): k_PΨ + ½|ω_e|² + ½|u_e|².
double lyapunov_value(Law law, const ErrorCoords& e, const Gains& g);

/// Linearization about an equilibrium, in the (η, ζ) or (η, ζ_e, w_e) coordinates.
struct LinMatrix {
  Eigen::MatrixXd S;
  std::vector<std::string> labels;  // one per coordinate
};

/// Everything that fixes a closed loop for linearization.
struct LinProblem {
  Law law = Law::sp;
  RefAttitude ref = RefAttitude(Rotation::identity());
  Gains gains;
  BodyParams body;
};

/// k_P·E₂ ê₃ (R_eqᵀR_d e₃)^ E₂ᵀ.
Mat2 proportional_block(const Rotation& R_eq, const RefAttitude& ref, double k_P);

/// R_d at Γ_d, R_d·exp(π e₁) at -Γ_d; throws InvalidEquilibrium otherwise.
Rotation equilibrium_rotation(const UnitVec3& Gamma_eq, const RefAttitude& ref);

/// S₁ (sp), S₂ (conventional) or S₃ (compensating laws) assembled from P, A, A_m.
LinMatrix linearize(const LinProblem& prob, const UnitVec3& Gamma_eq);

/// Central-difference Jacobian of the nonlinear closed loop in the same
/// coordinates, with attitude perturbations R_eq·exp(hat(η̄)).
/// Requires eps in [1e-8, 1e-4].
Eigen::MatrixXd finite_diff_jacobian(const LinProblem& prob, const UnitVec3& Gamma_eq, double eps);

struct Spectrum {
  bool is_hurwitz = false;
  double abscissa = 0.0;  // max real part
  std::vector<std::complex<double>> eigenvalues;
};

/// Hurwitz iff every eigenvalue has real part < -1e-9.
Spectrum hurwitz(const Eigen::MatrixXd& S);
inline Spectrum hurwitz(const LinMatrix& L) { return hurwitz(L.S); }

struct PortraitOptions {
  double duration = 5.0;  // s
  double dt = 1e-3;       // propagation step, s
  int stride = 10;        // keep every stride-th sample
};

struct PhasePortrait {
  double k_bar = 0.0;
  double k_D = 0.0;
  Vec2 u_bar = Vec2::Zero();
  std::vector<double> times;
  std::vector<Vec2> initial_conditions;
  std::vector<std::vector<Vec2>> trajectories;
  Vec2 omega_ss = Vec2::Zero();
  std::optional<double> lag_rad;  // angle from ū to ω_ss; empty when ū = 0
};

/// Integrates ω̄̇ = Ā_sk·ω̄ - k_D·ω̄ + ū from each initial condition.
/// Throws SingularSystem when k_D = 0 and ū ≠ 0.
PhasePortrait phase_portrait(double k_bar, double k_D, const Vec2& u_bar,
                             const std::vector<Vec2>& ic_grid, const PortraitOptions& opts = {});

/// n×n grid of initial conditions on [-half_width, half_width]².
std::vector<Vec2> square_grid(int n, double half_width);

struct TrajMetrics {
  double final_error_deg = 0.0;
  std::optional<double> settle_time_s;  // empty: never settled
  double path_length_rad = 0.0;
  double geodesic_rad = 0.0;
  double efficiency = 1.0;  // (geodesic - final error) / path length; 1 for a zero-length path
};

/// Metrics of a uniformly sampled spin-axis history. Requires a non-empty series.
TrajMetrics traj_metrics(const std::vector<UnitVec3>& gamma, double dt, const UnitVec3& Gamma_d,
                         double settle_threshold_deg = 1.0);

}  // namespace gyroctl

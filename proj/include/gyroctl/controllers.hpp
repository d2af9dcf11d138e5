#pragma once

#include <string_view>
#include <vector>

#include "gyroctl/dynamics.hpp"
#include "gyroctl/geom.hpp"

namespace gyroctl {

/// Reduced-attitude control laws.
enum class Law {
  conventional,       // u = -A_sym ω + ω_d
  sp,                 // structure preserving: u = -A_sym ω - A ω_d + ω̇_d
  sp_motor,           // SP with actuator-lag compensation, exact ω̇
  sp_motor_observer,  // SP with actuator-lag compensation, ω̇ from a torque observer
};

std::string_view to_string(Law law);
/// Throws ValidationError for unknown names.
Law law_from_string(std::string_view name);

struct Gains {
  double k_P = 2.0;   // 1/s
  double k_D = 12.0;  // 1/s
};

/// Matrices of the closed loop for one (gains, body) pair.
struct CtlMatrices {
  Mat2 A_skw;  // gyroscopic coupling
  Mat2 A_sym;  // diag(k_D, k_D)
  Mat2 A;      // A_skw - A_sym
  Mat2 A_m;    // diag(-1/tau_m, -1/tau_m)

  static CtlMatrices make(const Gains& g, double k, double tau_m);
  static CtlMatrices make(const Gains& g, const BodyParams& p) {
    return make(g, GyroCoeffs::from(p).k, p.tau_m);
  }
};

/// Desired attitude. Only Γ_d = R_d·e₃ affects any control law.
class RefAttitude {
 public:
  explicit RefAttitude(const Rotation& R_d) : R_d_(R_d), Gamma_d_(R_d.axis3()) {}
  static RefAttitude toward(const UnitVec3& Gamma_d) { return RefAttitude(rotation_to(Gamma_d)); }

  const Rotation& R_d() const { return R_d_; }
  const UnitVec3& Gamma_d() const { return Gamma_d_; }

 private:
  Rotation R_d_;
  UnitVec3 Gamma_d_;
};

/// ω_d = k_P·E₂(e₃ × R₂ᵀΓ_d), the body-frame projection of k_P·Γ × Γ_d.
Vec2 omega_d(const Rotation& R2, const RefAttitude& ref, double k_P);

/// Time derivative of ω_d along Ṙ₂ = R₂·hat(ω₂); ω₂ includes the spin.
Vec2 omega_d_dot(const Rotation& R2, const Vec3& omega2, const RefAttitude& ref, double k_P);

/// Second time derivative of ω_d given the body angular acceleration:
/// k_P·E₂ê₃(ω̂₂²b + b̂ω̇₂) with b = R₂ᵀΓ_d.
Vec2 omega_d_ddot(const Rotation& R2, const Vec3& omega2, const Vec3& omega2_dot,
                  const RefAttitude& ref, double k_P);

Vec2 control_conventional(const Vec2& omega, const Vec2& omega_d, const Gains& g);

Vec2 control_sp(const Vec2& omega, const Vec2& omega_d, const Vec2& omega_d_dot,
                const CtlMatrices& m);

/// Attitude and rate measurements shared by the compensating laws.
struct AttitudeInputs {
  Rotation R2;
  Vec3 omega2 = Vec3::Zero();
};

/// v = u_d - A_m⁻¹u̇_d with u_d the SP torque and u̇_d its exact derivative.
/// `omega2_dot` is the true body angular acceleration (testing mode).
Vec2 control_sp_motor(const AttitudeInputs& att, const Vec3& omega2_dot, const RefAttitude& ref,
                      const Gains& g, const CtlMatrices& m);

/// One exact zero-order-hold step of the observer û̇ = A_m(û - v).
Vec2 observer_update(const Vec2& u_hat, const Vec2& v_cmd, double tau_m, double h);

/// How ω̂ in the observer's second-derivative term is formed.
enum class RateReading {
  body_rate,    // full ω₂ including spin; exact derivative
  planar_lift,  // hat(lift_xy(ω)), spin dropped
};

std::string_view to_string(RateReading r);
RateReading rate_reading_from_string(std::string_view name);

/// Compensating law with ω̇ estimated as A_skw·ω + û. Only `state.u_hat` is
/// read from `state`. With û equal to the realized torque and
/// RateReading::body_rate this equals control_sp_motor.
Vec2 control_sp_observer(const CtlState& state, const AttitudeInputs& att, const RefAttitude& ref,
                         const Gains& g, const CtlMatrices& m,
                         RateReading reading = RateReading::body_rate);

/// Outcome of a law's stability condition on the gains.
struct GainCheck {
  bool pass = false;
  double margin = 0.0;           // k_D minus its threshold (k_D for the conventional law)
  std::vector<double> minors;    // leading principal minors of -Q
};

GainCheck gain_check(Law law, const Gains& g, double tau_m);

/// The symmetric bound matrix Q of the law's Lyapunov decrement.
Eigen::MatrixXd lyapunov_bound_matrix(Law law, const Gains& g, double tau_m);

}  // namespace gyroctl

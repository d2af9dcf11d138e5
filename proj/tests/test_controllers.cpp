#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dual.hpp"
#include "gyroctl/controllers.hpp"
#include "gyroctl/errors.hpp"
#include "test_util.hpp"

using namespace gyroctl;
using gyroctl::testing::Gen;
using gyroctl::testing::omega_d_derivs;

namespace {

constexpr double kTau = 0.0846;

struct RandomState {
  Rotation R2;
  Vec3 omega2;
  Vec2 u;
  RefAttitude ref;
};

RandomState random_state(Gen& g, double r_bar) {
  const Vec2 w = g.vec2(2.0);
  return {g.rotation(), Vec3(w.x(), w.y(), r_bar), g.vec2(3.0), RefAttitude(g.rotation())};
}

}  // namespace

TEST(Law, Names) {
  for (Law l : {Law::conventional, Law::sp, Law::sp_motor, Law::sp_motor_observer}) {
    EXPECT_EQ(law_from_string(to_string(l)), l);
  }
  EXPECT_THROW(law_from_string("pid"), ValidationError);
  EXPECT_EQ(rate_reading_from_string("planar_lift"), RateReading::planar_lift);
  EXPECT_THROW(rate_reading_from_string("x"), ValidationError);
}

TEST(OmegaD, Examples) {
  const auto ref = RefAttitude::toward(UnitVec3::e3());
  EXPECT_EQ(omega_d(Rotation::identity(), ref, 3.0), Vec2::Zero());
  EXPECT_LT(omega_d(rotation_to(-UnitVec3::e3()), ref, 3.0).norm(), 1e-15);
  const auto ref1 = RefAttitude::toward(UnitVec3::e1());
  EXPECT_LT((omega_d(Rotation::identity(), ref1, 1.0) - Vec2(0, 1)).norm(), 1e-15);
}

TEST(OmegaD, BodyAndInertialFormsAgree) {
  // k_P·E₂R₂ᵀ(Γ × Γ_d) against k_P·E₂(e₃ × R₂ᵀΓ_d).
  Gen g;
  for (int i = 0; i < 200; ++i) {
    const Rotation R = g.rotation();
    const RefAttitude ref(g.rotation());
    const Vec3 gamma = R.matrix().col(2);
    const Vec3 inertial = gamma.cross(ref.Gamma_d().vec());
    const Vec2 expect = 2.5 * (R.matrix().transpose() * inertial).head<2>();
    EXPECT_LT((omega_d(R, ref, 2.5) - expect).norm(), 1e-14);
  }
}

TEST(OmegaDDot, Examples) {
  const auto ref = RefAttitude::toward(UnitVec3::normalized(Vec3(1, 2, 2)));
  EXPECT_EQ(omega_d_dot(exp_so3(Vec3(0.1, 0.2, 0.3)), Vec3::Zero(), ref, 2.0), Vec2::Zero());
  const auto up = RefAttitude::toward(UnitVec3::e3());
  EXPECT_LT(omega_d_dot(Rotation::identity(), Vec3(0, 0, 26.18), up, 2.0).norm(), 1e-15);
}

TEST(OmegaDDot, MatchesDualNumberOracle) {
  Gen g;
  for (int i = 0; i < 300; ++i) {
    const RandomState s = random_state(g, 26.18);
    const Vec3 w2dot = g.vec3(5.0);
    const auto oracle = omega_d_derivs(s.R2.matrix(), s.omega2, w2dot, s.ref.Gamma_d().vec(), 1.7);
    EXPECT_LT((omega_d(s.R2, s.ref, 1.7) - oracle.value).norm(), 1e-13);
    EXPECT_LT((omega_d_dot(s.R2, s.omega2, s.ref, 1.7) - oracle.first).norm(), 1e-11);
    EXPECT_LT((omega_d_ddot(s.R2, s.omega2, w2dot, s.ref, 1.7) - oracle.second).norm(), 1e-9);
  }
}

TEST(OmegaDDot, FiniteDifferenceAlongFlow) {
  Gen g;
  for (int i = 0; i < 20; ++i) {
    const RandomState s = random_state(g, 26.18);
    const double eps = 1e-6;
    const Rotation Rp = s.R2 * exp_so3(s.omega2 * eps);
    const Vec2 fd = (omega_d(Rp, s.ref, 2.0) - omega_d(s.R2, s.ref, 2.0)) / eps;
    EXPECT_LT((fd - omega_d_dot(s.R2, s.omega2, s.ref, 2.0)).norm(), 1e-3);
  }
}

TEST(ControlConventional, Examples) {
  EXPECT_EQ(control_conventional(Vec2::Zero(), Vec2::Zero(), {1.0, 2.0}), Vec2::Zero());
  EXPECT_EQ(control_conventional(Vec2(1, 0), Vec2::Zero(), {1.0, 2.0}), Vec2(-2, 0));
}

TEST(ControlSp, Examples) {
  const CtlMatrices m = CtlMatrices::make({1.0, 0.5}, 2.0, kTau);
  EXPECT_EQ(control_sp(Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), m), Vec2::Zero());
  EXPECT_LT((control_sp(Vec2(1, 0), Vec2(1, 0), Vec2::Zero(), m) - Vec2(0, -2)).norm(), 1e-15);
}

TEST(ControlSp, ErrorDynamicsFollowGyroMinusDamping) {
  Gen g;
  const BodyParams p;
  const GyroCoeffs c = GyroCoeffs::from(p);
  for (int i = 0; i < 300; ++i) {
    const Gains gains{g.uniform(0.1, 10.0), g.uniform(0.3, 20.0)};
    const CtlMatrices m = CtlMatrices::make(gains, p);
    const RandomState s = random_state(g, p.r_bar);
    const Vec2 omega = s.omega2.head<2>();
    const Vec2 wd = omega_d(s.R2, s.ref, gains.k_P);
    const Vec2 u = control_sp(omega, wd, omega_d_dot(s.R2, s.omega2, s.ref, gains.k_P), m);
    const Vec2 wdot = body_rates_deriv(omega, u, c);
    const auto oracle = omega_d_derivs(s.R2.matrix(), s.omega2, lift_xy(wdot), s.ref.Gamma_d().vec(), gains.k_P);
    const Vec2 resid = (wdot - oracle.first) - m.A * (omega - wd);
    EXPECT_LT(resid.norm(), 1e-12 * (1.0 + wdot.norm()));
  }
  const CtlMatrices m = CtlMatrices::make({2.0, 3.0}, c.k, p.tau_m);
  const Eigen::Vector2cd ev = m.A.eigenvalues();
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(ev(i).real(), -3.0, 1e-12);
    EXPECT_NEAR(std::abs(ev(i).imag()), c.k, 1e-12);
  }
}

TEST(ControlSpMotor, Examples) {
  const BodyParams p;
  const Gains gains;
  const CtlMatrices m = CtlMatrices::make(gains, p);
  const auto ref = RefAttitude(exp_so3(Vec3(0.3, -0.2, 1.0)));
  AttitudeInputs at{ref.R_d(), Vec3(0, 0, p.r_bar)};
  EXPECT_LT(control_sp_motor(at, Vec3::Zero(), ref, gains, m).norm(), 1e-13);
  CtlState st;
  EXPECT_LT(control_sp_observer(st, at, ref, gains, m).norm(), 1e-13);
  EXPECT_LT(control_sp_observer(st, at, ref, gains, m, RateReading::planar_lift).norm(), 1e-13);
}

TEST(ControlSpMotor, ConstantDesiredTorqueNeedsNoLead) {
  // With ω_d ≡ 0 (aligned, non-spinning body) and ω̇ = 0, u_d = -k_D ω is constant.
  const Gains gains{2.0, 4.0};
  const CtlMatrices m = CtlMatrices::make(gains, 0.0, kTau);
  const auto ref = RefAttitude::toward(UnitVec3::e3());
  AttitudeInputs at{Rotation::identity(), Vec3(0, 0, 0)};
  EXPECT_LT(control_sp_motor(at, Vec3::Zero(), ref, gains, m).norm(), 1e-15);
  // Rates about e₃ only: ω_d stays zero, so v = u_d = 0 as well.
  at.omega2 = Vec3(0, 0, 5.0);
  EXPECT_LT(control_sp_motor(at, Vec3::Zero(), ref, gains, m).norm(), 1e-15);
}

TEST(ControlSpMotor, ClosedLoopTorqueErrorDecays) {
  // u̇_e = A_m·u_e with u̇ = A_m(u - v) and u̇_d from the dual-number oracle.
  Gen g;
  const BodyParams p;
  const GyroCoeffs c = GyroCoeffs::from(p);
  for (int i = 0; i < 300; ++i) {
    const Gains gains{g.uniform(0.1, 10.0), g.uniform(0.3, 20.0)};
    const CtlMatrices m = CtlMatrices::make(gains, p);
    const RandomState s = random_state(g, p.r_bar);
    const Vec2 omega = s.omega2.head<2>();
    const Vec2 wdot = body_rates_deriv(omega, s.u, c);
    const Vec3 w2dot = lift_xy(wdot);
    const Vec2 v = control_sp_motor({s.R2, s.omega2}, w2dot, s.ref, gains, m);
    const Vec2 udot = m.A_m * (s.u - v);
    const auto d = omega_d_derivs(s.R2.matrix(), s.omega2, w2dot, s.ref.Gamma_d().vec(), gains.k_P);
    const Vec2 u_d = -m.A_sym * omega - m.A * d.value + d.first;
    const Vec2 u_d_dot = -m.A_sym * wdot - m.A * d.first + d.second;
    const Vec2 resid = (udot - u_d_dot) - m.A_m * (s.u - u_d);
    EXPECT_LT(resid.norm(), 1e-11 * (1.0 + udot.norm()));
  }
}

TEST(ControlSpObserver, PerfectObserverReducesToExactLaw) {
  Gen g;
  const BodyParams p;
  const GyroCoeffs c = GyroCoeffs::from(p);
  for (int i = 0; i < 200; ++i) {
    const Gains gains{g.uniform(0.1, 10.0), g.uniform(0.3, 20.0)};
    const CtlMatrices m = CtlMatrices::make(gains, p);
    const RandomState s = random_state(g, p.r_bar);
    CtlState st;
    st.omega = s.omega2.head<2>();
    st.u = s.u;
    st.u_hat = s.u;
    const Vec3 w2dot = lift_xy(body_rates_deriv(st.omega, s.u, c));
    const Vec2 exact = control_sp_motor({s.R2, s.omega2}, w2dot, s.ref, gains, m);
    const Vec2 obs = control_sp_observer(st, {s.R2, s.omega2}, s.ref, gains, m);
    EXPECT_LT((exact - obs).norm(), 1e-12 * (1.0 + exact.norm()));
    // Only û is read.
    st.u = g.vec2(100.0);
    st.omega = g.vec2(100.0);
    EXPECT_EQ(control_sp_observer(st, {s.R2, s.omega2}, s.ref, gains, m), obs);
  }
}

TEST(Observer, Examples) {
  EXPECT_EQ(observer_update(Vec2(1, -2), Vec2(1, -2), kTau, 4e-3), Vec2(1, -2));
  const Vec2 v(0.5, 1.5);
  Vec2 uh = Vec2::Zero();
  for (int i = 0; i < 50; ++i) uh = observer_update(uh, v, kTau, 4e-3);
  EXPECT_LT((uh - v * (1.0 - std::exp(-0.2 / kTau))).norm(), 1e-14);
}

TEST(Observer, ErrorDecaysIndependentlyOfCommand) {
  Gen g;
  Vec2 u(1.0, -0.5);
  Vec2 uh(-0.3, 0.8);
  const double e0 = (u - uh).norm();
  const double h = 1e-3;
  for (int i = 1; i <= 500; ++i) {
    const Vec2 v = g.vec2(10.0);  // arbitrary command history, any controller
    u = motor_advance(u, v, kTau, h);
    uh = observer_update(uh, v, kTau, h);
    EXPECT_NEAR((u - uh).norm() / e0, std::exp(-i * h / kTau), 1e-12);
  }
}

TEST(RefInvariance, SpinAboutDesiredAxisChangesNothing) {
  Gen g;
  const BodyParams p;
  const GyroCoeffs c = GyroCoeffs::from(p);
  const Gains gains;
  const CtlMatrices m = CtlMatrices::make(gains, p);
  for (int i = 0; i < 100; ++i) {
    const RandomState s = random_state(g, p.r_bar);
    const RefAttitude other(s.ref.R_d() * rot_z(g.uniform(-3.0, 3.0)));
    const Vec2 omega = s.omega2.head<2>();
    const Vec3 w2dot = lift_xy(body_rates_deriv(omega, s.u, c));
    EXPECT_LT((omega_d(s.R2, s.ref, 2.0) - omega_d(s.R2, other, 2.0)).norm(), 1e-12);
    EXPECT_LT((omega_d_dot(s.R2, s.omega2, s.ref, 2.0) - omega_d_dot(s.R2, s.omega2, other, 2.0)).norm(), 1e-12);
    EXPECT_LT((control_sp_motor({s.R2, s.omega2}, w2dot, s.ref, gains, m) -
               control_sp_motor({s.R2, s.omega2}, w2dot, other, gains, m)).norm(), 1e-10);
    CtlState st;
    st.u_hat = s.u;
    EXPECT_LT((control_sp_observer(st, {s.R2, s.omega2}, s.ref, gains, m) -
               control_sp_observer(st, {s.R2, s.omega2}, other, gains, m)).norm(), 1e-10);
  }
}

TEST(Equilibria, OnlyAlignedAndAntipodal) {
  // With ω = 0 the spin axis is at rest; the rates stay at rest iff u = 0.
  const BodyParams p;
  const GyroCoeffs c = GyroCoeffs::from(p);
  const Gains gains;
  const CtlMatrices m = CtlMatrices::make(gains, p);
  const auto ref = RefAttitude::toward(UnitVec3::e3());
  const int n = 4000;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> pts{Vec3::UnitZ(), -Vec3::UnitZ()};
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  for (const Vec3& x : pts) {
    const Rotation R = rotation_to(UnitVec3::normalized(x));
    const Vec3 w2(0, 0, p.r_bar);
    const Vec2 wd = omega_d(R, ref, gains.k_P);
    const Vec2 wdd = omega_d_dot(R, w2, ref, gains.k_P);
    const double sin_angle = x.normalized().head<2>().norm();
    const Vec2 u_conv = control_conventional(Vec2::Zero(), wd, gains);
    const Vec2 u_sp = control_sp(Vec2::Zero(), wd, wdd, m);
    const Vec3 w2dot = lift_xy(body_rates_deriv(Vec2::Zero(), Vec2::Zero(), c));
    const Vec2 v = control_sp_motor({R, w2}, w2dot, ref, gains, m);
    for (const Vec2& out : {u_conv, u_sp, v}) {
      if (sin_angle < 1e-12) {
        EXPECT_LT(out.norm(), 1e-12);
      } else {
        EXPECT_GT(out.norm(), 0.5 * gains.k_P * sin_angle);
      }
    }
  }
}

TEST(GainCheck, Examples) {
  EXPECT_FALSE(gain_check(Law::sp, {2.0, 0.25}, kTau).pass);
  EXPECT_TRUE(gain_check(Law::sp, {2.0, 0.2500001}, kTau).pass);
  EXPECT_FALSE(gain_check(Law::sp_motor, {2.0, 0.27115}, kTau).pass);
  EXPECT_TRUE(gain_check(Law::sp_motor, {2.0, 0.2712}, kTau).pass);
  EXPECT_TRUE(gain_check(Law::sp_motor_observer, {2.0, 0.2712}, kTau).pass);
  EXPECT_TRUE(gain_check(Law::conventional, {1.0, 0.01}, kTau).pass);
  EXPECT_FALSE(gain_check(Law::conventional, {1.0, 0.0}, kTau).pass);
  EXPECT_FALSE(gain_check(Law::sp, {0.0, 5.0}, kTau).pass);
  EXPECT_NEAR(gain_check(Law::sp_motor, {1.0, 1.0}, kTau).margin, 1.0 - 0.27115, 1e-15);
  EXPECT_TRUE(gain_check(Law::sp, Gains{}, kTau).pass);
  EXPECT_TRUE(gain_check(Law::sp_motor, Gains{}, kTau).pass);
}

TEST(GainCheck, MinorsChangeSignAtBoundary) {
  for (Law law : {Law::sp, Law::sp_motor}) {
    const double kb = law == Law::sp ? 0.25 : (1.0 + kTau) / 4.0;
    const auto at = gain_check(law, {1.0, kb}, kTau);
    const auto below = gain_check(law, {1.0, kb - 1e-6}, kTau);
    const auto above = gain_check(law, {1.0, kb + 1e-6}, kTau);
    EXPECT_NEAR(at.minors.back(), 0.0, 1e-12);
    EXPECT_LT(below.minors.back(), 0.0);
    EXPECT_GT(above.minors.back(), 0.0);
    for (std::size_t i = 0; i + 1 < above.minors.size(); ++i) EXPECT_GT(above.minors[i], 0.0);
  }
}

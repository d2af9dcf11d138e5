import math

import numpy as np
import pytest

import gyroctl


def test_exp_and_geodesic():
    r = gyroctl.exp_so3([0.0, 0.0, math.pi / 2])
    assert np.allclose(r @ [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], atol=1e-12)
    assert np.allclose(gyroctl.vee(gyroctl.hat([1.0, 2.0, 3.0])), [1.0, 2.0, 3.0])
    assert gyroctl.geodesic_angle([1, 0, 0], [0, 0, 1]) == pytest.approx(math.pi / 2)


def test_body_coefficients():
    p = gyroctl.BodyParams()
    p.r_bar = 26.18
    assert p.k == pytest.approx(20.437290322580644, abs=1e-12)
    assert p.k_bar == pytest.approx(46.617290322580644, abs=1e-12)


def test_gain_check_boundaries():
    assert not gyroctl.gain_check(gyroctl.Law.sp, gyroctl.Gains(1.0, 0.25)).passed
    assert gyroctl.gain_check(gyroctl.Law.sp_motor, gyroctl.Gains(1.0, 0.2712)).passed
    assert not gyroctl.gain_check(gyroctl.Law.sp_motor, gyroctl.Gains(1.0, 0.27115)).passed


def test_linearization_split():
    g = gyroctl.Gains(2.0, 3.0)
    for law in (gyroctl.Law.conventional, gyroctl.Law.sp, gyroctl.Law.sp_motor):
        s = gyroctl.linearize(law, g)
        fd = gyroctl.finite_diff_jacobian(law, g)
        assert np.linalg.norm(s - fd) <= 1e-5 * np.linalg.norm(s)
        assert gyroctl.spectral_abscissa(s) < 0
        assert gyroctl.spectral_abscissa(gyroctl.linearize(law, g, antipode=True)) > 0


def test_phase_portrait_lag():
    pp = gyroctl.phase_portrait(46.61, 1.0, [1.0, 0.0], grid=3)
    assert math.degrees(pp["lag_rad"]) == pytest.approx(88.7709, abs=1e-3)
    assert np.allclose(pp["omega_ss"], [4.6009e-4, 2.144475e-2], atol=1e-8)
    with pytest.raises(gyroctl.SingularSystem):
        gyroctl.phase_portrait(46.61, 0.0, [1.0, 0.0])


def test_run_and_compare():
    sp = gyroctl.load_scenario("law: sp\n")
    log = gyroctl.run(sp)
    a = log.array()
    assert a.shape == (1251, 14)
    assert log.columns.split(",")[0] == "t"
    assert log.metrics.settle_time_s < 3.0
    assert log.metrics.efficiency > 0.8
    conv = gyroctl.load_scenario("law: conventional\n")
    rows = gyroctl.compare([sp, conv])
    assert rows[0]["efficiency"] > rows[1]["efficiency"]
    with pytest.raises(gyroctl.MismatchedScenarios):
        gyroctl.compare([sp])


def test_config_errors():
    with pytest.raises(gyroctl.ValidationError):
        gyroctl.load_scenario("timing: {step_s: 0.003, control_period_s: 0.004}\n")
    with pytest.raises(gyroctl.ParseError):
        gyroctl.load_scenario("gainz: 1\n")
    s = gyroctl.load_scenario("desired: {gamma: [0, 0, 2]}\n")
    assert np.allclose(s.desired_gamma, [0, 0, 1])
    assert s.warnings

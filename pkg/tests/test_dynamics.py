import math

import numpy as np
import pytest

from quadsim.dynamics import (
    ControlVector,
    MotorSpeeds,
    NonFiniteStateError,
    VehicleState,
    ZERO_SPEEDS,
    hover_speed,
    mix_forward,
    mixing_matrix,
    plant_step,
    rotational_accel,
    state_derivative,
    translational_accel,
)
from quadsim.params import QuadParams
from quadsim.rotation import EulerAngles, GimbalLockError

P = QuadParams()
MG = P.m * P.g  # 19.2276 N

# Eq.-by-term evaluation of the earth-frame acceleration at attitude
# (0.1, 0.15, 0.2) with thrust equal to the weight, frozen independently.
ACCEL_REFERENCE = np.array([1.6241580267519649, -0.6700518555296765, -0.15861454427197685])


def hover_command(p=P) -> MotorSpeeds:
    wh = hover_speed(p)
    return MotorSpeeds(wh, wh, wh, wh)


class TestMixing:
    def test_equal_speeds_zero_moments(self):
        u = mix_forward(MotorSpeeds(1000, 1000, 1000, 1000), P)
        assert u.u2 == 0.0 and u.u3 == 0.0 and u.u4 == 0.0
        assert u.u1 == pytest.approx(4 * 2.06e-7 * 1e6, rel=1e-15)  # 0.824 N

    def test_opposing_pair(self):
        u = mix_forward(MotorSpeeds(0, 1000, 0, 1000), P)
        assert u.u2 == pytest.approx(0.0, abs=1e-18)
        assert u.u3 == pytest.approx(0.0, abs=1e-18)
        assert u.u4 == pytest.approx(-2 * 1.01e-10 * 1e6, rel=1e-12)  # -2.02e-4 N m

    def test_linearity_in_squared_speeds(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            w = rng.uniform(0, 8000, 4)
            alpha = rng.uniform(0.1, 5.0)
            u = mix_forward(MotorSpeeds(*w), P).as_array()
            u_scaled = mix_forward(MotorSpeeds(*(math.sqrt(alpha) * w)), P).as_array()
            np.testing.assert_allclose(u_scaled, alpha * u, rtol=1e-12, atol=1e-16)

    def test_negative_speed_rejected(self):
        with pytest.raises(ValueError):
            MotorSpeeds(-1.0, 0, 0, 0)


class TestHoverSpeed:
    def test_reference_value(self):
        assert hover_speed(P) == pytest.approx(math.sqrt(1.96 * 9.81 / (4 * 2.06e-7)), rel=1e-15)
        assert hover_speed(P) == pytest.approx(4830.576, abs=1e-3)

    def test_mass_square_root_law(self):
        import dataclasses

        doubled = dataclasses.replace(P, m=2 * P.m)
        assert hover_speed(doubled) == pytest.approx(math.sqrt(2) * hover_speed(P), rel=1e-12)

    def test_defining_identity(self):
        u = mix_forward(hover_command(), P)
        assert abs(u.u1 - MG) < 1e-9
        assert u.u2 == u.u3 == u.u4 == 0.0


class TestTranslationalAccel:
    def test_hover_equilibrium(self):
        a = translational_accel(EulerAngles(0, 0, 0), MG, P)
        np.testing.assert_allclose(a, np.zeros(3), atol=1e-15)

    def test_free_fall(self):
        a = translational_accel(EulerAngles(0, 0, 0), 0.0, P)
        np.testing.assert_array_equal(a, [0.0, 0.0, -P.g])

    def test_frozen_reference(self):
        a = translational_accel(EulerAngles(0.1, 0.15, 0.2), 19.2276, P)
        np.testing.assert_allclose(a, ACCEL_REFERENCE, rtol=0, atol=1e-14)


class TestRotationalAccel:
    def test_all_cross_terms_need_two_rates(self):
        a = rotational_accel(np.array([1.0, 0.0, 0.0]), (0, 0, 0), P, full=True)
        np.testing.assert_array_equal(a, np.zeros(3))

    def test_cross_term_hand_value(self):
        a = rotational_accel(np.array([0.0, 1.0, 1.0]), (0, 0, 0), P, full=True)
        assert a[0] == pytest.approx((0.0153 - 0.0532) / 0.0149, rel=1e-12)  # -2.5436
        assert a[1] == 0.0
        assert a[2] == 0.0

    def test_moment_division(self):
        for full in (True, False):
            a = rotational_accel(np.zeros(3), (0.01, 0, 0), P, full=full)
            assert a[0] == pytest.approx(0.01 / 0.0149, rel=1e-12)  # 0.6711

    def test_simplified_matches_full_single_rate(self):
        rng = np.random.default_rng(11)
        for axis in range(3):
            for _ in range(20):
                rates = np.zeros(3)
                rates[axis] = rng.uniform(-10, 10)
                moments = tuple(rng.uniform(-1, 1, 3))
                np.testing.assert_array_equal(
                    rotational_accel(rates, moments, P, full=True),
                    rotational_accel(rates, moments, P, full=False),
                )


class TestStateDerivative:
    def test_hover_fixed_point(self):
        s = VehicleState(np.array([0, 0, 7.0]), np.zeros(3), EulerAngles(0, 0, 0), np.zeros(3))
        d = state_derivative(s, hover_command(), P)
        assert np.abs(d).max() < 1e-12

    def test_free_fall_from_rest(self):
        d = state_derivative(VehicleState.zero(), ZERO_SPEEDS, P)
        expected = np.zeros(12)
        expected[5] = -P.g
        np.testing.assert_array_equal(d, expected)

    def test_finite_difference_of_plant_step(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            s = VehicleState(
                rng.normal(0, 5, 3),
                rng.normal(0, 2, 3),
                EulerAngles(*rng.uniform(-0.5, 0.5, 3)),
                rng.normal(0, 1, 3),
            )
            w = MotorSpeeds(*rng.uniform(0, 6000, 4))
            d = state_derivative(s, w, P)
            dt = 1e-6
            fd = (plant_step(s, w, P, dt).as_vector() - s.as_vector()) / dt
            assert np.abs(fd - d).max() < 1e-3

    def test_gimbal_fault_propagates(self):
        s = VehicleState(np.zeros(3), np.zeros(3), EulerAngles(0, math.pi / 2 - 5e-7, 0), np.zeros(3))
        with pytest.raises(GimbalLockError):
            state_derivative(s, ZERO_SPEEDS, P)


class TestPlantStep:
    def test_hover_fixed_point_15s(self):
        s = VehicleState.zero()
        cmd = hover_command()
        for _ in range(1500):
            s = plant_step(s, cmd, P, 0.01)
        assert np.abs(s.as_vector()).max() < 1e-6

    def test_free_fall_quadrature(self):
        s = VehicleState.zero()
        for _ in range(100):
            s = plant_step(s, ZERO_SPEEDS, P, 0.01)
        assert s.position[2] == pytest.approx(-P.g / 2, abs=1e-9)  # -4.905 m

    def test_time_advances(self):
        s = plant_step(VehicleState.zero(), ZERO_SPEEDS, P, 0.01)
        assert s.t == pytest.approx(0.01)

    def test_energy_conservation_unpowered(self):
        rng = np.random.default_rng(31)
        s = VehicleState(
            np.array([0.0, 0.0, 50.0]), rng.normal(0, 3, 3), EulerAngles(0.2, 0.3, -0.4), rng.normal(0, 1, 3)
        )

        def energy(state):
            return 0.5 * P.m * float(state.velocity @ state.velocity) + P.m * P.g * state.position[2]

        e0 = energy(s)
        for _ in range(100):
            s = plant_step(s, ZERO_SPEEDS, P, 0.01)
        assert abs(energy(s) - e0) < 1e-6

    def test_invalid_dt(self):
        with pytest.raises(ValueError):
            plant_step(VehicleState.zero(), ZERO_SPEEDS, P, 0.0)

    def test_non_finite_fault_with_dump(self):
        huge = 1.79e308
        s = VehicleState(np.array([huge, 0, 0]), np.array([huge, 0, 0]), EulerAngles(0, 0, 0), np.zeros(3))
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(NonFiniteStateError, match="speeds"):
                plant_step(s, ZERO_SPEEDS, P, 0.01)


def sinusoid_fixed_grid_command(t: float, p=P) -> MotorSpeeds:
    """Motor commands varying sinusoidally, held on a 20 ms grid."""
    wh = hover_speed(p)
    tq = math.floor(t / 0.02 + 1e-9) * 0.02
    return MotorSpeeds(
        wh * (1 + 0.004 * math.sin(2 * math.pi * 1.0 * tq)),
        wh * (1 + 0.004 * math.sin(2 * math.pi * 1.3 * tq + 1.0)),
        wh * (1 + 0.004 * math.sin(2 * math.pi * 0.7 * tq + 2.0)),
        wh * (1 + 0.004 * math.sin(2 * math.pi * 1.1 * tq + 3.0)),
    )


def integrate_sinusoid_maneuver(dt: float, duration=1.0) -> np.ndarray:
    s = VehicleState.zero()
    n = int(round(duration / dt))
    for k in range(n):
        s = plant_step(s, sinusoid_fixed_grid_command(k * dt), P, dt)
    return s.as_vector()


def richardson_ratio(dt=0.01) -> float:
    ref = integrate_sinusoid_maneuver(dt / 8)
    err_full = np.linalg.norm(integrate_sinusoid_maneuver(dt) - ref)
    err_half = np.linalg.norm(integrate_sinusoid_maneuver(dt / 2) - ref)
    return float(err_full / err_half)


class TestIntegratorOrder:
    def test_richardson_ratio_fourth_order(self):
        ratio = richardson_ratio()
        assert 12.0 <= ratio <= 20.0

    def test_observed_order(self):
        order = math.log2(richardson_ratio())
        assert 3.7 <= order <= 4.3


class TestValueTypes:
    def test_control_vector_thrust_nonnegative(self):
        with pytest.raises(ValueError):
            ControlVector(-0.1, 0, 0, 0)

    def test_params_positive(self):
        with pytest.raises(ValueError):
            QuadParams(m=0.0)

    def test_state_vector_round_trip(self):
        s = VehicleState(np.arange(3), np.arange(3, 6), EulerAngles(0.1, 0.2, 0.3), np.arange(9, 12), 2.5)
        back = VehicleState.from_vector(s.as_vector(), s.t)
        np.testing.assert_array_equal(back.as_vector(), s.as_vector())
        assert back.t == 2.5

    def test_mixing_matrix_shape_and_rank(self):
        m = mixing_matrix(P)
        assert m.shape == (4, 4)
        assert np.linalg.matrix_rank(m) == 4

import math

import numpy as np
import pytest

from quadsim.rotation import (
    EulerAngles,
    GimbalLockError,
    Quaternion,
    euler_to_quaternion,
    quaternion_to_euler,
    quaternion_to_matrix,
    rotation_enu_to_body,
)

# Termwise evaluation of the Z-Y-X direction cosine matrix at
# (phi, theta, psi) = (0.1, 0.15, 0.2), frozen from an independent script.
DCM_0p1_0p15_0p2 = np.array(
    [
        [0.9690614866211725, 0.19643848836306482, -0.14943813247359922],
        [-0.1830552774293229, 0.9781342589237085, 0.0987123949919223],
        [0.16556147061691792, -0.068302941440334, 0.9838313410528056],
    ]
)


def random_attitudes(n, seed=0, theta_max=1.4):
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-math.pi, math.pi, n)
    theta = rng.uniform(-theta_max, theta_max, n)
    psi = rng.uniform(-math.pi, math.pi, n)
    return [EulerAngles(*abc) for abc in zip(phi, theta, psi)]


class TestRotationMatrix:
    def test_identity(self):
        np.testing.assert_array_equal(rotation_enu_to_body(EulerAngles(0, 0, 0)), np.eye(3))

    def test_pure_yaw_quarter_turn(self):
        m = rotation_enu_to_body(EulerAngles(0, 0, math.pi / 2))
        expected = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 1]])
        np.testing.assert_allclose(m, expected, atol=1e-15)

    def test_frozen_reference_attitude(self):
        m = rotation_enu_to_body(EulerAngles(0.1, 0.15, 0.2))
        np.testing.assert_allclose(m, DCM_0p1_0p15_0p2, rtol=0, atol=1e-15)

    def test_orthonormal_determinant_property(self):
        for att in random_attitudes(1000, seed=42):
            m = rotation_enu_to_body(att)
            assert np.abs(m.T @ m - np.eye(3)).max() < 1e-12
            assert abs(np.linalg.det(m) - 1.0) < 1e-12

    def test_gimbal_fault(self):
        with pytest.raises(GimbalLockError):
            rotation_enu_to_body(EulerAngles(0, math.pi / 2 - 1e-7, 0))


class TestEulerQuaternion:
    def test_identity(self):
        q = euler_to_quaternion(EulerAngles(0, 0, 0))
        assert (q.w, q.x, q.y, q.z) == (1.0, 0.0, 0.0, 0.0)

    def test_pure_yaw_half_angle(self):
        q = euler_to_quaternion(EulerAngles(0, 0, math.pi / 2))
        assert q.w == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert q.z == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert q.x == q.y == 0.0

    def test_round_trip_reference(self):
        att = EulerAngles(0.1, 0.15, 0.2)
        back = quaternion_to_euler(euler_to_quaternion(att))
        assert back.phi == pytest.approx(0.1, abs=1e-12)
        assert back.theta == pytest.approx(0.15, abs=1e-12)
        assert back.psi == pytest.approx(0.2, abs=1e-12)

    def test_quaternion_identity_to_euler(self):
        att = quaternion_to_euler(Quaternion(1, 0, 0, 0))
        assert (att.phi, att.theta, att.psi) == (0.0, 0.0, 0.0)

    def test_pure_roll_half_angle(self):
        s = math.sqrt(2) / 2
        att = quaternion_to_euler(Quaternion(s, s, 0, 0))
        assert att.phi == pytest.approx(math.pi / 2, abs=1e-12)
        assert att.theta == 0.0
        assert att.psi == 0.0

    def test_round_trip_property(self):
        for att in random_attitudes(500, seed=7):
            q = euler_to_quaternion(att)
            assert abs(np.linalg.norm(q.as_array()) - 1.0) < 1e-9
            back = quaternion_to_euler(q)
            q2 = euler_to_quaternion(back)
            # equal up to global sign; w >= 0 canonicalization makes them equal
            assert np.abs(q.as_array() - q2.as_array()).max() < 1e-12
            assert back.phi == pytest.approx(att.phi, abs=1e-12)
            assert back.theta == pytest.approx(att.theta, abs=1e-12)
            assert back.psi == pytest.approx(att.psi, abs=1e-12)

    def test_canonical_w_sign(self):
        # a yaw near pi would give w < 0 without canonicalization
        q = euler_to_quaternion(EulerAngles(0.3, 0.2, 3.1))
        assert q.w >= 0.0

    def test_quaternion_matrix_matches_dcm_transpose(self):
        for att in random_attitudes(100, seed=3):
            q = euler_to_quaternion(att)
            np.testing.assert_allclose(
                quaternion_to_matrix(q), rotation_enu_to_body(att).T, rtol=0, atol=1e-12
            )

    def test_near_gimbal_extraction_fault(self):
        q = euler_to_quaternion(EulerAngles(0, math.pi / 2 - 1e-5, 0))
        with pytest.raises(GimbalLockError):
            quaternion_to_euler(q)


class TestValidation:
    def test_quaternion_norm_enforced(self):
        with pytest.raises(ValueError):
            Quaternion(1.0, 0.1, 0.0, 0.0)
        Quaternion(1.0 + 5e-10, 0.0, 0.0, 0.0)  # within tolerance

    def test_euler_pitch_envelope(self):
        with pytest.raises(GimbalLockError):
            EulerAngles(0, math.pi / 2, 0)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            EulerAngles(float("nan"), 0, 0)

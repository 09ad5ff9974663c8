import unittest

import numpy as np
from scipy.spatial.transform import Rotation

from fusedock.utils.errors import InsufficientExcitation, TooFewSamples
from fusedock.utils.pose import Pose, pose_distance
from fusedock.eval.metrics import attitude_error
from fusedock.calibration import CalibResult, CalibSample, apply_calibration, nearest_rotation, simulate_samples, solve_statics
from fusedock.calibration.statics import check_excitation


def _statics(rng: np.random.Generator) -> tuple:
    T_ic = Pose(rotation=Rotation.random(random_state=rng).as_quat(), translation=rng.uniform(-0.1, 0.1, 3))
    T_sb = Pose(rotation=Rotation.random(random_state=rng).as_quat(), translation=rng.uniform(-0.1, 0.1, 3))
    return T_ic, T_sb


class TestSolveStatics(unittest.TestCase):
    def test_noiseless(self) -> None:
        rng = np.random.default_rng(0)
        for _ in range(5):
            T_ic, T_sb = _statics(rng)
            samples = simulate_samples(T_ic, T_sb, 10, rng, workspace_m=2.0)
            result = solve_statics(samples, verbose=0)
            for estimate, truth in ((result.T_ic, T_ic), (result.T_sb, T_sb)):
                angle, offset = pose_distance(estimate, truth)
                self.assertLess(angle, 1e-9)
                self.assertLess(offset, 1e-9)
            self.assertLess(result.rms_rotation_residual, 1e-9)
            self.assertLess(result.rms_translation_residual, 1e-9)
            self.assertEqual(result.samples, 10)

    def test_monte_carlo(self) -> None:
        rng = np.random.default_rng(1)
        rotation_errors = []
        translation_errors = []
        for _ in range(100):
            T_ic, T_sb = _statics(rng)
            # 0.5 deg RMS rotation noise, 0.2 mm position noise on every mocap pose
            samples = simulate_samples(
                T_ic, T_sb, 50, rng, rotation_noise_deg=0.5 / np.sqrt(3.0), translation_noise_m=0.2e-3, workspace_m=0.1
            )
            result = solve_statics(samples, verbose=0)
            for estimate, truth in ((result.T_ic, T_ic), (result.T_sb, T_sb)):
                translation_errors.append(np.linalg.norm(estimate.translation - truth.translation))
                rotation_errors.append(attitude_error(estimate.rotation, truth.rotation))
        self.assertLess(np.percentile(rotation_errors, 95), 0.5)
        self.assertLess(np.percentile(translation_errors, 95), 2e-3)

    def test_gauge_invariance(self) -> None:
        rng = np.random.default_rng(2)
        T_ic, T_sb = _statics(rng)
        samples = simulate_samples(T_ic, T_sb, 12, rng, rotation_noise_deg=0.3, translation_noise_m=1e-3)
        G = Pose(rotation=Rotation.random(random_state=rng).as_quat(), translation=[1.5, -2.0, 0.7])
        moved = [CalibSample(T_oi=G @ s.T_oi, T_os=G @ s.T_os, T_cb=s.T_cb) for s in samples]
        a = solve_statics(samples, verbose=0)
        b = solve_statics(moved, verbose=0)
        for x, y in ((a.T_ic, b.T_ic), (a.T_sb, b.T_sb)):
            angle, offset = pose_distance(x, y)
            self.assertLess(angle, 1e-9)
            self.assertLess(offset, 1e-9)
        self.assertAlmostEqual(a.rms_rotation_residual, b.rms_rotation_residual, delta=1e-9)
        self.assertAlmostEqual(a.rms_translation_residual, b.rms_translation_residual, delta=1e-9)

    def test_residuals_not_worse_than_truth(self) -> None:
        rng = np.random.default_rng(3)
        T_ic, T_sb = _statics(rng)
        samples = simulate_samples(T_ic, T_sb, 8, rng)
        result = solve_statics(samples, verbose=0)
        self.assertLessEqual(result.rms_rotation_residual, 1e-9)
        self.assertLessEqual(result.rms_translation_residual, 1e-9)

    def test_identical_motion(self) -> None:
        rng = np.random.default_rng(4)
        T_ic, T_sb = _statics(rng)
        sample = simulate_samples(T_ic, T_sb, 1, rng)[0]
        with self.assertRaises(InsufficientExcitation):
            solve_statics([sample] * 5, verbose=0)

    def test_single_axis_motion(self) -> None:
        rng = np.random.default_rng(5)
        T_ic, T_sb = _statics(rng)
        rig_rotations = [Rotation.from_rotvec([0.0, 0.0, a]).as_quat() for a in np.radians([0, 20, 40, 60, 80])]
        samples = simulate_samples(T_ic, T_sb, 5, rng, rig_rotations=rig_rotations)
        # the target rig moves too, so pin it to make the relative motion single axis
        pinned = [CalibSample(T_oi=s.T_oi, T_os=samples[0].T_os, T_cb=T_ic.inverse() @ s.T_oi.inverse() @ samples[0].T_os @ T_sb) for s in samples]
        with self.assertRaises(InsufficientExcitation):
            solve_statics(pinned, verbose=0)

    def test_too_few_samples(self) -> None:
        rng = np.random.default_rng(6)
        T_ic, T_sb = _statics(rng)
        with self.assertRaises(TooFewSamples):
            solve_statics(simulate_samples(T_ic, T_sb, 2, rng), verbose=0)


class TestCheckExcitation(unittest.TestCase):
    @staticmethod
    def _rig_motion(rotvecs_deg: list) -> list:
        """samples whose relative rig rotation A_k is the given rotation vector"""
        return [
            CalibSample(T_oi=Pose(), T_os=Pose(rotation=Rotation.from_rotvec(np.radians(v)).as_quat()), T_cb=Pose())
            for v in rotvecs_deg
        ]

    @staticmethod
    def _tilted(angle_deg: float, tilt_deg: float) -> np.ndarray:
        tilt = np.radians(tilt_deg)
        return angle_deg * np.array([0.0, np.sin(tilt), np.cos(tilt)])

    def test_axes_apart_from_each_other(self) -> None:
        # moving pairs turn about z and about z tilted by +-4 deg: only the two tilted axes are 8 deg apart
        samples = self._rig_motion([[0.0, 0.0, 0.0], [0.0, 0.0, 20.0], self._tilted(20.0, 4.0), self._tilted(20.0, -4.0)])
        check_excitation(samples)

    def test_axes_in_narrow_cone(self) -> None:
        samples = self._rig_motion([[0.0, 0.0, 0.0], [0.0, 0.0, 20.0], self._tilted(20.0, 2.0), self._tilted(20.0, -2.0)])
        with self.assertRaises(InsufficientExcitation):
            check_excitation(samples)

    def test_small_rotations(self) -> None:
        samples = self._rig_motion([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 2.0, 0.0]])
        with self.assertRaises(InsufficientExcitation):
            check_excitation(samples)


class TestApplyCalibration(unittest.TestCase):
    def test_identity(self) -> None:
        result = CalibResult(T_ic=Pose(), T_sb=Pose(), rms_rotation_residual=0.0, rms_translation_residual=0.0)
        T = Pose(rotation=Rotation.from_rotvec([0.1, 0.2, 0.3]).as_quat(), translation=[1.0, 2.0, 3.0])
        angle, offset = pose_distance(apply_calibration(result, T, T), Pose())
        self.assertLess(angle, 1e-12)
        self.assertLess(offset, 1e-9)

    def test_round_trip(self) -> None:
        rng = np.random.default_rng(7)
        T_ic, T_sb = _statics(rng)
        samples = simulate_samples(T_ic, T_sb, 10, rng)
        result = solve_statics(samples, verbose=0)
        G = Pose(rotation=Rotation.random(random_state=rng).as_quat(), translation=[3.0, 0.0, -1.0])
        for s in samples:
            for T_oi, T_os in ((s.T_oi, s.T_os), (G @ s.T_oi, G @ s.T_os)):
                angle, offset = pose_distance(apply_calibration(result, T_oi, T_os), s.T_cb)
                self.assertLess(angle, 1e-9)
                self.assertLess(offset, 1e-9)

    def test_nearest_rotation(self) -> None:
        R = Rotation.from_rotvec([0.3, -0.2, 0.1]).as_matrix()
        np.testing.assert_allclose(nearest_rotation(2.0 * R), R, atol=1e-12)
        reflected = nearest_rotation(-R)
        self.assertAlmostEqual(np.linalg.det(reflected), 1.0, places=12)


if __name__ == "__main__":
    unittest.main()

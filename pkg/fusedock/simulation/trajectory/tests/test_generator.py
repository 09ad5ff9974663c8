import unittest
import os
import shutil
import tempfile
import dataclasses

import numpy as np

from fusedock.utils.errors import ConfigInvalid, NonMonotonicPhases
from fusedock.utils.pose import Pose
from fusedock.simulation.trajectory import (
    TrajectoryConfig,
    RelativeSample,
    PIPerturbationTracker,
    default_configs,
    PI_OVERSHOOT,
    generate,
    phase_boundaries,
    write_trajectory_jsonl,
    read_trajectory_jsonl,
)
from fusedock.simulation.trajectory.generator import _acquisition_path


def _attitude_deg(pose: Pose) -> float:
    q = pose.rotation
    return float(np.degrees(2.0 * np.arctan2(np.linalg.norm(q[:3]), abs(q[3]))))


class TestTrajectoryGenerator(unittest.TestCase):
    def setUp(self) -> None:
        self.config = TrajectoryConfig(seed=3)
        self.samples = generate(self.config)

    def test_phase_two_duration(self) -> None:
        _, phase_2, _ = phase_boundaries(self.samples)
        duration = self.samples[phase_2[-1]].t - self.samples[phase_2[0]].t
        self.assertAlmostEqual(duration, (10.0 - 3.0) / 0.03, delta=1.0 / self.config.rate + 1e-9)

    def test_fixed_rate(self) -> None:
        t = np.array([s.t for s in self.samples])
        np.testing.assert_allclose(np.diff(t), 0.1, atol=1e-9)
        self.assertEqual(t[0], 0.0)

    def test_final_range(self) -> None:
        self.assertAlmostEqual(self.samples[-1].pose.translation[2], self.config.dock_range, places=12)
        np.testing.assert_array_equal(self.samples[-1].pose.translation[:2], [0.0, 0.0])

    def test_phase_one_holds_range(self) -> None:
        phase_1, _, _ = phase_boundaries(self.samples)
        for i in phase_1:
            self.assertEqual(self.samples[i].pose.translation[2], self.config.start_range)
            self.assertEqual(_attitude_deg(self.samples[i].pose), 0.0)
        radius = np.linalg.norm(self.samples[0].pose.translation[:2])
        self.assertGreaterEqual(radius, 1.0 - 1e-12)
        self.assertLessEqual(radius, 2.0 + 1e-12)

    def test_phase_two_bounds(self) -> None:
        _, phase_2, _ = phase_boundaries(self.samples)
        ranges = [self.samples[i].pose.translation[2] for i in phase_2]
        self.assertTrue(np.all(np.diff(ranges) <= self.config.perturb_vel / self.config.rate))
        for i in phase_2:
            pose = self.samples[i].pose
            self.assertLessEqual(_attitude_deg(pose), 3 * self.config.perturb_att * 1.5)
            self.assertLessEqual(np.abs(pose.translation[:2]).max(), self.config.perturb_pos * 1.5)

    def test_step_length(self) -> None:
        c = self.config
        allowance = (max(c.acq_speed[1], c.forced_speed + 1.5 * c.perturb_vel)) / c.rate + 3.0 * np.sqrt(2.0) * c.perturb_pos
        positions = np.array([s.pose.translation for s in self.samples])
        steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
        self.assertLessEqual(steps.max(), allowance)

    def test_no_perturbation(self) -> None:
        samples = generate(dataclasses.replace(self.config, perturb_prob=0.0))
        _, phase_2, _ = phase_boundaries(samples)
        for i in phase_2:
            np.testing.assert_array_equal(samples[i].pose.translation[:2], [0.0, 0.0])
            np.testing.assert_array_equal(samples[i].pose.rotation, [0.0, 0.0, 0.0, 1.0])

    def test_determinism(self) -> None:
        again = generate(TrajectoryConfig(seed=3))
        self.assertEqual(len(again), len(self.samples))
        for a, b in zip(again, self.samples):
            self.assertEqual(a, b)
        other = generate(TrajectoryConfig(seed=4))
        self.assertNotEqual(other[0].pose, self.samples[0].pose)

    def test_default_durations(self) -> None:
        base = self.config
        durations = np.array([generate(c)[-1].t / 60.0 for c in default_configs(seed=100, count=100)])
        self.assertGreaterEqual(durations.mean(), 3.5)
        self.assertLessEqual(durations.mean(), 6.5)
        # longest acquisition: wp1 -> wp2 on opposite sides of the axis, then back to the axis, at the slowest speed
        longest_acquisition = 3.0 * base.waypoint_radius[1] / base.acq_speed[0]
        closure = (base.start_range - base.dock_range) / base.forced_speed + base.alignment_time
        ceiling = (longest_acquisition + closure + 5.0) / 60.0
        self.assertGreaterEqual(durations.min(), 3.5)
        self.assertLessEqual(durations.max(), ceiling)

    def test_waypoint_azimuth_covers_circle(self) -> None:
        config = default_configs(seed=0, count=1)[0]
        deltas = []
        for seed in range(2000):
            vertices, _ = _acquisition_path(config, np.random.default_rng(seed))
            azimuths = np.arctan2(vertices[:2, 1], vertices[:2, 0])
            deltas.append(np.angle(np.exp(1j * (azimuths[1] - azimuths[0]))))
        deltas = np.degrees(deltas)
        self.assertGreater(np.abs(deltas).max(), 170.0)
        self.assertLess(deltas.min(), -170.0)
        self.assertGreater(deltas.max(), 170.0)
        # uniform on the circle: each half holds about half of the draws
        self.assertAlmostEqual(np.mean(np.abs(deltas) > 90.0), 0.5, delta=0.05)

    def test_phase_two_never_reverses(self) -> None:
        for config in default_configs(seed=200, count=20):
            samples = generate(dataclasses.replace(config, perturb_prob=0.5))
            _, phase_2, _ = phase_boundaries(samples)
            ranges = np.array([samples[i].pose.translation[2] for i in phase_2])
            self.assertTrue(np.all(np.diff(ranges) <= 0.0))

    def test_perturb_vel_overshoot_bound(self) -> None:
        TrajectoryConfig(perturb_vel=0.019).validate()
        with self.assertRaises(ConfigInvalid):
            TrajectoryConfig(perturb_vel=0.025).validate()
        with self.assertRaises(ConfigInvalid):
            generate(TrajectoryConfig(forced_speed=0.003, perturb_vel=0.002))

    def test_static_misalignment(self) -> None:
        config = dataclasses.replace(self.config, mode="static-misalignment")
        samples = generate(config)
        _, phase_2, phase_3 = phase_boundaries(samples)
        # the offset is constant once the controller has settled
        late = [samples[i].pose for i in phase_2[-50:]]
        offsets = np.array([p.translation[:2] for p in late])
        np.testing.assert_allclose(offsets, np.repeat(offsets[:1], len(offsets), axis=0), atol=1e-9)
        self.assertGreater(np.abs(offsets[0]).max(), 0.0)
        # corrected in phase 3
        self.assertEqual(_attitude_deg(samples[phase_3[-1]].pose), 0.0)

    def test_invalid_config(self) -> None:
        with self.assertRaises(ConfigInvalid):
            generate(TrajectoryConfig(handover_range=20.0))
        with self.assertRaises(ConfigInvalid):
            generate(TrajectoryConfig(perturb_prob=1.5))
        with self.assertRaises(ConfigInvalid):
            generate(TrajectoryConfig(mode="spiral"))


class TestPerturbationTracker(unittest.TestCase):
    def test_event_frequency(self) -> None:
        tracker = PIPerturbationTracker(bounds=[0.002, 0.01, 0.01, 0.1, 0.1, 0.1], prob=0.1, kp=0.8, ki=0.1)
        rng = np.random.default_rng(0)
        events = 0
        peak = np.zeros(6)
        for _ in range(100000):
            events += tracker.draw(rng)
            peak = np.maximum(peak, np.abs(tracker.track()))
            self.assertTrue(np.all(np.abs(tracker.setpoint) <= [0.002, 0.01, 0.01, 0.1, 0.1, 0.1]))
        self.assertAlmostEqual(events / 100000, 0.1, delta=0.01)
        self.assertTrue(np.all(peak <= PI_OVERSHOOT * np.array([0.002, 0.01, 0.01, 0.1, 0.1, 0.1])))

    def test_step_response(self) -> None:
        tracker = PIPerturbationTracker(bounds=[1.0], prob=1.0, kp=0.8, ki=0.1)
        tracker.setpoint = np.array([1.0])
        response = [float(tracker.track()[0]) for _ in range(60)]
        self.assertLess(max(response), 1.2)
        self.assertAlmostEqual(response[-1], 1.0, delta=0.01)


class TestPhaseBoundaries(unittest.TestCase):
    def _samples(self, phases: list) -> list:
        return [RelativeSample(t=0.1 * i, pose=Pose(), phase=p) for i, p in enumerate(phases)]

    def test_single_phase(self) -> None:
        b = phase_boundaries(self._samples([1, 1, 1]))
        self.assertEqual(b, (range(0, 3), range(3, 3), range(3, 3)))

    def test_generated(self) -> None:
        for r in phase_boundaries(generate(TrajectoryConfig(seed=11))):
            self.assertGreater(len(r), 0)

    def test_non_monotonic(self) -> None:
        with self.assertRaises(NonMonotonicPhases):
            phase_boundaries(self._samples([1, 3, 2]))


class TestTrajectoryIO(unittest.TestCase):
    def setUp(self) -> None:
        self.root = tempfile.mkdtemp()

    def test_round_trip(self) -> None:
        samples = generate(TrajectoryConfig(seed=5))
        path = os.path.join(self.root, "trajectory.jsonl")
        write_trajectory_jsonl(samples, path)
        loaded = read_trajectory_jsonl(path)
        self.assertEqual(len(loaded), len(samples))
        for a, b in zip(loaded, samples):
            self.assertEqual(a.t, b.t)
            self.assertEqual(a.phase, b.phase)
            np.testing.assert_allclose(a.pose.to_array(), b.pose.to_array(), atol=1e-15)

        with open(path, "rb") as f:
            first = f.read()
        write_trajectory_jsonl(generate(TrajectoryConfig(seed=5)), path)
        with open(path, "rb") as f:
            self.assertEqual(f.read(), first)

    def tearDown(self) -> None:
        shutil.rmtree(self.root)


if __name__ == "__main__":
    unittest.main()

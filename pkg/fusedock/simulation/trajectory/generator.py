"""
Three phase relative docking trajectories T_bt(τ), sampled at a fixed rate.

Camera frame = service body frame: +z along the line of sight. With an aligned attitude the target frame
axes coincide with the camera axes, the docking axis is +z, the cross-track offset is (tx, ty) and the
along-track range is tz.

    phase 1 - acquisition: range held, cross-track sweep wp1 -> wp2 -> axis
    phase 2 - forced motion: closure at constant speed with PI-tracked random setpoint errors
    phase 3 - alignment then final closure to the docking range
"""

from dataclasses import dataclass
from typing import List, Tuple
import math

import numpy as np
from scipy.spatial.transform import Rotation

from fusedock.utils.errors import NonMonotonicPhases
from fusedock.utils.pose import Pose
from fusedock.simulation.trajectory.config import TrajectoryConfig

PHASE_SUBSTREAMS = 3


@dataclass(frozen=True)
class RelativeSample:
    t: float
    pose: Pose
    phase: int


class PIPerturbationTracker:
    """
    Per-axis discrete PI controller that makes the state follow randomly drawn setpoint errors.
    Channels: [along-track speed, cross-track x, cross-track y, attitude x, attitude y, attitude z].
    """

    def __init__(self, bounds: np.ndarray, prob: float, kp: float, ki: float):
        self._bounds = np.asarray(bounds, dtype=np.float64)
        self._prob = prob
        self._kp = kp
        self._ki = ki
        self.setpoint = np.zeros(len(self._bounds))
        self.state = np.zeros(len(self._bounds))
        self._integral = np.zeros(len(self._bounds))

    def draw(self, rng: np.random.Generator) -> bool:
        """with probability prob, replaces the setpoint by a new uniform draw within ±bounds"""
        event = bool(rng.random() < self._prob)
        if event:
            self.setpoint = rng.uniform(-self._bounds, self._bounds)
        return event

    def track(self) -> np.ndarray:
        error = self.setpoint - self.state
        self._integral += error
        self.state = self.state + self._kp * error + self._ki * self._integral
        return self.state


def _phase_rngs(seed: int) -> List[np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(PHASE_SUBSTREAMS)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def _make_pose(cross_track: np.ndarray, along_track: float, attitude_deg: np.ndarray) -> Pose:
    if np.any(attitude_deg != 0):
        rotation = Rotation.from_euler("xyz", attitude_deg, degrees=True).as_quat()
    else:
        rotation = np.array([0.0, 0.0, 0.0, 1.0])
    return Pose(rotation=rotation, translation=[cross_track[0], cross_track[1], along_track])


def _acquisition_path(config: TrajectoryConfig, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    :return: the path vertices (wp1, wp2, axis) and the speed of each of the two legs
    """
    r1, r2 = rng.uniform(*config.waypoint_radius, size=2)
    azimuth_1 = rng.uniform(0.0, 2.0 * math.pi)
    azimuth_2 = rng.uniform(0.0, 2.0 * math.pi)
    speeds = rng.uniform(*config.acq_speed, size=2)
    vertices = np.array(
        [
            [r1 * math.cos(azimuth_1), r1 * math.sin(azimuth_1)],
            [r2 * math.cos(azimuth_2), r2 * math.sin(azimuth_2)],
            [0.0, 0.0],
        ]
    )
    return vertices, speeds


def _path_position(vertices: np.ndarray, speeds: np.ndarray, t: float) -> np.ndarray:
    for leg in range(len(speeds)):
        start, end = vertices[leg], vertices[leg + 1]
        leg_duration = np.linalg.norm(end - start) / speeds[leg]
        if t < leg_duration:
            return start + (end - start) * (t / leg_duration)
        t -= leg_duration
    return vertices[-1].copy()


def generate(config: TrajectoryConfig) -> List[RelativeSample]:
    """
    Generates a full relative trajectory. Deterministic for a given config.
    """
    config.validate()
    dt = 1.0 / config.rate
    rng_acquisition, rng_forced, _ = _phase_rngs(config.seed)
    no_attitude = np.zeros(3)

    samples: List[RelativeSample] = []

    def add(cross_track: np.ndarray, along_track: float, attitude: np.ndarray, phase: int) -> None:
        k = len(samples)
        samples.append(RelativeSample(t=k / config.rate, pose=_make_pose(cross_track, along_track, attitude), phase=phase))

    # phase 1
    vertices, speeds = _acquisition_path(config, rng_acquisition)
    duration = sum(np.linalg.norm(vertices[i + 1] - vertices[i]) / speeds[i] for i in range(2))
    n_acquisition = max(1, int(math.ceil(duration * config.rate - 1e-9)))
    for k in range(n_acquisition):
        add(_path_position(vertices, speeds, k * dt), config.start_range, no_attitude, 1)

    # phase 2
    along_track = config.start_range
    if config.mode == "nominal":
        tracker = PIPerturbationTracker(
            bounds=[config.perturb_vel, config.perturb_pos, config.perturb_pos] + [config.perturb_att] * 3,
            prob=config.perturb_prob,
            kp=config.pi_kp,
            ki=config.pi_ki,
        )
    else:
        tracker = PIPerturbationTracker(
            bounds=[0.0, config.static_pos, config.static_pos] + [config.static_att] * 3,
            prob=1.0,
            kp=config.pi_kp,
            ki=config.pi_ki,
        )
        tracker.draw(rng_forced)

    add(np.zeros(2), along_track, no_attitude, 2)
    while along_track > config.handover_range:
        if config.mode == "nominal":
            tracker.draw(rng_forced)
        offsets = tracker.track()
        speed = max(config.forced_speed + offsets[0], 0.0)
        along_track = max(along_track - speed * dt, config.handover_range)
        add(offsets[1:3], along_track, offsets[3:6], 2)

    # phase 3 - alignment, then closure
    residual_cross_track = samples[-1].pose.translation[:2].copy()
    residual_attitude = tracker.state[3:6].copy()
    n_alignment = int(round(config.alignment_time * config.rate))
    for k in range(1, n_alignment + 1):
        fraction = 1.0 - k / n_alignment
        add(residual_cross_track * fraction, config.handover_range, residual_attitude * fraction, 3)

    while along_track > config.dock_range:
        along_track = max(along_track - config.forced_speed * dt, config.dock_range)
        add(np.zeros(2), along_track, no_attitude, 3)

    return samples


def phase_boundaries(samples: List[RelativeSample]) -> Tuple[range, range, range]:
    """
    :return: contiguous index ranges of phases 1, 2 and 3 (empty ranges for missing phases)
    """
    if len(samples) == 0:
        raise NonMonotonicPhases("cannot compute phase boundaries of an empty sample list")
    phases = [s.phase for s in samples]
    for i, phase in enumerate(phases):
        if phase not in (1, 2, 3):
            raise NonMonotonicPhases(f"sample {i} has invalid phase {phase}")
        if i > 0 and phase < phases[i - 1]:
            raise NonMonotonicPhases(f"phase decreases from {phases[i - 1]} to {phase} at sample {i}")

    bounds = []
    start = 0
    for phase in (1, 2, 3):
        stop = start
        while stop < len(phases) and phases[stop] == phase:
            stop += 1
        bounds.append(range(start, stop))
        start = stop
    return bounds[0], bounds[1], bounds[2]

"""
Recovery of the two static transforms of a motion-capture ground truth setup.

Frames: o mocap global, i camera rig markers, s target markers, c camera, b target body.
Every sample k relates the measured rig poses to an observed camera-frame target pose:

    A_k Y = X B_k,    A_k = T_oi⁻¹ T_os,  X = T_ic,  Y = T_sb,  B_k = T_cb
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import itertools
import logging

import numpy as np
from scipy.spatial.transform import Rotation

from fusedock.utils.errors import InsufficientExcitation, TooFewSamples
from fusedock.utils.pose import Pose

lgr = logging.getLogger("Fuse")

MIN_SAMPLES = 3
MIN_RELATIVE_ROTATION_DEG = 5.0
MIN_AXIS_SEPARATION_DEG = 5.0


@dataclass(frozen=True)
class CalibSample:
    T_oi: Pose
    T_os: Pose
    T_cb: Pose

    @property
    def A(self) -> Pose:
        return self.T_oi.inverse() @ self.T_os


@dataclass(frozen=True)
class CalibResult:
    T_ic: Pose
    T_sb: Pose
    rms_rotation_residual: float  # deg
    rms_translation_residual: float  # m
    samples: int = 0

    def to_dict(self) -> dict:
        return dict(
            T_ic=self.T_ic.to_list(),
            T_sb=self.T_sb.to_list(),
            rms_rotation_residual_deg=self.rms_rotation_residual,
            rms_translation_residual_m=self.rms_translation_residual,
            samples=self.samples,
        )

    @staticmethod
    def from_dict(values: dict) -> "CalibResult":
        return CalibResult(
            T_ic=Pose.from_array(values["T_ic"]),
            T_sb=Pose.from_array(values["T_sb"]),
            rms_rotation_residual=float(values["rms_rotation_residual_deg"]),
            rms_translation_residual=float(values["rms_translation_residual_m"]),
            samples=int(values.get("samples", 0)),
        )


def nearest_rotation(M: np.ndarray) -> np.ndarray:
    """orthogonal polar projection, det forced to +1"""
    U, _, Vt = np.linalg.svd(M)
    D = np.diag([1.0, 1.0, np.sign(np.linalg.det(U @ Vt))])
    return U @ D @ Vt


def check_excitation(samples: Sequence[CalibSample]) -> None:
    """
    Requires relative rig rotations of at least 5 deg about at least two axes 5 deg apart.
    """
    R_A = np.stack([s.A.dcm for s in samples])
    i, j = np.array(list(itertools.combinations(range(len(samples)), 2))).T
    relative = np.einsum("nab,ncb->nac", R_A[j], R_A[i])
    rotvecs = Rotation.from_matrix(relative).as_rotvec()
    angles = np.linalg.norm(rotvecs, axis=1)
    moving = np.degrees(angles) >= MIN_RELATIVE_ROTATION_DEG
    if not np.any(moving):
        raise InsufficientExcitation(f"no pair of samples differs by {MIN_RELATIVE_ROTATION_DEG} deg of rotation")
    axes = rotvecs[moving] / angles[moving, None]
    threshold = np.sin(np.radians(MIN_AXIS_SEPARATION_DEG))
    # any pair of axes, row by row to keep memory linear in the number of pairs
    if not any(np.any(np.linalg.norm(np.cross(axis, axes[k + 1 :]), axis=1) >= threshold) for k, axis in enumerate(axes)):
        raise InsufficientExcitation("all relative rotations share one axis")


def solve_rotations(R_A: Sequence[np.ndarray], R_B: Sequence[np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Least squares solution of R_A R_Y = R_X R_B over all samples.

    Column major vectorisation turns every sample into 9 homogeneous equations
    (I ⊗ R_A) vec(R_Y) - (R_Bᵀ ⊗ I) vec(R_X) = 0; the stacked system's null vector
    gives R_X, R_Y up to a common scale, fixed by det(R_X) = 1 before projecting to SO(3).
    """
    I3 = np.eye(3)
    rows = [np.hstack([-np.kron(Rb.T, I3), np.kron(I3, Ra)]) for Ra, Rb in zip(R_A, R_B)]
    M = np.vstack(rows)
    _, singular_values, Vt = np.linalg.svd(M)
    if singular_values[-2] <= 1e-9 * singular_values[0]:
        raise InsufficientExcitation("rotation equations do not determine a unique solution")
    v = Vt[-1]
    X = v[:9].reshape(3, 3, order="F")
    Y = v[9:].reshape(3, 3, order="F")
    det = np.linalg.det(X)
    scale = np.sign(det) / abs(det) ** (1.0 / 3.0)
    return nearest_rotation(scale * X), nearest_rotation(scale * Y)


def solve_translations(
    R_A: Sequence[np.ndarray], t_A: Sequence[np.ndarray], t_B: Sequence[np.ndarray], R_X: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """R_A t_Y + t_A = R_X t_B + t_X, stacked and solved for [t_X, t_Y] in the least squares sense"""
    lhs = np.vstack([np.hstack([-np.eye(3), Ra]) for Ra in R_A])
    rhs = np.concatenate([R_X @ tb - ta for ta, tb in zip(t_A, t_B)])
    solution, _, _, _ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return solution[:3], solution[3:]


def residuals(samples: Sequence[CalibSample], X: Pose, Y: Pose) -> Tuple[float, float]:
    """:return: RMS rotation angle [deg] and RMS translation norm [m] of A_k Y (X B_k)⁻¹"""
    angles = []
    offsets = []
    for s in samples:
        E = (s.A @ Y) @ (X @ s.T_cb).inverse()
        angles.append(np.degrees(np.linalg.norm(Rotation.from_quat(E.rotation).as_rotvec())))
        offsets.append(np.linalg.norm(E.translation))
    return float(np.sqrt(np.mean(np.square(angles)))), float(np.sqrt(np.mean(np.square(offsets))))


def solve_statics(samples: Sequence[CalibSample], verbose: int = 1) -> CalibResult:
    if len(samples) < MIN_SAMPLES:
        raise TooFewSamples(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    check_excitation(samples)

    A = [s.A for s in samples]
    R_A = [a.dcm for a in A]
    R_B = [s.T_cb.dcm for s in samples]
    R_X, R_Y = solve_rotations(R_A, R_B)
    t_X, t_Y = solve_translations(R_A, [a.translation for a in A], [s.T_cb.translation for s in samples], R_X)

    X = Pose.from_dcm(R_X, t_X)
    Y = Pose.from_dcm(R_Y, t_Y)
    rms_rot, rms_trans = residuals(samples, X, Y)
    if verbose > 0:
        lgr.info(f"calibrated from {len(samples)} samples: rms residual {rms_rot:.4f} deg, {1000 * rms_trans:.3f} mm")
    return CalibResult(T_ic=X, T_sb=Y, rms_rotation_residual=rms_rot, rms_translation_residual=rms_trans, samples=len(samples))


def apply_calibration(result: CalibResult, T_oi: Pose, T_os: Pose) -> Pose:
    """calibrated target body pose in the camera frame: T_ic⁻¹ T_oi⁻¹ T_os T_sb"""
    return result.T_ic.inverse() @ T_oi.inverse() @ T_os @ result.T_sb


def simulate_samples(
    T_ic: Pose,
    T_sb: Pose,
    count: int,
    rng: np.random.Generator,
    rotation_noise_deg: float = 0.0,
    translation_noise_m: float = 0.0,
    workspace_m: float = 0.3,
    rig_rotations: Optional[List[np.ndarray]] = None,
) -> List[CalibSample]:
    """
    Synthetic calibration session: random rig poses within the workspace, the matching
    camera observation T_cb, and Gaussian measurement noise on the two mocap poses.

    :param rig_rotations: optional fixed rig attitudes (quaternions), random when None
    """

    def noisy(pose: Pose) -> Pose:
        if rotation_noise_deg == 0.0 and translation_noise_m == 0.0:
            return pose
        delta_rot = Rotation.from_rotvec(np.radians(rotation_noise_deg) * rng.standard_normal(3))
        delta = Pose(rotation=delta_rot.as_quat(), translation=translation_noise_m * rng.standard_normal(3))
        return Pose(rotation=(delta @ Pose(rotation=pose.rotation)).rotation, translation=pose.translation + delta.translation)

    samples = []
    for k in range(count):
        q_i = rig_rotations[k] if rig_rotations is not None else Rotation.random(random_state=rng).as_quat()
        T_oi = Pose(rotation=q_i, translation=rng.uniform(-workspace_m, workspace_m, 3))
        T_os = Pose(rotation=Rotation.random(random_state=rng).as_quat(), translation=rng.uniform(-workspace_m, workspace_m, 3))
        T_cb = T_ic.inverse() @ T_oi.inverse() @ T_os @ T_sb
        samples.append(CalibSample(T_oi=noisy(T_oi), T_os=noisy(T_os), T_cb=T_cb))
    return samples

from dataclasses import dataclass, field
from typing import Sequence
import numpy as np

from fusedock.utils.pose.rotations import (
    normalize_quat,
    quat_multiply,
    quat_conjugate,
    quat_to_dcm,
    dcm_to_quat,
)


def _frozen(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.float64)
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class Pose:
    """
    Rigid transform T_ab mapping frame b coordinates into frame a: p_a = R(rotation) @ p_b + translation.
    Immutable value type.

    Serialized as 7 numbers [tx, ty, tz, qx, qy, qz, qw].
    """

    rotation: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 0.0, 1.0]))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        q = normalize_quat(self.rotation)
        t = np.asarray(self.translation, dtype=np.float64).reshape(3)
        object.__setattr__(self, "rotation", _frozen(q))
        object.__setattr__(self, "translation", _frozen(t))

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @staticmethod
    def from_dcm(R: np.ndarray, translation: Sequence[float]) -> "Pose":
        return Pose(rotation=dcm_to_quat(R), translation=np.asarray(translation))

    @staticmethod
    def from_array(values: Sequence[float]) -> "Pose":
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (7,):
            raise Exception(f"expected 7 pose values [tx,ty,tz,qx,qy,qz,qw], got shape {values.shape}")
        return Pose(rotation=values[3:], translation=values[:3])

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation])

    def to_list(self) -> list:
        return [float(v) for v in self.to_array()]

    @property
    def dcm(self) -> np.ndarray:
        return quat_to_dcm(self.rotation)

    def compose(self, other: "Pose") -> "Pose":
        """self ∘ other: applies other first, then self"""
        rotation = quat_multiply(self.rotation, other.rotation)
        translation = self.dcm @ other.translation + self.translation
        return Pose(rotation=rotation, translation=translation)

    def __matmul__(self, other: "Pose") -> "Pose":
        return self.compose(other)

    def inverse(self) -> "Pose":
        q_inv = quat_conjugate(self.rotation)
        return Pose(rotation=q_inv, translation=-(quat_to_dcm(q_inv) @ self.translation))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transforms a 3-vector or an N x 3 array of points"""
        points = np.asarray(points, dtype=np.float64)
        return points @ self.dcm.T + self.translation

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pose):
            return NotImplemented
        return bool(
            np.array_equal(self.rotation, other.rotation)
            and np.array_equal(self.translation, other.translation)
        )

    def __hash__(self) -> int:
        return hash(self.to_array().tobytes())

    def __repr__(self) -> str:
        return f"Pose(t={self.translation.tolist()}, q={self.rotation.tolist()})"


def pose_distance(a: Pose, b: Pose) -> tuple:
    """(rotation angle in radians, translation norm) of a ∘ b⁻¹"""
    delta = a.compose(b.inverse())
    angle = 2.0 * np.arctan2(np.linalg.norm(delta.rotation[:3]), abs(delta.rotation[3]))
    return float(angle), float(np.linalg.norm(delta.translation))

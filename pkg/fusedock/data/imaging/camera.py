from dataclasses import dataclass
from typing import Optional
import math

import numpy as np

from fusedock.utils.errors import BadFov
from fusedock.utils.pose import Pose

MIN_DEPTH_M = 1e-6

# vision based sensor of the hardware campaign
NATIVE_WIDTH = 744
NATIVE_HEIGHT = 480
NATIVE_HFOV_DEG = 65.6
NATIVE_VFOV_DEG = 44.7


@dataclass(frozen=True)
class CameraIntrinsics:
    width: int
    height: int
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self) -> None:
        if not (self.fx > 0 and self.fy > 0 and 0 < self.cx < self.width and 0 < self.cy < self.height):
            raise BadFov(f"invalid camera intrinsics {self}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def scaled(self, factor: int) -> "CameraIntrinsics":
        """intrinsics of the same camera with the image downscaled by an integer factor"""
        return CameraIntrinsics(
            width=self.width // factor,
            height=self.height // factor,
            fx=self.fx / factor,
            fy=self.fy / factor,
            cx=self.cx / factor,
            cy=self.cy / factor,
        )

    def to_dict(self) -> dict:
        return dict(width=self.width, height=self.height, fx=self.fx, fy=self.fy, cx=self.cx, cy=self.cy)

    def to_array(self) -> np.ndarray:
        """[width, height, fx, fy, cx, cy]"""
        return np.array([self.width, self.height, self.fx, self.fy, self.cx, self.cy], dtype=np.float64)

    @staticmethod
    def from_array(values: np.ndarray) -> "CameraIntrinsics":
        w, h, fx, fy, cx, cy = (float(v) for v in values)
        return CameraIntrinsics(width=int(round(w)), height=int(round(h)), fx=fx, fy=fy, cx=cx, cy=cy)

    @staticmethod
    def from_dict(d: dict) -> "CameraIntrinsics":
        return CameraIntrinsics(
            width=int(d["width"]),
            height=int(d["height"]),
            fx=float(d["fx"]),
            fy=float(d["fy"]),
            cx=float(d["cx"]),
            cy=float(d["cy"]),
        )


def intrinsics_from_fov(width: int, height: int, hfov: float, vfov: float) -> CameraIntrinsics:
    """
    :param hfov: horizontal field of view [deg]
    :param vfov: vertical field of view [deg]
    """
    for name, fov in (("hfov", hfov), ("vfov", vfov)):
        if not 0.0 < fov < 180.0:
            raise BadFov(f"{name} must be in (0, 180) deg, got {fov}")
    return CameraIntrinsics(
        width=int(width),
        height=int(height),
        fx=width / (2.0 * math.tan(math.radians(hfov) / 2.0)),
        fy=height / (2.0 * math.tan(math.radians(vfov) / 2.0)),
        cx=width / 2.0,
        cy=height / 2.0,
    )


def native_intrinsics() -> CameraIntrinsics:
    return intrinsics_from_fov(NATIVE_WIDTH, NATIVE_HEIGHT, NATIVE_HFOV_DEG, NATIVE_VFOV_DEG)


def project(K: CameraIntrinsics, pose: Pose, point: np.ndarray) -> Optional[np.ndarray]:
    """
    Pinhole projection of a target frame point.
    :return: pixel coordinates (u, v), or None when the point is behind the camera
    """
    p_c = pose.apply(np.asarray(point, dtype=np.float64))
    if p_c[2] <= MIN_DEPTH_M:
        return None
    return np.array([K.fx * p_c[0] / p_c[2] + K.cx, K.fy * p_c[1] / p_c[2] + K.cy])


def project_points(K: CameraIntrinsics, points_c: np.ndarray) -> np.ndarray:
    """
    Projects N x 3 camera frame points; rows behind the camera are NaN.
    """
    points_c = np.asarray(points_c, dtype=np.float64)
    z = points_c[:, 2]
    visible = z > MIN_DEPTH_M
    uv = np.full((len(points_c), 2), np.nan)
    uv[visible, 0] = K.fx * points_c[visible, 0] / z[visible] + K.cx
    uv[visible, 1] = K.fy * points_c[visible, 1] / z[visible] + K.cy
    return uv

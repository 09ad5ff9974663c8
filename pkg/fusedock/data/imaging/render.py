"""
Proxy rasterizer for the berthing fixture: flat shaded triangles, back-face culling and painter's algorithm.
"""

from dataclasses import dataclass, field
from typing import Sequence, Optional
import math

import cv2
import numpy as np

from fusedock.utils.errors import ConfigInvalid, FixtureNotVisible
from fusedock.utils.pose import Pose
from fusedock.data.imaging.camera import CameraIntrinsics, MIN_DEPTH_M, project_points
from fusedock.data.imaging.fixture import FixtureModel, default_fixture
from fusedock.data.imaging.backgrounds import background, BACKGROUND_MODES

AMBIENT = 0.15
# fixed point bits used for subpixel polygon vertices
SUBPIXEL_SHIFT = 4


@dataclass(frozen=True)
class RenderSettings:
    background: str = "black"
    sun_direction: Sequence[float] = field(default=(0.0, 0.0, 1.0))  # unit vector in the camera frame
    seed: int = 0

    def __post_init__(self) -> None:
        if self.background not in BACKGROUND_MODES:
            raise ConfigInvalid(f"background must be one of {BACKGROUND_MODES}, got {self.background}")
        norm = float(np.linalg.norm(self.sun_direction))
        if abs(norm - 1.0) > 1e-6:
            raise ConfigInvalid(f"sun direction must be a unit vector, got norm {norm}")


def sun_from_elevation(elevation_deg: float, azimuth_deg: float = 0.0) -> np.ndarray:
    """
    Direction towards the sun in the target frame, elevation measured from the fixture plane on the approach side.
    0 and 180 deg graze the plate from opposite edges, 90 deg shines straight onto it from behind the chaser.
    """
    el = math.radians(elevation_deg)
    az = math.radians(azimuth_deg)
    s = np.array([0.0, -math.cos(el), -math.sin(el)])
    rot_z = np.array([[math.cos(az), -math.sin(az), 0.0], [math.sin(az), math.cos(az), 0.0], [0.0, 0.0, 1.0]])
    return rot_z @ s


def sun_in_camera(pose: Pose, sun_target: np.ndarray) -> np.ndarray:
    s = pose.dcm @ np.asarray(sun_target, dtype=np.float64)
    return s / np.linalg.norm(s)


def shade(albedo: np.ndarray, normals: np.ndarray, sun: np.ndarray) -> np.ndarray:
    """flat Lambertian shade with ambient term, F x 3 uint8 levels"""
    lambert = np.maximum(0.0, normals @ np.asarray(sun, dtype=np.float64))
    intensity = np.clip(albedo * (lambert + AMBIENT)[:, None], 0.0, 1.0)
    return np.rint(intensity * 255.0).astype(np.uint8)


def render(
    K: CameraIntrinsics, pose: Pose, fixture: Optional[FixtureModel] = None, settings: Optional[RenderSettings] = None
) -> np.ndarray:
    """
    :param pose: T_bt, target to camera frame
    :return: height x width x 3 uint8 RGB image
    """
    if fixture is None:
        fixture = default_fixture()
    if settings is None:
        settings = RenderSettings()

    vertices_c = pose.apply(fixture.vertices)
    if not np.any(vertices_c[:, 2] > 0.0):
        raise FixtureNotVisible(f"fixture is entirely behind the camera (pose {pose.to_list()})")

    img = np.array(background(K.width, K.height, settings.background, settings.seed))

    faces_c = vertices_c[fixture.faces]  # F x 3 x 3
    normals_c = fixture.normals @ pose.dcm.T
    centroids_c = faces_c.mean(axis=1)

    in_front = np.all(faces_c[:, :, 2] > MIN_DEPTH_M, axis=1)
    facing = np.einsum("ij,ij->i", normals_c, centroids_c) < 0.0
    visible = np.flatnonzero(in_front & facing)
    if len(visible) == 0:
        return img

    colors = shade(fixture.albedo[visible], normals_c[visible], settings.sun_direction)
    # far to near
    order = np.argsort(-centroids_c[visible, 2], kind="stable")

    uv = project_points(K, faces_c[visible].reshape(-1, 3)).reshape(-1, 3, 2)
    uv_fixed = np.rint(uv * (1 << SUBPIXEL_SHIFT)).astype(np.int64)
    # keep coordinates inside the range cv2 accepts
    limit = (1 << 28) - 1
    uv_fixed = np.clip(uv_fixed, -limit, limit).astype(np.int32)

    for k in order:
        color = tuple(int(c) for c in colors[k])
        cv2.fillConvexPoly(img, uv_fixed[k], color, lineType=cv2.LINE_8, shift=SUBPIXEL_SHIFT)
    return img

"""
Training time image augmentation.
Photometric changes leave the label untouched; the perspective warp moves the label along with the image.
"""

from dataclasses import dataclass, field
from typing import Tuple

import cv2
import numpy as np
from scipy.spatial.transform import Rotation

from fusedock.utils.errors import PlaneBehindCamera
from fusedock.utils.pose import Pose
from fusedock.data.imaging.camera import CameraIntrinsics

APPLY_PROB = 0.5


@dataclass
class PhotometricStrength:
    brightness: float = 25.0  # max offset [intensity levels]
    contrast: float = 0.2  # max relative gain deviation
    colour: float = 0.1  # max per channel relative gain deviation
    noise: float = 5.0  # max std of the additive noise [intensity levels]
    blur: int = 1  # max box blur radius [px]

    @staticmethod
    def zero() -> "PhotometricStrength":
        return PhotometricStrength(brightness=0.0, contrast=0.0, colour=0.0, noise=0.0, blur=0)


@dataclass
class WarpLimits:
    shift_px: float = 5.0
    in_plane_deg: float = 5.0
    off_plane_deg: float = 3.0


@dataclass
class PhotometricParams:
    """drawn photometric perturbation; an effect that was not selected holds its neutral value"""

    brightness: float = 0.0
    contrast: float = 1.0
    colour: np.ndarray = field(default_factory=lambda: np.ones(3))
    blur_ksize: int = 1
    noise_std: float = 0.0


def draw_photometric_params(rng: np.random.Generator, strength: PhotometricStrength) -> PhotometricParams:
    # every draw happens regardless of the selection so that the stream layout does not depend on it
    apply = rng.random(5) < APPLY_PROB
    brightness = rng.uniform(-strength.brightness, strength.brightness)
    contrast = 1.0 + rng.uniform(-strength.contrast, strength.contrast)
    colour = 1.0 + rng.uniform(-strength.colour, strength.colour, size=3)
    blur_ksize = 2 * int(rng.integers(0, strength.blur + 1)) + 1
    noise_std = rng.uniform(0.0, strength.noise)

    params = PhotometricParams()
    if apply[0]:
        params.brightness = float(brightness)
    if apply[1]:
        params.contrast = float(contrast)
    if apply[2]:
        params.colour = colour
    if apply[3]:
        params.blur_ksize = blur_ksize
    if apply[4]:
        params.noise_std = float(noise_std)
    return params


def augment_photometric(img: np.ndarray, seed: int, strength: PhotometricStrength = PhotometricStrength()) -> np.ndarray:
    """
    brightness offset, contrast gain, per channel colour gain, box blur and additive gaussian noise,
    each selected independently with probability 0.5. Output is clamped to [0, 255].
    """
    rng = np.random.default_rng(seed)
    params = draw_photometric_params(rng, strength)

    x = img.astype(np.float64)
    if params.brightness != 0.0:
        x = x + params.brightness
    if params.contrast != 1.0:
        mean = x.mean()
        x = (x - mean) * params.contrast + mean
    if np.any(params.colour != 1.0):
        x = x * params.colour[None, None, :]
    if params.blur_ksize > 1:
        x = cv2.blur(x, (params.blur_ksize, params.blur_ksize))
    if params.noise_std > 0.0:
        x = x + rng.normal(0.0, params.noise_std, size=x.shape)
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def draw_perturbation(rng: np.random.Generator, pose: Pose, K: CameraIntrinsics, limits: WarpLimits) -> Pose:
    """
    Small camera frame motion dT = (R_d, t_d).
    t_d is the translation that shifts the fixture origin by the drawn pixel amount at its current depth.
    """
    shift = rng.uniform(-limits.shift_px, limits.shift_px, size=2)
    in_plane = rng.uniform(-limits.in_plane_deg, limits.in_plane_deg)
    off_plane = rng.uniform(-limits.off_plane_deg, limits.off_plane_deg, size=2)
    rotation = Rotation.from_euler("xyz", [off_plane[0], off_plane[1], in_plane], degrees=True).as_matrix()
    depth = pose.translation[2]
    translation = np.array([shift[0] * depth / K.fx, shift[1] * depth / K.fy, 0.0])
    return Pose.from_dcm(rotation, translation)


def plane_homography(K: CameraIntrinsics, pose: Pose, delta: Pose) -> np.ndarray:
    """
    Homography induced on the fixture plane by moving every camera frame point p to R_d p + t_d.
    """
    normal = pose.dcm[:, 2]
    distance = float(normal @ pose.translation)
    if distance <= 1e-6:
        raise PlaneBehindCamera(f"fixture plane is not in front of the camera (distance {distance} m)")
    k = K.matrix
    H = k @ (delta.dcm + np.outer(delta.translation, normal) / distance) @ np.linalg.inv(k)
    return H / H[2, 2]


def augment_pose_warp(
    img: np.ndarray, pose: Pose, K: CameraIntrinsics, seed: int, limits: WarpLimits = WarpLimits()
) -> Tuple[np.ndarray, Pose]:
    """
    :return: warped image and the label of the warped view, dT o pose
    """
    rng = np.random.default_rng(seed)
    delta = draw_perturbation(rng, pose, K, limits)
    H = plane_homography(K, pose, delta)
    if np.array_equal(delta.dcm, np.eye(3)) and not np.any(delta.translation):
        return img.copy(), pose

    warped = cv2.warpPerspective(
        img,
        H,
        (img.shape[1], img.shape[0]),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_CONSTANT,
        borderValue=(0, 0, 0),
    )
    return warped, delta.compose(pose)


def downscale(img: np.ndarray, K: CameraIntrinsics, factor: int) -> Tuple[np.ndarray, CameraIntrinsics]:
    """area averaging by an integer factor; returns the matching intrinsics"""
    if factor == 1:
        return img, K
    small_K = K.scaled(factor)
    small = cv2.resize(img, (small_K.width, small_K.height), interpolation=cv2.INTER_AREA)
    return small, small_K

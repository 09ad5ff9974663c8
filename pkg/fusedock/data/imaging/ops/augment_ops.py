from typing import Optional

import numpy as np

from fuse.utils import NDict
from fuse.data import OpBase

from fusedock.utils.pose import Pose
from fusedock.data.imaging.camera import CameraIntrinsics
from fusedock.data.imaging.augment import (
    PhotometricStrength,
    WarpLimits,
    augment_photometric,
    augment_pose_warp,
    downscale,
)


def _draw_seed() -> int:
    return int(np.random.randint(0, 2**31 - 1))


class OpAugmentPhotometric(OpBase):
    def __init__(self, strength: Optional[PhotometricStrength] = None, **kwargs: dict):
        super().__init__(**kwargs)
        self._strength = strength if strength is not None else PhotometricStrength()

    def __call__(self, sample_dict: NDict, key: str = "data.input.img", seed: Optional[int] = None) -> NDict:
        """
        :param seed: if None a seed is drawn from numpy's global generator (seeded per worker by the data loader)
        """
        if seed is None:
            seed = _draw_seed()
        sample_dict[key] = augment_photometric(sample_dict[key], seed, self._strength)
        return sample_dict


class OpAugmentPoseWarp(OpBase):
    """
    Perspective warp that keeps image and pose label consistent
    """

    def __init__(self, limits: Optional[WarpLimits] = None, **kwargs: dict):
        super().__init__(**kwargs)
        self._limits = limits if limits is not None else WarpLimits()

    def __call__(
        self,
        sample_dict: NDict,
        key_image: str = "data.input.img",
        key_pose: str = "data.gt.pose",
        key_camera: str = "data.camera",
        seed: Optional[int] = None,
    ) -> NDict:
        if seed is None:
            seed = _draw_seed()
        K = CameraIntrinsics.from_array(sample_dict[key_camera])
        pose = Pose.from_array(sample_dict[key_pose])
        img, pose = augment_pose_warp(sample_dict[key_image], pose, K, seed, self._limits)
        sample_dict[key_image] = img
        sample_dict[key_pose] = pose.to_array()
        return sample_dict


class OpDownscale(OpBase):
    def __init__(self, factor: int, **kwargs: dict):
        super().__init__(**kwargs)
        self._factor = factor

    def __call__(self, sample_dict: NDict, key_image: str = "data.input.img", key_camera: str = "data.camera") -> NDict:
        K = CameraIntrinsics.from_array(sample_dict[key_camera])
        img, K = downscale(sample_dict[key_image], K, self._factor)
        sample_dict[key_image] = img
        sample_dict[key_camera] = K.to_array()
        return sample_dict

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from fusedock.utils.errors import ConfigInvalid, FuseDockError
from fusedock.simulation.orbit import parse_tle, tle_to_state, sun_in_lvlh
from fusedock.simulation.trajectory import TrajectoryConfig, default_configs
from fusedock.data.imaging import (
    BACKGROUND_MODES,
    CameraIntrinsics,
    PhotometricStrength,
    WarpLimits,
    intrinsics_from_fov,
    sun_from_elevation,
)
from fusedock.data.imaging.camera import NATIVE_WIDTH, NATIVE_HEIGHT, NATIVE_HFOV_DEG, NATIVE_VFOV_DEG


@dataclass
class CameraConfig:
    width: int = NATIVE_WIDTH
    height: int = NATIVE_HEIGHT
    hfov: float = NATIVE_HFOV_DEG
    vfov: float = NATIVE_VFOV_DEG

    def intrinsics(self) -> CameraIntrinsics:
        return intrinsics_from_fov(self.width, self.height, self.hfov, self.vfov)


# direction, in LVLH, from the target fixture towards the approaching chaser
_APPROACH_OUTWARD_LVLH = {
    "+vbar": np.array([1.0, 0.0, 0.0]),
    "-vbar": np.array([-1.0, 0.0, 0.0]),
    "+rbar": np.array([0.0, 0.0, -1.0]),
    "-rbar": np.array([0.0, 0.0, 1.0]),
}


def target_from_lvlh(approach: str) -> np.ndarray:
    """DCM whose rows are the target frame axes in LVLH; the docking axis z_t points away from the chaser"""
    z = -_APPROACH_OUTWARD_LVLH[approach]
    y = np.array([0.0, 1.0, 0.0])
    x = np.cross(y, z)
    return np.stack([x, y, z], axis=0)


@dataclass
class RenderConfig:
    background: str = "perlin"
    background_seed: int = 0
    sun_elevation: float = 56.0  # deg
    sun_azimuth: float = 0.0  # deg
    # optional two TLE lines of the target; when given the sun direction follows the orbit at the TLE epoch
    tle: Optional[List[str]] = None
    camera: CameraConfig = field(default_factory=CameraConfig)

    def validate(self) -> "RenderConfig":
        if self.background not in BACKGROUND_MODES:
            raise ConfigInvalid(f"background must be one of {BACKGROUND_MODES}, got {self.background!r}")
        if self.tle is not None and len(self.tle) != 2:
            raise ConfigInvalid(f"tle must hold exactly two lines, got {len(self.tle)}")
        self.camera.intrinsics()
        return self

    def sun_target(self, approach: str) -> np.ndarray:
        """unit vector towards the sun in the target frame"""
        if self.tle is None:
            return sun_from_elevation(self.sun_elevation, self.sun_azimuth)
        try:
            state = tle_to_state(parse_tle(self.tle[0], self.tle[1]))
        except FuseDockError as e:
            raise ConfigInvalid(f"invalid tle in render config: {e}")
        return target_from_lvlh(approach) @ sun_in_lvlh(state)


@dataclass
class SequenceBuildConfig:
    id: str = "synthetic/01"
    trajectory: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    render: RenderConfig = field(default_factory=RenderConfig)
    test: bool = False

    def validate(self) -> "SequenceBuildConfig":
        parts = self.id.split("/")
        if len(self.id) == 0 or any(p in ("", ".", "..") for p in parts) or "\\" in self.id:
            raise ConfigInvalid(f"sequence id must be a relative path of plain names, got {self.id!r}")
        self.trajectory.validate()
        self.render.validate()
        return self


@dataclass
class AugmentConfig:
    enabled: bool = True
    photometric: PhotometricStrength = field(default_factory=PhotometricStrength)
    warp: WarpLimits = field(default_factory=WarpLimits)


# synthetic campaign: background and sun elevation per sequence, sequences 1 and 8 held out
_CLUTTER_SEQUENCES = (1, 3, 6, 8, 9, 12)
_SUN_ELEVATIONS = (37.0, 75.0, 56.0, 146.0, 127.0, 165.0, 56.0, 146.0, 56.0, 146.0, 56.0, 146.0)
_SYNTHETIC_TEST = (1, 8)
_EXPERIMENTAL_TEST = (11, 12)


def default_build_configs(seed: int = 0) -> List[SequenceBuildConfig]:
    configs = []
    for i, trajectory in enumerate(default_configs(seed=seed, count=12)):
        number = i + 1
        configs.append(
            SequenceBuildConfig(
                id=f"synthetic/{number:02d}",
                trajectory=trajectory,
                render=RenderConfig(
                    background="clutter" if number in _CLUTTER_SEQUENCES else "perlin",
                    background_seed=seed + number,
                    sun_elevation=_SUN_ELEVATIONS[i],
                ),
                test=number in _SYNTHETIC_TEST,
            )
        )
    return configs


def experimental_build_configs(seed: int = 0) -> List[SequenceBuildConfig]:
    """hardware campaign: constant misalignment during the forced motion, no background"""
    configs = []
    for i, trajectory in enumerate(default_configs(seed=seed, count=12)):
        number = i + 1
        trajectory.mode = "static-misalignment"
        configs.append(
            SequenceBuildConfig(
                id=f"experimental/{number:02d}",
                trajectory=trajectory,
                render=RenderConfig(background="black", background_seed=seed + number, sun_elevation=_SUN_ELEVATIONS[i]),
                test=number in _EXPERIMENTAL_TEST,
            )
        )
    return configs


def miniature_build_configs(seed: int = 0, count: int = 2) -> List[SequenceBuildConfig]:
    """a few short low resolution sequences, enough to run the whole pipeline in seconds"""
    configs = []
    for i in range(count):
        number = i + 1
        trajectory = TrajectoryConfig(
            seed=seed + i,
            rate=2.0,
            start_range=7.0,
            handover_range=3.5,
            dock_range=3.0,
            waypoint_radius=[0.2, 0.3],
            acq_speed=[0.1, 0.12],
            alignment_time=2.0,
        )
        configs.append(
            SequenceBuildConfig(
                id=f"miniature/{number:02d}",
                trajectory=trajectory,
                render=RenderConfig(
                    background="perlin" if number % 2 else "clutter",
                    background_seed=seed + number,
                    sun_elevation=_SUN_ELEVATIONS[i % len(_SUN_ELEVATIONS)],
                    camera=CameraConfig(width=96, height=64),
                ),
            )
        )
    return configs

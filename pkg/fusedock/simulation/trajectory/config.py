from dataclasses import dataclass, field
from typing import List

from fusedock.utils.errors import ConfigInvalid

TRAJECTORY_MODES = ("nominal", "static-misalignment")
APPROACH_AXES = ("+vbar", "-vbar", "+rbar", "-rbar")
# peak of the PI tracked state relative to its setpoint bound
PI_OVERSHOOT = 1.5


@dataclass
class TrajectoryConfig:
    """
    Relative docking trajectory parameters. Distances in m, speeds in m/s, angles in deg.
    """

    seed: int = 0
    rate: float = 10.0  # Hz
    start_range: float = 10.0
    handover_range: float = 3.0
    dock_range: float = 0.05
    waypoint_radius: List[float] = field(default_factory=lambda: [1.0, 2.0])
    acq_speed: List[float] = field(default_factory=lambda: [0.09, 0.12])
    forced_speed: float = 0.03
    perturb_prob: float = 0.10
    perturb_vel: float = 0.002
    perturb_pos: float = 0.01
    perturb_att: float = 0.1
    alignment_time: float = 10.0  # s
    pi_kp: float = 0.8
    pi_ki: float = 0.1
    mode: str = "nominal"
    # static-misalignment mode: bounds of the constant offset
    static_pos: float = 0.05
    static_att: float = 1.0
    # metadata only: which target axis the approach follows
    approach: str = "+vbar"

    def validate(self) -> "TrajectoryConfig":
        errors = []
        if not 0 < self.dock_range < self.handover_range < self.start_range:
            errors.append(
                f"expected 0 < dock_range < handover_range < start_range, got {self.dock_range}, {self.handover_range}, {self.start_range}"
            )
        if self.rate <= 0:
            errors.append(f"rate must be positive, got {self.rate}")
        for name in ("waypoint_radius", "acq_speed"):
            low_high = list(getattr(self, name))
            if len(low_high) != 2 or not 0 <= low_high[0] <= low_high[1]:
                errors.append(f"{name} must be a [min, max] pair with 0 <= min <= max, got {low_high}")
        if len(self.acq_speed) == 2 and self.acq_speed[0] <= 0:
            errors.append(f"acquisition speeds must be positive, got {self.acq_speed}")
        if self.forced_speed <= 0:
            errors.append(f"forced_speed must be positive, got {self.forced_speed}")
        if not 0 <= self.perturb_prob <= 1:
            errors.append(f"perturb_prob must be in [0, 1], got {self.perturb_prob}")
        for name in ("perturb_vel", "perturb_pos", "perturb_att", "static_pos", "static_att", "alignment_time"):
            if getattr(self, name) < 0:
                errors.append(f"{name} must be non-negative, got {getattr(self, name)}")
        if PI_OVERSHOOT * self.perturb_vel >= self.forced_speed:
            errors.append(f"perturb_vel must be below forced_speed / {PI_OVERSHOOT}, got {self.perturb_vel}")
        if self.mode not in TRAJECTORY_MODES:
            errors.append(f"mode must be one of {TRAJECTORY_MODES}, got {self.mode!r}")
        if self.approach not in APPROACH_AXES:
            errors.append(f"approach must be one of {APPROACH_AXES}, got {self.approach!r}")
        if len(errors) > 0:
            raise ConfigInvalid("invalid trajectory config: " + "; ".join(errors))
        return self


# approach axes of the twelve synthetic sequences
DEFAULT_APPROACH_AXES = [
    "+vbar",
    "+vbar",
    "-rbar",
    "-rbar",
    "-vbar",
    "-vbar",
    "-rbar",
    "-rbar",
    "+rbar",
    "+rbar",
    "+rbar",
    "+rbar",
]


def default_configs(seed: int = 0, count: int = 12) -> List[TrajectoryConfig]:
    """per-sequence configs with distinct seeds, cycling through the approach axes of the synthetic campaign"""
    return [
        TrajectoryConfig(seed=seed + i, approach=DEFAULT_APPROACH_AXES[i % len(DEFAULT_APPROACH_AXES)])
        for i in range(count)
    ]

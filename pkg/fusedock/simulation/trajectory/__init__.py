from fusedock.simulation.trajectory.config import (
    TrajectoryConfig,
    default_configs,
    TRAJECTORY_MODES,
    APPROACH_AXES,
    PI_OVERSHOOT,
)
from fusedock.simulation.trajectory.generator import (
    RelativeSample,
    PIPerturbationTracker,
    generate,
    phase_boundaries,
)
from fusedock.simulation.trajectory.trajectory_io import (
    write_trajectory_jsonl,
    read_trajectory_jsonl,
)

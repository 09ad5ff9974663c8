"""
Per-frame relative pose error metrics: position error, attitude error and range-normalised position error.
"""
import numpy as np

from fusedock.utils.errors import ZeroRange
from fusedock.utils.pose.rotations import normalize_quat, quat_multiply, quat_conjugate

MIN_RANGE_M = 1e-9


def position_error(t_hat: np.ndarray, t: np.ndarray) -> float:
    """Euclidean distance [m] between estimated and true translation"""
    diff = np.asarray(t_hat, dtype=np.float64) - np.asarray(t, dtype=np.float64)
    return float(np.linalg.norm(diff))


def attitude_error(q_hat: np.ndarray, q: np.ndarray) -> float:
    """
    Rotation angle [deg] of q̂⁻¹ ⊗ q.
    |w| is used so q and -q (same rotation) give 0. Evaluated as 2*atan2(|v|, |w|),
    equal to 2*arccos(|w|) for unit quaternions but without the loss of precision near 0.
    """
    delta = quat_multiply(quat_conjugate(normalize_quat(q_hat)), normalize_quat(q))
    angle = 2.0 * np.arctan2(np.linalg.norm(delta[:3]), abs(delta[3]))
    return float(np.degrees(angle))


def range_normalized_error(t_hat: np.ndarray, t: np.ndarray) -> float:
    """position error as a fraction of the true range ∥t∥"""
    rng = float(np.linalg.norm(np.asarray(t, dtype=np.float64)))
    if rng <= MIN_RANGE_M:
        raise ZeroRange(f"range {rng} m is too small to normalise a position error")
    return position_error(t_hat, t) / rng

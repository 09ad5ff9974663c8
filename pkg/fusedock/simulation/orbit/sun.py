"""
Low precision solar ephemeris (mean longitude / mean anomaly polynomials, about 0.01 deg over 1950-2100)
and the local-vertical/local-horizontal frame of the target.
"""

from datetime import datetime, timezone
import math

import numpy as np

from fusedock.utils.errors import EpochOutOfRange
from fusedock.simulation.orbit.propagator import StateVector

J2000_JD = 2451545.0
UNIX_EPOCH_JD = 2440587.5


def julian_date(epoch: datetime) -> float:
    if epoch.tzinfo is None:
        epoch = epoch.replace(tzinfo=timezone.utc)
    return UNIX_EPOCH_JD + epoch.timestamp() / 86400.0


def sun_direction(epoch: datetime) -> np.ndarray:
    """unit vector from the Earth to the Sun in the mean-equator ECI frame"""
    if not 1950 <= epoch.year <= 2100:
        raise EpochOutOfRange(f"solar ephemeris is valid for years 1950-2100, got {epoch.isoformat()}")

    n = julian_date(epoch) - J2000_JD
    mean_longitude = math.radians((280.460 + 0.9856474 * n) % 360.0)
    mean_anomaly = math.radians((357.528 + 0.9856003 * n) % 360.0)
    ecliptic_longitude = (
        mean_longitude
        + math.radians(1.915) * math.sin(mean_anomaly)
        + math.radians(0.020) * math.sin(2.0 * mean_anomaly)
    )
    obliquity = math.radians(23.439 - 0.0000004 * n)

    direction = np.array(
        [
            math.cos(ecliptic_longitude),
            math.cos(obliquity) * math.sin(ecliptic_longitude),
            math.sin(obliquity) * math.sin(ecliptic_longitude),
        ]
    )
    return direction / np.linalg.norm(direction)


def lvlh_attitude(state: StateVector) -> np.ndarray:
    """
    Nadir pointing LVLH frame: z towards the Earth centre, y against the orbit normal, x = y × z (along-track).
    :return: DCM whose rows are the LVLH axes in ECI, i.e. v_lvlh = C @ v_eci
    """
    r = np.asarray(state.position, dtype=np.float64)
    h = np.cross(r, state.velocity)
    z = -r / np.linalg.norm(r)
    y = -h / np.linalg.norm(h)
    x = np.cross(y, z)
    return np.stack([x, y, z], axis=0)


def sun_in_lvlh(state: StateVector) -> np.ndarray:
    return lvlh_attitude(state) @ sun_direction(state.epoch)

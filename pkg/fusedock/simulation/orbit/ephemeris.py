from typing import List
import pandas as pd

from fusedock.simulation.orbit.propagator import StateVector

EPHEMERIS_COLUMNS = [
    "epoch_iso8601",
    "rx_km",
    "ry_km",
    "rz_km",
    "vx_kms",
    "vy_kms",
    "vz_kms",
]


def ephemeris_table(states: List[StateVector]) -> pd.DataFrame:
    rows = [
        [s.epoch.isoformat()] + [float(v) for v in s.position] + [float(v) for v in s.velocity]
        for s in states
    ]
    return pd.DataFrame(rows, columns=EPHEMERIS_COLUMNS)


def write_ephemeris_csv(states: List[StateVector], path: str) -> None:
    ephemeris_table(states).to_csv(path, index=False, float_format="%.9f")

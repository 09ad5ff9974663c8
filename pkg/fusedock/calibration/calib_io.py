"""
File formats of the calibration step:
    samples CSV  k,oi_tx..oi_qw,os_tx..os_qw,cb_tx..cb_qw   (7 pose numbers per transform)
    stream CSV   t,oi_tx..oi_qw,os_tx..os_qw
    output CSV   t,tx,ty,tz,qx,qy,qz,qw                     (calibrated camera-frame target pose)
    result JSON  statics and residuals
"""
from typing import List, Sequence
import json
import logging
import os

import numpy as np
import pandas as pd

from fusedock.calibration.statics import CalibResult, CalibSample, apply_calibration
from fusedock.utils.errors import IoFailure, Malformed
from fusedock.utils.pose import Pose

lgr = logging.getLogger("Fuse")

POSE_FIELDS = ("tx", "ty", "tz", "qx", "qy", "qz", "qw")


def pose_columns(prefix: str) -> List[str]:
    return [f"{prefix}_{name}" for name in POSE_FIELDS]


SAMPLE_COLUMNS = ["k"] + pose_columns("oi") + pose_columns("os") + pose_columns("cb")
STREAM_COLUMNS = ["t"] + pose_columns("oi") + pose_columns("os")
OUTPUT_COLUMNS = ["t"] + list(POSE_FIELDS)


def _read_table(path: str, columns: Sequence[str]) -> pd.DataFrame:
    try:
        df = pd.read_csv(path)
    except OSError as e:
        raise IoFailure(f"failed reading {path}: {e}")
    except (ValueError, pd.errors.ParserError) as e:
        raise Malformed(f"{path}: {e}")
    missing = [c for c in columns if c not in df.columns]
    if len(missing) > 0:
        raise Malformed(f"{path}: missing columns {missing}")
    if not np.all(np.isfinite(df[list(columns)].to_numpy(dtype=np.float64))):
        raise Malformed(f"{path}: non finite values")
    return df


def _pose(row: pd.Series, prefix: str, path: str) -> Pose:
    try:
        return Pose.from_array(row[pose_columns(prefix)].to_numpy(dtype=np.float64))
    except ValueError as e:
        raise Malformed(f"{path}: invalid {prefix} pose in row {row.name}: {e}")


def read_samples_csv(path: str) -> List[CalibSample]:
    df = _read_table(path, SAMPLE_COLUMNS).sort_values("k", kind="stable")
    return [CalibSample(T_oi=_pose(row, "oi", path), T_os=_pose(row, "os", path), T_cb=_pose(row, "cb", path)) for _, row in df.iterrows()]


def write_samples_csv(samples: Sequence[CalibSample], path: str) -> None:
    rows = [[k] + s.T_oi.to_list() + s.T_os.to_list() + s.T_cb.to_list() for k, s in enumerate(samples)]
    pd.DataFrame(rows, columns=SAMPLE_COLUMNS).to_csv(path, index=False, float_format="%.17g")


def write_result_json(result: CalibResult, path: str) -> None:
    tmp_path = path + ".tmp"
    try:
        with open(tmp_path, "w") as f:
            json.dump(result.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        os.replace(tmp_path, path)
    except OSError as e:
        raise IoFailure(f"failed writing {path}: {e}")


def read_result_json(path: str) -> CalibResult:
    try:
        with open(path) as f:
            values = json.load(f)
    except OSError as e:
        raise IoFailure(f"failed reading {path}: {e}")
    try:
        return CalibResult.from_dict(values)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
        raise Malformed(f"{path}: {e}")


def calibrate_stream(result: CalibResult, stream_path: str, out_path: str, verbose: int = 1) -> int:
    """
    Converts a mocap stream into calibrated ground truth poses.
    :return: number of poses written
    """
    df = _read_table(stream_path, STREAM_COLUMNS)
    rows = []
    for _, row in df.iterrows():
        T_bc = apply_calibration(result, _pose(row, "oi", stream_path), _pose(row, "os", stream_path))
        rows.append([float(row["t"])] + T_bc.to_list())
    try:
        pd.DataFrame(rows, columns=OUTPUT_COLUMNS).to_csv(out_path, index=False, float_format="%.12g")
    except OSError as e:
        raise IoFailure(f"failed writing {out_path}: {e}")
    if verbose > 0:
        lgr.info(f"wrote {len(rows)} calibrated poses to {out_path}")
    return len(rows)

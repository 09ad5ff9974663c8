"""
Per-frame and summary evaluation of pose estimates against sequence labels.
"""
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import os

import numpy as np
import pandas as pd
import torch
from torch.utils.data import DataLoader

from fuse.data import DatasetDefault
from fuse.data.utils.collates import CollateDefault

from fusedock.data.docking.dataset import DockingFramesDataset, frame_sample_id
from fusedock.data.docking.sequence_io import SequenceRecord
from fusedock.dl.models import PoseRegressor, predictions_to_poses
from fusedock.eval.metrics import attitude_error, position_error, range_normalized_error
from fusedock.utils.errors import IoFailure, Malformed
from fusedock.utils.pose import Pose

lgr = logging.getLogger("Fuse")

FRAME_COLUMNS = ("t_s", "dt_m", "dq_deg", "dtr_frac", "phase")
PREDICTION_COLUMNS = ("t", "tx", "ty", "tz", "qx", "qy", "qz", "qw")
TIME_TOLERANCE_S = 1e-6


@dataclass(frozen=True)
class Thresholds:
    position_frac: float = 0.05  # range-normalised position error
    attitude_deg: float = 5.0


@dataclass
class EvalSummary:
    frames: int
    mean_dt_m: float
    median_dt_m: float
    mean_dq_deg: float
    median_dq_deg: float
    mean_dtr_frac: float
    median_dtr_frac: float
    position_compliance_pct: float
    attitude_compliance_pct: float

    def to_dict(self) -> dict:
        return asdict(self)

    def summary_line(self) -> str:
        return (
            f"{self.frames} frames: median dt {self.median_dt_m:.3f} m, median dq {self.median_dq_deg:.2f} deg, "
            f"median dtr {100 * self.median_dtr_frac:.2f}%, compliance position {self.position_compliance_pct:.1f}% "
            f"attitude {self.attitude_compliance_pct:.1f}%"
        )


def frame_errors_table(sequence: SequenceRecord, predictions: Sequence[Pose]) -> pd.DataFrame:
    if len(predictions) != len(sequence.frames):
        raise Malformed(f"{len(predictions)} predictions for {len(sequence.frames)} frames of {sequence.id}")
    rows = []
    for frame, pose_hat in zip(sequence.frames, predictions):
        rows.append(
            dict(
                t_s=frame.t,
                dt_m=position_error(pose_hat.translation, frame.pose.translation),
                dq_deg=attitude_error(pose_hat.rotation, frame.pose.rotation),
                dtr_frac=range_normalized_error(pose_hat.translation, frame.pose.translation),
                phase=frame.phase,
            )
        )
    return pd.DataFrame(rows, columns=list(FRAME_COLUMNS))


def summarize(frame_errors: pd.DataFrame, thresholds: Thresholds = Thresholds()) -> EvalSummary:
    """means, medians (mean of the two middle values for an even count) and compliance percentages"""
    if len(frame_errors) == 0:
        raise Malformed("no frames to summarize")
    dt = frame_errors["dt_m"].to_numpy()
    dq = frame_errors["dq_deg"].to_numpy()
    dtr = frame_errors["dtr_frac"].to_numpy()
    return EvalSummary(
        frames=len(frame_errors),
        mean_dt_m=float(np.mean(dt)),
        median_dt_m=float(np.median(dt)),
        mean_dq_deg=float(np.mean(dq)),
        median_dq_deg=float(np.median(dq)),
        mean_dtr_frac=float(np.mean(dtr)),
        median_dtr_frac=float(np.median(dtr)),
        position_compliance_pct=float(100.0 * np.mean(dtr <= thresholds.position_frac)),
        attitude_compliance_pct=float(100.0 * np.mean(dq <= thresholds.attitude_deg)),
    )


def evaluate_predictions(
    sequence: SequenceRecord, predictions: Sequence[Pose], thresholds: Thresholds = Thresholds()
) -> Tuple[pd.DataFrame, EvalSummary]:
    frame_errors = frame_errors_table(sequence, predictions)
    return frame_errors, summarize(frame_errors, thresholds)


@torch.no_grad()
def predict_sequence(
    model: PoseRegressor, sequence: SequenceRecord, downscale_factor: int = 4, batch_size: int = 16
) -> List[Pose]:
    """runs the network over every frame of the sequence, in frame order"""
    records = {sequence.id: sequence}
    sample_ids = [frame_sample_id(sequence.id, k) for k in range(len(sequence.frames))]
    dataset = DatasetDefault(
        sample_ids=sample_ids,
        dynamic_pipeline=DockingFramesDataset.dynamic_pipeline(records, None, downscale_factor),
    )
    dataset.create()
    loader = DataLoader(dataset=dataset, batch_size=batch_size, shuffle=False, collate_fn=CollateDefault())

    model.eval()
    poses: List[Pose] = []
    for batch in loader:
        t_hat, r_hat = model(batch["data.input.img"])
        poses += predictions_to_poses(t_hat, r_hat)
    return poses


def evaluate(
    model: PoseRegressor,
    sequence: SequenceRecord,
    thresholds: Thresholds = Thresholds(),
    downscale_factor: int = 4,
    batch_size: int = 16,
    verbose: int = 1,
) -> Tuple[pd.DataFrame, EvalSummary]:
    predictions = predict_sequence(model, sequence, downscale_factor=downscale_factor, batch_size=batch_size)
    frame_errors, summary = evaluate_predictions(sequence, predictions, thresholds)
    if verbose > 0:
        lgr.info(f"{sequence.id}: {summary.summary_line()}")
    return frame_errors, summary


def read_predictions_csv(path: str, sequence: Optional[SequenceRecord] = None) -> List[Pose]:
    """
    Reads `t,tx,ty,tz,qx,qy,qz,qw` rows.
    When a sequence is given the rows must match its frame timestamps one to one.
    """
    try:
        df = pd.read_csv(path)
    except OSError as e:
        raise IoFailure(f"failed reading predictions {path}: {e}")
    except (ValueError, pd.errors.ParserError) as e:
        raise Malformed(f"{path}: {e}")
    missing = [c for c in PREDICTION_COLUMNS if c not in df.columns]
    if len(missing) > 0:
        raise Malformed(f"{path}: missing columns {missing}")
    values = df[list(PREDICTION_COLUMNS)].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise Malformed(f"{path}: non finite values")

    if sequence is not None:
        times = np.array([f.t for f in sequence.frames])
        if len(values) != len(times) or np.any(np.abs(values[:, 0] - times) > TIME_TOLERANCE_S):
            raise Malformed(f"{path}: prediction timestamps do not match the frames of {sequence.id}")

    poses = []
    for row in values:
        try:
            poses.append(Pose.from_array(row[1:8]))
        except ValueError as e:
            raise Malformed(f"{path}: invalid pose at t={row[0]}: {e}")
    return poses


def write_predictions_csv(times: Sequence[float], poses: Sequence[Pose], path: str) -> None:
    rows = [[t] + p.to_list() for t, p in zip(times, poses)]
    pd.DataFrame(rows, columns=list(PREDICTION_COLUMNS)).to_csv(path, index=False, float_format="%.12g")


def write_frame_errors_csv(frame_errors: pd.DataFrame, path: str) -> None:
    try:
        frame_errors.to_csv(path, index=False, columns=list(FRAME_COLUMNS), float_format="%.9g")
    except OSError as e:
        raise IoFailure(f"failed writing {path}: {e}")


def write_error_chart_svg(
    frame_errors: pd.DataFrame, path: str, thresholds: Thresholds = Thresholds(), title: Optional[str] = None
) -> None:
    """range-normalised position error and attitude error against time, with the requirement lines"""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with plt.rc_context({"svg.hashsalt": "fusedock", "svg.fonttype": "none"}):
        fig, axes = plt.subplots(2, 1, figsize=(8, 5), sharex=True)
        t = frame_errors["t_s"].to_numpy()
        axes[0].plot(t, 100.0 * frame_errors["dtr_frac"].to_numpy(), color="tab:blue", linewidth=1)
        axes[0].axhline(100.0 * thresholds.position_frac, color="tab:red", linestyle="--", linewidth=1)
        axes[0].set_ylabel("position error [% range]")
        axes[1].plot(t, frame_errors["dq_deg"].to_numpy(), color="tab:green", linewidth=1)
        axes[1].axhline(thresholds.attitude_deg, color="tab:red", linestyle="--", linewidth=1)
        axes[1].set_ylabel("attitude error [deg]")
        axes[1].set_xlabel("time [s]")
        if title is not None:
            axes[0].set_title(title)
        plt.tight_layout()
        tmp_path = path + ".tmp"
        try:
            fig.savefig(tmp_path, format="svg", metadata={"Date": None})
            os.replace(tmp_path, path)
        except OSError as e:
            raise IoFailure(f"failed writing {path}: {e}")
        finally:
            plt.close(fig)

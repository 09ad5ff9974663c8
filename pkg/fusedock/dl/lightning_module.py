from collections import OrderedDict
from typing import Dict, List, Optional, Tuple

import numpy as np
import torch
import pytorch_lightning as pl

from fusedock.dl.config import TrainConfig
from fusedock.dl.losses import PoseLoss
from fusedock.dl.models import PoseRegressor, predictions_to_poses
from fusedock.dl.optim import DockAdam, cyclical_lr_scheduler
from fusedock.eval.metrics import attitude_error, position_error, range_normalized_error
from fusedock.utils.pose import Pose

METRIC_NAMES = ("loss", "mean_dt_m", "mean_dq_deg", "mean_dtr_frac")


class _EpochAccumulator:
    def __init__(self) -> None:
        self.loss_sum = 0.0
        self.batches = 0
        self.dt_sum = 0.0
        self.dq_sum = 0.0
        self.dtr_sum = 0.0
        self.frames = 0

    def add(self, loss: float, dt: List[float], dq: List[float], dtr: List[float]) -> None:
        self.loss_sum += loss
        self.batches += 1
        self.dt_sum += float(np.sum(dt))
        self.dq_sum += float(np.sum(dq))
        self.dtr_sum += float(np.sum(dtr))
        self.frames += len(dt)

    def summary(self) -> Dict[str, float]:
        return dict(
            loss=self.loss_sum / self.batches,
            mean_dt_m=self.dt_sum / self.frames,
            mean_dq_deg=self.dq_sum / self.frames,
            mean_dtr_frac=self.dtr_sum / self.frames,
        )


def frame_errors(t_hat: torch.Tensor, r_hat: torch.Tensor, gt_poses: torch.Tensor) -> Tuple[List[float], List[float], List[float]]:
    """per-frame position [m], attitude [deg] and range-normalised errors of a batch of predictions"""
    predicted = predictions_to_poses(t_hat, r_hat)
    dt, dq, dtr = [], [], []
    for pose_hat, gt in zip(predicted, gt_poses.detach().cpu().numpy().astype(np.float64)):
        pose = Pose.from_array(gt)
        dt.append(position_error(pose_hat.translation, pose.translation))
        dq.append(attitude_error(pose_hat.rotation, pose.rotation))
        dtr.append(range_normalized_error(pose_hat.translation, pose.translation))
    return dt, dq, dtr


class DockPoseModule(pl.LightningModule):
    """
    Trains a PoseRegressor together with the learnable task weights of PoseLoss.

    Per-epoch means of the loss and of the pose errors are collected in `metric_rows`
    (one "train" row and, when a validation split exists, one "val" row per epoch).
    `best_state` holds the weights of the epoch with the lowest validation loss, or
    of the last epoch when there is no validation data.
    """

    def __init__(self, config: TrainConfig, model: Optional[PoseRegressor] = None):
        super().__init__()
        self.config = config
        self.model = (
            model if model is not None else PoseRegressor(blocks=config.blocks, width=config.width, dropout_p=config.dropout_p)
        )
        self.loss_fn = PoseLoss()

        self.metric_rows: List[dict] = []
        self.best_state: Optional["OrderedDict[str, torch.Tensor]"] = None
        self.best_val_loss = float("inf")
        self._acc: Dict[str, _EpochAccumulator] = {}

    def forward(self, images: torch.Tensor) -> Tuple[torch.Tensor, torch.Tensor]:
        return self.model(images)

    def _shared_step(self, batch: dict, split: str) -> torch.Tensor:
        images = batch["data.input.img"]
        t_hat, r_hat = self(images)
        loss = self.loss_fn(t_hat, r_hat, batch["data.gt.t"], batch["data.gt.rot6d"])
        dt, dq, dtr = frame_errors(t_hat, r_hat, batch["data.gt.pose"])
        self._acc[split].add(float(loss.detach()), dt, dq, dtr)
        self.log(f"{split}_loss", loss.detach(), batch_size=images.shape[0], on_epoch=True, on_step=False)
        return loss

    def training_step(self, batch: dict, batch_idx: int) -> torch.Tensor:
        return self._shared_step(batch, "train")

    def validation_step(self, batch: dict, batch_idx: int) -> None:
        self._shared_step(batch, "val")

    def on_train_epoch_start(self) -> None:
        self._acc["train"] = _EpochAccumulator()

    def on_validation_epoch_start(self) -> None:
        self._acc["val"] = _EpochAccumulator()

    def on_validation_epoch_end(self) -> None:
        if self.trainer.sanity_checking or self._acc["val"].frames == 0:
            return
        summary = self._acc["val"].summary()
        self.metric_rows.append(dict(epoch=self.current_epoch, split="val", **summary))
        if summary["loss"] < self.best_val_loss:
            self.best_val_loss = summary["loss"]
            self.best_state = self.network_state_dict()

    def on_train_epoch_end(self) -> None:
        self.metric_rows.append(dict(epoch=self.current_epoch, split="train", **self._acc["train"].summary()))
        if not self.has_validation():
            self.best_state = self.network_state_dict()

    def has_validation(self) -> bool:
        return any(row["split"] == "val" for row in self.metric_rows)

    def network_state_dict(self) -> "OrderedDict[str, torch.Tensor]":
        """backbone, heads and task weights, detached copies"""
        return OrderedDict((k, v.detach().clone()) for k, v in self.state_dict().items())

    def sorted_metric_rows(self) -> List[dict]:
        order = {"train": 0, "val": 1}
        return sorted(self.metric_rows, key=lambda row: (row["epoch"], order[row["split"]]))

    def configure_optimizers(self) -> dict:
        optimizer = DockAdam(self.parameters(), lr=self.config.lr_max)
        scheduler = cyclical_lr_scheduler(optimizer, self.config)
        return dict(optimizer=optimizer, lr_scheduler=dict(scheduler=scheduler, interval="epoch"))

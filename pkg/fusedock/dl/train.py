"""
Training entry point: SplitPlan + sequences + TrainConfig -> trained network, metrics log and checkpoint.
"""
from dataclasses import asdict
from typing import Dict, List, Optional, Tuple
import logging
import os

import pandas as pd
import pytorch_lightning as pl
from omegaconf import OmegaConf

from fusedock.data.docking.dataset import DockingDataModule, DockingFramesDataset
from fusedock.data.docking.sequence_io import SequenceRecord
from fusedock.data.docking.split import SplitPlan
from fusedock.dl.checkpoint import load_checkpoint, save_checkpoint
from fusedock.dl.config import TrainConfig
from fusedock.dl.lightning_module import METRIC_NAMES, DockPoseModule
from fusedock.dl.models import PoseRegressor
from fusedock.utils.errors import EmptySplit, ShapeMismatch

lgr = logging.getLogger("Fuse")

METRICS_FILE = "metrics.csv"
CHECKPOINT_FILE = "model.dkz"
METRICS_COLUMNS = ("epoch", "split") + METRIC_NAMES


def write_metrics_csv(rows: List[dict], path: str) -> None:
    df = pd.DataFrame(rows, columns=list(METRICS_COLUMNS))
    df.to_csv(path, index=False, float_format="%.9g")


def read_metrics_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path)


def train(
    records: Dict[str, SequenceRecord],
    plan: SplitPlan,
    config: TrainConfig,
    out_dir: Optional[str] = None,
    verbose: int = 1,
) -> Tuple[PoseRegressor, List[dict]]:
    """
    Trains a pose regressor on the train part of the plan and selects the weights by validation loss.

    :param out_dir: when given, metrics.csv and model.dkz are written there
    :return: network holding the selected weights, per-epoch metric rows
    """
    config.validate()
    sample_ids = DockingFramesDataset.sample_ids(records, plan, "train")
    if len(sample_ids) == 0:
        raise EmptySplit("the train split holds no frames")
    has_val = len(DockingFramesDataset.sample_ids(records, plan, "val")) > 0

    pl.seed_everything(config.seed, workers=True)

    model = PoseRegressor(blocks=config.blocks, width=config.width, dropout_p=config.dropout_p)
    module = DockPoseModule(config, model=model)

    augment = config.augment if config.augment.enabled else None
    datamodule = DockingDataModule(
        root="",
        plan=plan,
        batch_size=config.batch_size,
        num_workers=config.num_workers,
        augment=augment,
        downscale_factor=config.downscale,
        seed=config.seed,
        records=records,
    )

    if verbose > 0:
        lgr.info(
            f"training on {len(sample_ids)} frames for {config.epochs} epochs (validation: {'yes' if has_val else 'no'})",
            {"attrs": "bold"},
        )
    trainer = pl.Trainer(
        max_epochs=config.epochs,
        accelerator="cpu",
        devices=1,
        deterministic=True,
        logger=False,
        enable_checkpointing=False,
        enable_progress_bar=verbose > 1,
        enable_model_summary=verbose > 1,
        num_sanity_val_steps=0,
        limit_val_batches=1.0 if has_val else 0,
    )
    trainer.fit(module, datamodule=datamodule)

    rows = module.sorted_metric_rows()
    if module.best_state is not None:
        module.load_state_dict(module.best_state)
    model = module.model.eval()

    if verbose > 0:
        last = rows[-1]
        lgr.info(f"epoch {last['epoch']} {last['split']}: loss {last['loss']:.4f}, mean dt {last['mean_dt_m']:.4f} m")

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_metrics_csv(rows, os.path.join(out_dir, METRICS_FILE))
        save_checkpoint(os.path.join(out_dir, CHECKPOINT_FILE), module.network_state_dict(), config_to_dict(config))
        if verbose > 0:
            lgr.info(f"wrote {METRICS_FILE} and {CHECKPOINT_FILE} to {out_dir}")
    return model, rows


def config_to_dict(config: TrainConfig) -> dict:
    return asdict(config)


def config_from_dict(values: dict) -> TrainConfig:
    schema = OmegaConf.structured(TrainConfig)
    merged = OmegaConf.merge(schema, values)
    config: TrainConfig = OmegaConf.to_object(merged)
    return config.validate()


def load_trained_model(path: str) -> Tuple[PoseRegressor, TrainConfig]:
    """restores the network stored by train() in eval mode"""
    state_dict, config_values = load_checkpoint(path)
    config = config_from_dict(config_values)
    model = PoseRegressor(blocks=config.blocks, width=config.width, dropout_p=config.dropout_p)
    prefix = "model."
    model_state = {k[len(prefix) :]: v for k, v in state_dict.items() if k.startswith(prefix)}
    try:
        model.load_state_dict(model_state, strict=True)
    except RuntimeError as e:
        raise ShapeMismatch(f"{path} does not match the configured network: {e}")
    return model.eval(), config

from typing import Dict, List, Optional, Sequence
import logging

import numpy as np
import torch
import pytorch_lightning as pl
from torch.utils.data import DataLoader

from fuse.utils.ndict import NDict
from fuse.data import DatasetDefault, OpBase, get_sample_id
from fuse.data.pipelines.pipeline_default import PipelineDefault
from fuse.data.utils.collates import CollateDefault
from fuse.data.ops.ops_cast import OpToTensor

from fusedock.utils.pose import Pose, dcm_to_rot6d
from fusedock.data.imaging import read_ppm
from fusedock.data.imaging.ops.augment_ops import OpAugmentPhotometric, OpAugmentPoseWarp, OpDownscale
from fusedock.data.docking.config import AugmentConfig
from fusedock.data.docking.sequence_io import SequenceRecord, discover_sequences
from fusedock.data.docking.split import FrameRange, SplitPlan

lgr = logging.getLogger("Fuse")

PARTS = ("train", "val", "test")


def frame_sample_id(sequence_id: str, index: int) -> str:
    return f"{sequence_id}:{index:06d}"


def parse_frame_sample_id(sample_id: str) -> tuple:
    sequence_id, index = sample_id.rsplit(":", 1)
    return sequence_id, int(index)


class OpLoadDockingFrame(OpBase):
    """
    Reads the frame named by the sample id together with its label and camera
    """

    def __init__(self, records: Dict[str, SequenceRecord], **kwargs: dict):
        super().__init__(**kwargs)
        self._records = records

    def __call__(
        self,
        sample_dict: NDict,
        key_out_img: str = "data.input.img",
        key_out_pose: str = "data.gt.pose",
        key_out_camera: str = "data.camera",
    ) -> NDict:
        sid = get_sample_id(sample_dict)
        sequence_id, index = parse_frame_sample_id(sid)
        record = self._records[sequence_id]
        frame = record.frames[index]

        sample_dict[key_out_img] = read_ppm(record.image_path(index))
        sample_dict[key_out_pose] = frame.pose.to_array()
        sample_dict[key_out_camera] = record.camera.to_array()
        sample_dict["data.t"] = frame.t
        sample_dict["data.phase"] = frame.phase
        return sample_dict


class OpPoseLabels(OpBase):
    """regression targets: translation and the 6D attitude representation"""

    def __init__(self, **kwargs: dict):
        super().__init__(**kwargs)

    def __call__(self, sample_dict: NDict, key_pose: str = "data.gt.pose") -> NDict:
        pose = Pose.from_array(sample_dict[key_pose])
        sample_dict["data.gt.t"] = pose.translation.copy()
        sample_dict["data.gt.rot6d"] = dcm_to_rot6d(pose.dcm)
        return sample_dict


class OpImageToTensor(OpBase):
    """H x W x 3 uint8 -> 3 x H x W float32 in [0, 1]"""

    def __init__(self, **kwargs: dict):
        super().__init__(**kwargs)

    def __call__(self, sample_dict: NDict, key: str = "data.input.img") -> NDict:
        img = np.ascontiguousarray(np.transpose(sample_dict[key], (2, 0, 1)), dtype=np.float32) / 255.0
        sample_dict[key] = torch.from_numpy(img)
        return sample_dict


class DockingFramesDataset:
    """
    fuse dataset over the frames selected by a split plan
    """

    @staticmethod
    def sample_ids(records: Dict[str, SequenceRecord], plan: SplitPlan, part: str) -> List[str]:
        if part not in PARTS:
            raise Exception(f"Error: unsupported part {part}. Supported parts: {PARTS}")
        if part == "test":
            ranges: Sequence[FrameRange] = [(i, 0, len(records[i].frames)) for i in plan.test if i in records]
        else:
            ranges = getattr(plan, part)
        return [frame_sample_id(i, k) for i, start, stop in ranges for k in range(start, stop)]

    @staticmethod
    def dynamic_pipeline(
        records: Dict[str, SequenceRecord], augment: Optional[AugmentConfig], downscale_factor: int
    ) -> PipelineDefault:
        """
        :param augment: None disables augmentation (validation / test)
        """
        dynamic_pipeline = [(OpLoadDockingFrame(records), dict())]
        if augment is not None and augment.enabled:
            dynamic_pipeline += [
                (OpAugmentPoseWarp(augment.warp), dict()),
                (OpAugmentPhotometric(augment.photometric), dict()),
            ]
        dynamic_pipeline += [
            (OpDownscale(downscale_factor), dict()),
            (OpPoseLabels(), dict()),
            (OpImageToTensor(), dict(key="data.input.img")),
            (OpToTensor(), dict(key=["data.gt.pose", "data.gt.t", "data.gt.rot6d", "data.camera"], dtype=torch.float32)),
        ]
        return PipelineDefault("dynamic", dynamic_pipeline)

    @staticmethod
    def dataset(
        records: Dict[str, SequenceRecord],
        plan: SplitPlan,
        part: str,
        augment: Optional[AugmentConfig] = None,
        downscale_factor: int = 4,
    ) -> DatasetDefault:
        sample_ids = DockingFramesDataset.sample_ids(records, plan, part)
        dynamic_pipeline = DockingFramesDataset.dynamic_pipeline(records, augment, downscale_factor)
        dataset = DatasetDefault(sample_ids=sample_ids, dynamic_pipeline=dynamic_pipeline)
        dataset.create()
        return dataset


class DockingDataModule(pl.LightningDataModule):
    def __init__(
        self,
        root: str,
        plan: SplitPlan,
        batch_size: int,
        num_workers: int = 0,
        augment: Optional[AugmentConfig] = None,
        downscale_factor: int = 4,
        seed: int = 0,
        records: Optional[Dict[str, SequenceRecord]] = None,
    ):
        """
        :param root: dataset root holding the sequence directories
        :param augment: augmentation of the training part, None to disable
        :param seed: shuffling seed of the training loader
        :param records: already loaded sequences, discovered under root when None
        """
        super().__init__()
        self._root = root
        self._plan = plan
        self._batch_size = batch_size
        self._num_workers = num_workers
        self._augment = augment
        self._downscale_factor = downscale_factor
        self._seed = seed
        self._records = records

    @property
    def records(self) -> Dict[str, SequenceRecord]:
        if self._records is None:
            self._records = discover_sequences(self._root)
        return self._records

    def setup(self, stage: str) -> None:
        if stage == "fit":
            self._dataset_train = DockingFramesDataset.dataset(
                self.records, self._plan, "train", augment=self._augment, downscale_factor=self._downscale_factor
            )
            self._dataset_val = DockingFramesDataset.dataset(
                self.records, self._plan, "val", downscale_factor=self._downscale_factor
            )
        if stage in ("test", "predict"):
            self._dataset_test = DockingFramesDataset.dataset(
                self.records, self._plan, "test", downscale_factor=self._downscale_factor
            )

    def train_dataloader(self) -> DataLoader:
        return DataLoader(
            dataset=self._dataset_train,
            batch_size=self._batch_size,
            shuffle=True,
            generator=torch.Generator().manual_seed(self._seed),
            collate_fn=CollateDefault(),
            num_workers=self._num_workers,
        )

    def val_dataloader(self) -> DataLoader:
        return DataLoader(
            dataset=self._dataset_val,
            batch_size=self._batch_size,
            collate_fn=CollateDefault(),
            num_workers=self._num_workers,
        )

    def test_dataloader(self) -> DataLoader:
        return DataLoader(
            dataset=self._dataset_test,
            batch_size=self._batch_size,
            collate_fn=CollateDefault(),
            num_workers=self._num_workers,
        )

    def predict_dataloader(self) -> DataLoader:
        return self.test_dataloader()

import unittest
import os
import shutil
import tempfile

import numpy as np
import torch

from fusedock.utils.pose import Pose
from fusedock.data.docking import AugmentConfig, SplitPlan, build_dataset, miniature_build_configs
from fusedock.data.docking.dataset import DockingDataModule, DockingFramesDataset, frame_sample_id


class TestDockingDataset(unittest.TestCase):
    def setUp(self) -> None:
        self.root = tempfile.mkdtemp()
        records = build_dataset(miniature_build_configs(seed=0, count=2), self.root, verbose=0)
        self.records = {r.id: r for r in records}
        self.plan = SplitPlan(
            train=[("miniature/01", 0, 6)], val=[("miniature/01", 6, 8)], seed=0, test=["miniature/02"]
        )

    def test_sample_ids(self) -> None:
        ids = DockingFramesDataset.sample_ids(self.records, self.plan, "val")
        self.assertEqual(ids, [frame_sample_id("miniature/01", 6), frame_sample_id("miniature/01", 7)])
        test_ids = DockingFramesDataset.sample_ids(self.records, self.plan, "test")
        self.assertEqual(len(test_ids), len(self.records["miniature/02"].frames))

    def test_sample(self) -> None:
        dataset = DockingFramesDataset.dataset(self.records, self.plan, "val", downscale_factor=2)
        sample = dataset[0]
        img = sample["data.input.img"]
        self.assertEqual(tuple(img.shape), (3, 32, 48))
        self.assertEqual(img.dtype, torch.float32)
        self.assertTrue(float(img.min()) >= 0.0 and float(img.max()) <= 1.0)
        expected = self.records["miniature/01"].frames[6].pose.to_array()
        np.testing.assert_allclose(sample["data.gt.pose"].numpy(), expected, rtol=1e-6)

    def test_augmented_label(self) -> None:
        dataset = DockingFramesDataset.dataset(self.records, self.plan, "train", augment=AugmentConfig(), downscale_factor=2)
        sample = dataset[0]
        pose = Pose.from_array(sample["data.gt.pose"].numpy().astype(np.float64))
        original = self.records["miniature/01"].frames[0].pose
        # small camera rotation plus a lateral shift: the range barely changes
        self.assertAlmostEqual(np.linalg.norm(pose.translation), np.linalg.norm(original.translation), delta=0.1)
        self.assertFalse(np.array_equal(pose.to_array(), original.to_array()))

    def test_datamodule(self) -> None:
        dm = DockingDataModule(self.root, self.plan, batch_size=4, downscale_factor=2, records=self.records)
        dm.setup("fit")
        batch = next(iter(dm.train_dataloader()))
        self.assertEqual(tuple(batch["data.input.img"].shape), (4, 3, 32, 48))
        self.assertEqual(tuple(batch["data.gt.pose"].shape), (4, 7))
        self.assertEqual(tuple(batch["data.gt.t"].shape), (4, 3))
        self.assertEqual(tuple(batch["data.gt.rot6d"].shape), (4, 6))

    def tearDown(self) -> None:
        shutil.rmtree(self.root)


if __name__ == "__main__":
    unittest.main()

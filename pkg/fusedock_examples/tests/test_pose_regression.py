import unittest
import os
import json
from fusedock_examples.pose_regression.runner import main
from omegaconf import OmegaConf
from pathlib import Path
import tempfile
import shutil


class PoseRegressionTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self.root = tempfile.mkdtemp()

    def test_pose_regression(self) -> None:
        config_path = Path(__file__, "../../pose_regression/configs/train_config.yaml")
        cfg = OmegaConf.load(config_path)
        cfg.paths.root_dir = os.path.join(self.root, "test_pose_regression")
        cfg.params.data.preset = "miniature"
        cfg.params.data.count = 3
        cfg.params.data.workers = 1
        cfg.params.data.test_ids = ["miniature/03"]
        cfg.params.data.val_ids = ["miniature/02"]
        cfg.params.train.epochs = 1
        cfg.params.train.cycles = 1
        cfg.params.train.batch_size = 8
        cfg.params.train.downscale = 2
        cfg.params.train.blocks = 3
        cfg.params.train.width = 4
        cfg.params.train.num_workers = 0
        main(cfg)

        with open(os.path.join(cfg.paths.root_dir, "model_dir", "eval_dir", "summary.json")) as f:
            results = json.load(f)
        self.assertEqual([r["sequence"] for r in results], ["miniature/03"])

    def tearDown(self) -> None:
        # Delete temporary directories
        shutil.rmtree(self.root)


if __name__ == "__main__":
    unittest.main()

import unittest
import json
import os
import shutil
import tempfile

import numpy as np
import pandas as pd
from click.testing import CliRunner
from scipy.spatial.transform import Rotation

from fusedock.cli import cli
from fusedock.tests_data import get_tests_data_dir
from fusedock.utils.pose import Pose
from fusedock.calibration import simulate_samples, write_samples_csv
from fusedock.calibration.calib_io import STREAM_COLUMNS
from fusedock.data.docking import SplitPlan, load_sequence, write_split
from fusedock.eval.evaluate import write_predictions_csv


class TestCli(unittest.TestCase):
    def setUp(self) -> None:
        self.root = tempfile.mkdtemp()
        self.runner = CliRunner()

    def invoke(self, *args: str) -> object:
        return self.runner.invoke(cli, ["--out-dir", self.root] + list(args))

    def test_unknown_flag(self) -> None:
        result = self.invoke("split", "--no-such-flag")
        self.assertEqual(result.exit_code, 1)

    def test_missing_source(self) -> None:
        result = self.invoke("build-dataset")
        self.assertEqual(result.exit_code, 1)

    def test_output_outside_out_dir(self) -> None:
        tle_path = os.path.join(get_tests_data_dir(), "iss_example.tle")
        result = self.invoke("propagate", "--tle", tle_path, "--duration", "60", "--dt", "10", "--output", "../escaped.csv")
        self.assertEqual(result.exit_code, 1)
        self.assertFalse(os.path.exists(os.path.join(os.path.dirname(self.root), "escaped.csv")))

    def test_propagate(self) -> None:
        tle_path = os.path.join(get_tests_data_dir(), "iss_example.tle")
        result = self.invoke("propagate", "--tle", tle_path, "--duration", "600", "--dt", "10")
        self.assertEqual(result.exit_code, 0, result.stderr)
        df = pd.read_csv(os.path.join(self.root, "ephemeris.csv"))
        self.assertEqual(len(df), 61)

    def test_output_is_a_directory(self) -> None:
        tle_path = os.path.join(get_tests_data_dir(), "iss_example.tle")
        os.makedirs(os.path.join(self.root, "taken"))
        result = self.invoke("propagate", "--tle", tle_path, "--duration", "60", "--dt", "10", "--output", "taken")
        self.assertEqual(result.exit_code, 2)
        self.assertIn("IsADirectoryError", result.stderr)

    def test_out_dir_below_a_file(self) -> None:
        blocker = os.path.join(self.root, "blocker")
        with open(blocker, "w") as f:
            f.write("")
        tle_path = os.path.join(get_tests_data_dir(), "iss_example.tle")
        args = ["--out-dir", os.path.join(blocker, "run"), "propagate", "--tle", tle_path, "--duration", "60", "--dt", "10"]
        result = self.runner.invoke(cli, args)
        self.assertEqual(result.exit_code, 2)
        self.assertIn("error:", result.stderr)

    def test_invalid_config_value(self) -> None:
        tle_path = os.path.join(get_tests_data_dir(), "iss_example.tle")
        result = self.invoke("propagate", "--tle", tle_path, "--duration", "5", "--dt", "10")
        self.assertEqual(result.exit_code, 2)
        self.assertIn("ConfigInvalid", result.stderr)

    def test_gen_traj(self) -> None:
        result = self.invoke("--seed", "3", "gen-traj", "--defaults", "--preset", "miniature", "--count", "2")
        self.assertEqual(result.exit_code, 0, result.stderr)
        for number in (1, 2):
            self.assertTrue(os.path.isfile(os.path.join(self.root, "trajectories", "miniature", f"{number:02d}.jsonl")))

        result = self.invoke("gen-traj", "--defaults", "--preset", "miniature", "--set", "start_range=1.0")
        self.assertEqual(result.exit_code, 2)

    def test_split_too_short(self) -> None:
        result = self.invoke("build-dataset", "--defaults", "--preset", "miniature", "--count", "1")
        self.assertEqual(result.exit_code, 0, result.stderr)
        result = self.invoke("split", "--root", os.path.join(self.root, "dataset"))
        self.assertEqual(result.exit_code, 2)
        self.assertIn("TooShort", result.stderr)

    def test_eval_predictions(self) -> None:
        result = self.invoke("build-dataset", "--defaults", "--preset", "miniature", "--count", "1")
        self.assertEqual(result.exit_code, 0, result.stderr)
        sequence_dir = os.path.join(self.root, "dataset", "miniature", "01")
        sequence = load_sequence(sequence_dir)
        predictions_path = os.path.join(self.root, "predictions.csv")
        write_predictions_csv([f.t for f in sequence.frames], [f.pose for f in sequence.frames], predictions_path)

        result = self.invoke("eval", "--sequence", sequence_dir, "--predictions", predictions_path, "--emit-csv", "errors.csv")
        self.assertEqual(result.exit_code, 0, result.stderr)
        with open(os.path.join(self.root, "eval_summary.json")) as f:
            summary = json.load(f)
        self.assertEqual(summary["position_compliance_pct"], 100.0)
        self.assertEqual(summary["attitude_compliance_pct"], 100.0)
        self.assertEqual(summary["frames"], len(sequence.frames))
        self.assertEqual(len(pd.read_csv(os.path.join(self.root, "errors.csv"))), len(sequence.frames))

        result = self.invoke("eval", "--sequence", sequence_dir)
        self.assertEqual(result.exit_code, 1)

    def test_pipeline(self) -> None:
        result = self.invoke("--seed", "0", "build-dataset", "--defaults", "--preset", "miniature", "--count", "2", "--workers", "2")
        self.assertEqual(result.exit_code, 0, result.stderr)
        dataset_dir = os.path.join(self.root, "dataset")

        split_path = os.path.join(self.root, "split.json")
        write_split(SplitPlan(train=[("miniature/01", 0, 12)], val=[("miniature/02", 0, 6)], seed=0), split_path)
        overrides = ["epochs=2", "cycles=1", "batch_size=4", "downscale=2", "blocks=3", "width=4"]
        args = ["--seed", "5", "train", "--root", dataset_dir, "--split", split_path, "--run-dir", "run"]
        for o in overrides:
            args += ["--set", o]
        result = self.invoke(*args)
        self.assertEqual(result.exit_code, 0, result.stderr)
        metrics = pd.read_csv(os.path.join(self.root, "run", "metrics.csv"))
        self.assertEqual(len(metrics), 4)

        result = self.invoke(
            "eval",
            "--sequence",
            os.path.join(dataset_dir, "miniature", "02"),
            "--checkpoint",
            os.path.join(self.root, "run", "model.dkz"),
            "--emit-svg",
            "errors.svg",
        )
        self.assertEqual(result.exit_code, 0, result.stderr)
        self.assertIn("miniature/02", result.stdout)
        self.assertTrue(os.path.isfile(os.path.join(self.root, "errors.svg")))

    def test_calibrate(self) -> None:
        rng = np.random.default_rng(0)
        T_ic = Pose(rotation=Rotation.from_rotvec([0.1, -0.2, 0.3]).as_quat(), translation=[0.05, 0.0, -0.02])
        T_sb = Pose(rotation=Rotation.from_rotvec([-0.3, 0.1, 0.2]).as_quat(), translation=[0.0, 0.03, 0.01])
        samples = simulate_samples(T_ic, T_sb, 10, rng)
        samples_path = os.path.join(self.root, "samples.csv")
        write_samples_csv(samples, samples_path)
        stream_path = os.path.join(self.root, "stream.csv")
        rows = [[0.1 * k] + s.T_oi.to_list() + s.T_os.to_list() for k, s in enumerate(samples)]
        pd.DataFrame(rows, columns=STREAM_COLUMNS).to_csv(stream_path, index=False, float_format="%.17g")

        result = self.invoke("calibrate", "--samples", samples_path, "--stream", stream_path)
        self.assertEqual(result.exit_code, 0, result.stderr)
        with open(os.path.join(self.root, "calibration.json")) as f:
            values = json.load(f)
        np.testing.assert_allclose(values["T_ic"][:3], T_ic.translation, atol=1e-9)
        truth = pd.read_csv(os.path.join(self.root, "ground_truth.csv"))
        np.testing.assert_allclose(truth[["tx", "ty", "tz"]].to_numpy(), [s.T_cb.translation for s in samples], atol=1e-9)

        write_samples_csv(samples[:2], samples_path)
        result = self.invoke("calibrate", "--samples", samples_path)
        self.assertEqual(result.exit_code, 2)
        self.assertIn("TooFewSamples", result.stderr)

    def tearDown(self) -> None:
        shutil.rmtree(self.root)


if __name__ == "__main__":
    unittest.main()

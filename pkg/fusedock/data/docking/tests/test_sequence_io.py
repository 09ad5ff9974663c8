import unittest
import os
import shutil
import tempfile

import numpy as np

from fusedock.utils.errors import Malformed, MissingImage, TimestampGap
from fusedock.utils.pose import Pose
from fusedock.data.imaging import intrinsics_from_fov, write_ppm
from fusedock.data.docking import (
    FrameRecord,
    SequenceRecord,
    discover_sequences,
    frame_file_name,
    load_sequence,
    write_index,
    INDEX_FILE,
)


def write_dummy_sequence(root: str, sequence_id: str, num_frames: int, rate: float = 10.0) -> SequenceRecord:
    K = intrinsics_from_fov(16, 12, 60.0, 45.0)
    sequence_dir = os.path.join(root, sequence_id)
    os.makedirs(os.path.join(sequence_dir, "frames"))
    record = SequenceRecord(id=sequence_id, rate=rate, camera=K, directory=sequence_dir)
    for k in range(num_frames):
        image_path = frame_file_name(k)
        write_ppm(np.full((12, 16, 3), k % 256, dtype=np.uint8), os.path.join(sequence_dir, image_path))
        pose = Pose(translation=[0.0, 0.0, 10.0 - 0.01 * k])
        record.frames.append(FrameRecord(t=k / rate, image_path=image_path, pose=pose, phase=1 + min(2, k // 4)))
    write_index(record, sequence_dir)
    return record


class TestSequenceIO(unittest.TestCase):
    def setUp(self) -> None:
        self.root = tempfile.mkdtemp()
        self.record = write_dummy_sequence(self.root, "synthetic/02", 10)
        self.sequence_dir = os.path.join(self.root, "synthetic/02")

    def test_round_trip(self) -> None:
        loaded = load_sequence(self.sequence_dir)
        self.assertEqual(loaded.id, self.record.id)
        self.assertEqual(loaded.rate, self.record.rate)
        self.assertEqual(loaded.camera, self.record.camera)
        self.assertEqual(loaded.frames, self.record.frames)
        self.assertFalse(loaded.test)
        self.assertEqual(load_sequence(os.path.join(self.sequence_dir, INDEX_FILE)).frames, loaded.frames)

    def test_missing_image(self) -> None:
        os.remove(os.path.join(self.sequence_dir, frame_file_name(3)))
        with self.assertRaises(MissingImage):
            load_sequence(self.sequence_dir)
        # index only
        self.assertEqual(len(load_sequence(self.sequence_dir, check_images=False)), 10)

    def test_timestamp_gap(self) -> None:
        frames = list(self.record.frames)
        frames[5] = FrameRecord(t=0.55, image_path=frames[5].image_path, pose=frames[5].pose, phase=frames[5].phase)
        self.record.frames = frames
        write_index(self.record, self.sequence_dir)
        with self.assertRaises(TimestampGap):
            load_sequence(self.sequence_dir)

    def test_malformed(self) -> None:
        index_path = os.path.join(self.sequence_dir, INDEX_FILE)
        with open(index_path, "at") as f:
            f.write('{"t": 1.0, "image": "frames/000010.ppm"}\n')
        with self.assertRaises(Malformed):
            load_sequence(self.sequence_dir)
        with open(index_path, "wt") as f:
            f.write("not json\n")
        with self.assertRaises(Malformed):
            load_sequence(self.sequence_dir)

    def test_image_size(self) -> None:
        write_ppm(np.zeros((5, 5, 3), dtype=np.uint8), os.path.join(self.sequence_dir, frame_file_name(0)))
        with self.assertRaises(Malformed):
            load_sequence(self.sequence_dir)

    def test_discover(self) -> None:
        write_dummy_sequence(self.root, "synthetic/08", 4)
        records = discover_sequences(self.root)
        self.assertEqual(sorted(records.keys()), ["synthetic/02", "synthetic/08"])

    def test_frame_count(self) -> None:
        # fence post: 300 s at 10 Hz
        frames = [FrameRecord(t=k / 10.0, image_path="", pose=Pose(), phase=2) for k in range(3001)]
        record = SequenceRecord(id="long", rate=10.0, camera=self.record.camera, frames=frames)
        self.assertEqual(len(record), 3001)
        self.assertAlmostEqual(record.frames[-1].t - record.frames[0].t, 300.0)

    def tearDown(self) -> None:
        shutil.rmtree(self.root)


if __name__ == "__main__":
    unittest.main()

"""
On-disk sequence layout:
    <root>/<seq-id>/index.jsonl       header {id, rate, camera, test}, then one {t, image, pose, phase} object per frame
    <root>/<seq-id>/frames/%06d.ppm
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional
import json
import os

from fusedock.utils.errors import BadFov, IoFailure, Malformed, MissingImage, TimestampGap
from fusedock.utils.pose import Pose
from fusedock.data.imaging import CameraIntrinsics, read_ppm_size

INDEX_FILE = "index.jsonl"
FRAMES_DIR = "frames"
TIMESTAMP_TOL = 1e-6


def frame_file_name(index: int) -> str:
    return os.path.join(FRAMES_DIR, f"{index:06d}.ppm")


@dataclass(frozen=True)
class FrameRecord:
    t: float
    image_path: str  # relative to the sequence directory
    pose: Pose
    phase: int


@dataclass
class SequenceRecord:
    id: str
    rate: float
    camera: CameraIntrinsics
    frames: List[FrameRecord] = field(default_factory=list)
    test: bool = False
    directory: Optional[str] = None

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def duration(self) -> float:
        """seconds covered by the frames, counting one frame period per frame"""
        return len(self.frames) / self.rate

    def image_path(self, index: int) -> str:
        if self.directory is None:
            raise Exception(f"sequence {self.id} is not attached to a directory")
        return os.path.join(self.directory, self.frames[index].image_path)


def write_index(record: SequenceRecord, sequence_dir: str) -> str:
    """writes index.jsonl through a temporary file; returns its path"""
    path = os.path.join(sequence_dir, INDEX_FILE)
    tmp_path = path + ".tmp"
    header = dict(id=record.id, rate=record.rate, camera=record.camera.to_dict(), test=record.test)
    try:
        with open(tmp_path, "wt") as f:
            f.write(json.dumps(header) + "\n")
            for frame in record.frames:
                f.write(json.dumps(dict(t=frame.t, image=frame.image_path, pose=frame.pose.to_list(), phase=frame.phase)) + "\n")
        os.replace(tmp_path, path)
    except OSError as e:
        raise IoFailure(f"failed writing {path}: {e}")
    return path


def _check_timestamps(record: SequenceRecord, path: str) -> None:
    if len(record.frames) == 0:
        return
    t0 = record.frames[0].t
    for k, frame in enumerate(record.frames):
        expected = t0 + k / record.rate
        if abs(frame.t - expected) > TIMESTAMP_TOL:
            raise TimestampGap(f"{path}: frame {k} at t={frame.t} s, expected {expected} s at {record.rate} Hz")


def _check_images(record: SequenceRecord, path: str) -> None:
    expected = (record.camera.width, record.camera.height)
    for k in range(len(record.frames)):
        image_path = record.image_path(k)
        if not os.path.isfile(image_path):
            raise MissingImage(f"{path}: frame {k} image {image_path} does not exist")
        size = read_ppm_size(image_path)
        if tuple(size) != expected:
            raise Malformed(f"{path}: frame {k} image is {size[0]}x{size[1]}, camera is {expected[0]}x{expected[1]}")


def load_sequence(path: str, check_images: bool = True) -> SequenceRecord:
    """
    :param path: sequence directory or its index file
    :param check_images: verify every frame image exists and matches the camera size
    """
    index_path = os.path.join(path, INDEX_FILE) if os.path.isdir(path) else path
    try:
        with open(index_path, "rt") as f:
            lines = [line for line in f if len(line.strip()) > 0]
    except OSError as e:
        raise IoFailure(f"failed reading {index_path}: {e}")
    if len(lines) == 0:
        raise Malformed(f"{index_path}: empty index")

    try:
        header = json.loads(lines[0])
        record = SequenceRecord(
            id=str(header["id"]),
            rate=float(header["rate"]),
            camera=CameraIntrinsics.from_dict(header["camera"]),
            test=bool(header.get("test", False)),
            directory=os.path.dirname(os.path.abspath(index_path)),
        )
        if record.rate <= 0:
            raise ValueError(f"rate must be positive, got {record.rate}")
    except (ValueError, KeyError, TypeError, BadFov) as e:
        raise Malformed(f"{index_path}:1: invalid header ({e})")

    for line_num, line in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(line)
            record.frames.append(
                FrameRecord(t=float(obj["t"]), image_path=str(obj["image"]), pose=Pose.from_array(obj["pose"]), phase=int(obj["phase"]))
            )
        except Exception as e:
            raise Malformed(f"{index_path}:{line_num}: invalid frame ({e})")

    _check_timestamps(record, index_path)
    if check_images:
        _check_images(record, index_path)
    return record


def discover_sequences(root: str, check_images: bool = True) -> Dict[str, SequenceRecord]:
    """all sequences below root, keyed by id"""
    records = {}
    for dirpath, _, filenames in sorted(os.walk(root)):
        if INDEX_FILE in filenames:
            record = load_sequence(dirpath, check_images=check_images)
            if record.id in records:
                raise Malformed(f"duplicate sequence id {record.id} under {root}")
            records[record.id] = record
    return records

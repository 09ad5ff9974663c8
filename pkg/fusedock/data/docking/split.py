"""
Train / validation partition by chunks of consecutive frames.

Every non-test sequence is cut into chunks whose lengths are drawn from a range of powers of two seconds; a
shuffled subset of the chunks forms the validation part, the rest (plus any remainder shorter than the smallest
chunk) is used for training. Held-out test sequences are never partitioned.
"""

from dataclasses import dataclass, field
from typing import List, Tuple
import json
import logging
import os

import numpy as np

from fusedock.utils.errors import IoFailure, Malformed, TooShort
from fusedock.data.docking.sequence_io import SequenceRecord

lgr = logging.getLogger("Fuse")

CHUNK_SECONDS = (64, 128, 256, 512, 1024)
MIN_TOTAL_SECONDS = 128.0
VAL_FRACTION = 0.20
VAL_FRACTION_MAX = 0.25

# (sequence id, first frame, end frame exclusive)
FrameRange = Tuple[str, int, int]


@dataclass
class SplitPlan:
    train: List[FrameRange] = field(default_factory=list)
    val: List[FrameRange] = field(default_factory=list)
    seed: int = 0
    test: List[str] = field(default_factory=list)

    @staticmethod
    def frames(ranges: List[FrameRange]) -> int:
        return sum(stop - start for _, start, stop in ranges)

    @property
    def val_fraction(self) -> float:
        total = self.frames(self.train) + self.frames(self.val)
        return self.frames(self.val) / total if total > 0 else 0.0


def _chunk_sequence(record: SequenceRecord, rng: np.random.Generator) -> Tuple[List[FrameRange], List[FrameRange]]:
    """:return: chunks, remainder"""
    chunks = []
    start = 0
    n = len(record.frames)
    while start < n:
        remaining_s = (n - start) / record.rate
        allowed = [c for c in CHUNK_SECONDS if c <= remaining_s]
        if len(allowed) == 0:
            return chunks, [(record.id, start, n)]
        length = int(round(allowed[rng.integers(len(allowed))] * record.rate))
        chunks.append((record.id, start, start + length))
        start += length
    return chunks, []


def split(records: List[SequenceRecord], seed: int) -> SplitPlan:
    pool = sorted((r for r in records if not r.test), key=lambda r: r.id)
    total_s = sum(r.duration for r in pool)
    if total_s < MIN_TOTAL_SECONDS:
        raise TooShort(f"need at least {MIN_TOTAL_SECONDS} s of non-test frames to split, got {total_s:.1f} s")

    rng = np.random.default_rng(seed)
    chunks: List[FrameRange] = []
    train: List[FrameRange] = []
    for record in pool:
        record_chunks, remainder = _chunk_sequence(record, rng)
        chunks.extend(record_chunks)
        train.extend(remainder)

    total_frames = sum(len(r.frames) for r in pool)
    val: List[FrameRange] = []
    val_frames = 0
    for i in rng.permutation(len(chunks)):
        chunk = chunks[i]
        size = chunk[2] - chunk[1]
        if val_frames < VAL_FRACTION * total_frames and val_frames + size <= VAL_FRACTION_MAX * total_frames:
            val.append(chunk)
            val_frames += size
        else:
            train.append(chunk)

    plan = SplitPlan(
        train=sorted(train), val=sorted(val), seed=seed, test=sorted(r.id for r in records if r.test)
    )
    if plan.val_fraction < VAL_FRACTION - 0.05:
        lgr.warning(f"validation part holds only {100 * plan.val_fraction:.1f}% of the frames")
    return plan


def _ranges_to_json(ranges: List[FrameRange]) -> list:
    return [dict(id=i, start=start, stop=stop) for i, start, stop in ranges]


def _ranges_from_json(items: list) -> List[FrameRange]:
    return [(str(d["id"]), int(d["start"]), int(d["stop"])) for d in items]


def write_split(plan: SplitPlan, path: str) -> None:
    obj = dict(seed=plan.seed, train=_ranges_to_json(plan.train), val=_ranges_to_json(plan.val), test=plan.test)
    tmp_path = path + ".tmp"
    try:
        with open(tmp_path, "wt") as f:
            json.dump(obj, f, indent=2)
            f.write("\n")
        os.replace(tmp_path, path)
    except OSError as e:
        raise IoFailure(f"failed writing {path}: {e}")


def read_split(path: str) -> SplitPlan:
    try:
        with open(path, "rt") as f:
            obj = json.load(f)
    except OSError as e:
        raise IoFailure(f"failed reading {path}: {e}")
    except ValueError as e:
        raise Malformed(f"{path}: invalid split file ({e})")
    try:
        return SplitPlan(
            train=_ranges_from_json(obj["train"]),
            val=_ranges_from_json(obj["val"]),
            seed=int(obj["seed"]),
            test=[str(i) for i in obj.get("test", [])],
        )
    except (KeyError, TypeError, ValueError) as e:
        raise Malformed(f"{path}: invalid split file ({e})")

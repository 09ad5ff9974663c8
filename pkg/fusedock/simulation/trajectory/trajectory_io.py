import json
import os
from typing import List

from fusedock.utils.errors import Malformed
from fusedock.utils.pose import Pose
from fusedock.simulation.trajectory.generator import RelativeSample


def write_trajectory_jsonl(samples: List[RelativeSample], path: str) -> None:
    """one object per line: {t, phase, pose: [tx, ty, tz, qx, qy, qz, qw]}, written to a temp file then renamed"""
    tmp_path = path + ".tmp"
    with open(tmp_path, "wt") as f:
        for s in samples:
            f.write(json.dumps(dict(t=s.t, phase=s.phase, pose=s.pose.to_list())) + "\n")
    os.replace(tmp_path, path)


def read_trajectory_jsonl(path: str) -> List[RelativeSample]:
    samples = []
    with open(path, "rt") as f:
        for line_num, line in enumerate(f):
            if len(line.strip()) == 0:
                continue
            try:
                obj = json.loads(line)
                samples.append(
                    RelativeSample(t=float(obj["t"]), pose=Pose.from_array(obj["pose"]), phase=int(obj["phase"]))
                )
            except Exception as e:
                raise Malformed(f"{path}:{line_num + 1}: invalid trajectory sample ({e})")
    return samples

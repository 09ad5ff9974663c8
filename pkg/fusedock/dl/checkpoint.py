"""
Checkpoint format:
    b"DKZ1" | header length, uint32 little endian | JSON header | float32 little endian values

The header lists every tensor (name, shape) in storage order and carries the training config.
"""

from collections import OrderedDict
from typing import Dict, Tuple
import json
import os
import struct

import numpy as np
import torch

from fusedock.utils.errors import IoFailure, Malformed

MAGIC = b"DKZ1"
FORMAT_VERSION = 1


def save_checkpoint(path: str, state_dict: Dict[str, torch.Tensor], config: dict) -> None:
    tensors = [(name, t.detach().cpu().to(torch.float32).contiguous()) for name, t in state_dict.items()]
    header = dict(
        version=FORMAT_VERSION,
        tensors=[dict(name=name, shape=list(t.shape)) for name, t in tensors],
        config=config,
    )
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    tmp_path = path + ".tmp"
    try:
        with open(tmp_path, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<I", len(header_bytes)))
            f.write(header_bytes)
            for _, t in tensors:
                f.write(t.numpy().astype("<f4").tobytes())
        os.replace(tmp_path, path)
    except OSError as e:
        raise IoFailure(f"failed writing checkpoint {path}: {e}")


def load_checkpoint(path: str) -> Tuple["OrderedDict[str, torch.Tensor]", dict]:
    """:return: state dict, training config"""
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise IoFailure(f"failed reading checkpoint {path}: {e}")

    if data[:4] != MAGIC or len(data) < 8:
        raise Malformed(f"{path} is not a checkpoint (bad magic)")
    (header_len,) = struct.unpack("<I", data[4:8])
    try:
        header = json.loads(data[8 : 8 + header_len].decode("utf-8"))
        if header["version"] != FORMAT_VERSION:
            raise ValueError(f"unsupported version {header['version']}")
        specs = [(str(t["name"]), [int(d) for d in t["shape"]]) for t in header["tensors"]]
    except (ValueError, KeyError, TypeError) as e:
        raise Malformed(f"{path}: invalid checkpoint header ({e})")

    try:
        values = np.frombuffer(data, dtype="<f4", offset=8 + header_len)
    except ValueError as e:
        raise Malformed(f"{path}: truncated checkpoint ({e})")
    expected = sum(int(np.prod(shape)) for _, shape in specs)
    if len(values) != expected:
        raise Malformed(f"{path}: expected {expected} values, found {len(values)}")

    state_dict: "OrderedDict[str, torch.Tensor]" = OrderedDict()
    offset = 0
    for name, shape in specs:
        count = int(np.prod(shape))
        state_dict[name] = torch.from_numpy(values[offset : offset + count].astype(np.float32).reshape(shape))
        offset += count
    return state_dict, header.get("config", {})

import os
from typing import Tuple

import numpy as np
from PIL import Image

from fusedock.utils.errors import IoFailure


def write_ppm(img: np.ndarray, path: str) -> None:
    """binary P6, maxval 255; written to a temp file then renamed into place"""
    if img.dtype != np.uint8 or img.ndim != 3 or img.shape[2] != 3:
        raise Exception(f"Error: expected a height x width x 3 uint8 image, got {img.dtype} {img.shape}")
    tmp_path = path + ".tmp"
    try:
        Image.fromarray(np.ascontiguousarray(img)).save(tmp_path, format="PPM")
        os.replace(tmp_path, path)
    except OSError as e:
        raise IoFailure(f"failed writing {path}: {e}")


def read_ppm(path: str) -> np.ndarray:
    try:
        with Image.open(path) as im:
            return np.asarray(im.convert("RGB"), dtype=np.uint8)
    except OSError as e:
        raise IoFailure(f"failed reading {path}: {e}")


def read_ppm_size(path: str) -> Tuple[int, int]:
    """(width, height) from the header only"""
    try:
        with Image.open(path) as im:
            return im.size
    except OSError as e:
        raise IoFailure(f"failed reading {path}: {e}")

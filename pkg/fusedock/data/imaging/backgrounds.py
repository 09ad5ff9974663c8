from functools import lru_cache
import math

import cv2
import numpy as np

from fusedock.data.imaging.perlin import fractal_noise

BACKGROUND_MODES = ("black", "perlin", "clutter")
CLUTTER_SHAPES = 30


def background(width: int, height: int, mode: str, seed: int) -> np.ndarray:
    """height x width x 3 uint8 background, read only and cached per (size, mode, seed)"""
    if mode not in BACKGROUND_MODES:
        raise Exception(f"Error: unsupported background mode {mode}. Supported modes: {BACKGROUND_MODES}")
    return _cached_background(int(width), int(height), mode, int(seed))


@lru_cache(maxsize=16)
def _cached_background(width: int, height: int, mode: str, seed: int) -> np.ndarray:
    if mode == "black":
        img = np.zeros((height, width, 3), dtype=np.uint8)
    elif mode == "perlin":
        img = _perlin_background(width, height, seed)
    else:
        img = _clutter_background(width, height, seed)
    img.flags.writeable = False
    return img


def _perlin_background(width: int, height: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    tint = rng.uniform(0.6, 1.0, size=3)
    level = rng.uniform(60.0, 140.0)
    noise = fractal_noise(width, height, seed, cell_px=max(width, height) / 8.0)
    intensity = np.clip(level * (1.0 + noise), 0.0, 255.0)
    return np.rint(intensity[..., None] * tint[None, None, :]).astype(np.uint8)


def _clutter_background(width: int, height: int, seed: int) -> np.ndarray:
    """random shaded rectangles and triangles, a stand-in for station structure behind the fixture"""
    rng = np.random.default_rng(seed)
    img = np.zeros((height, width, 3), dtype=np.uint8)
    diagonal = math.hypot(width, height)
    for _ in range(CLUTTER_SHAPES):
        center = rng.uniform([0.0, 0.0], [width, height])
        size = rng.uniform(0.05, 0.35) * diagonal
        angle = rng.uniform(0.0, 2.0 * math.pi)
        if rng.random() < 0.5:
            aspect = rng.uniform(0.2, 1.0)
            local = np.array([[-1.0, -aspect], [1.0, -aspect], [1.0, aspect], [-1.0, aspect]]) * size / 2.0
        else:
            corner_angles = angle + np.sort(rng.uniform(0.0, 2.0 * math.pi, size=3))
            local = np.stack([np.cos(corner_angles), np.sin(corner_angles)], axis=1) * size / 2.0
        rotation = np.array([[math.cos(angle), -math.sin(angle)], [math.sin(angle), math.cos(angle)]])
        corners = local @ rotation.T + center
        grey = rng.uniform(30.0, 200.0)
        color = tuple(int(c) for c in np.clip(grey * rng.uniform(0.85, 1.15, size=3), 0, 255))
        cv2.fillConvexPoly(img, np.rint(corners).astype(np.int32), color, lineType=cv2.LINE_8)
    return img

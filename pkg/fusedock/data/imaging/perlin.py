from functools import lru_cache
from typing import Union
import math

import numpy as np

ArrayOrScalar = Union[float, np.ndarray]

# unit gradients at 45 deg steps
_GRADIENTS = np.stack(
    [np.cos(np.arange(8) * math.pi / 4.0), np.sin(np.arange(8) * math.pi / 4.0)], axis=1
)


@lru_cache(maxsize=64)
def _permutation(seed: int) -> np.ndarray:
    p = np.random.default_rng(seed).permutation(256)
    return np.concatenate([p, p])


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _corner_dot(perm: np.ndarray, xi: np.ndarray, yi: np.ndarray, dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    g = _GRADIENTS[perm[perm[xi] + yi] & 7]
    return g[..., 0] * dx + g[..., 1] * dy


def perlin2d(x: ArrayOrScalar, y: ArrayOrScalar, seed: int) -> ArrayOrScalar:
    """
    Classic gradient lattice noise with quintic fade. Accepts scalars or broadcastable arrays.
    Zero at integer lattice points, values in [-1, 1].
    """
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x, y = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    perm = _permutation(int(seed))

    x0 = np.floor(x)
    y0 = np.floor(y)
    xf = x - x0
    yf = y - y0
    xi = np.mod(x0, 256).astype(np.int64)
    yi = np.mod(y0, 256).astype(np.int64)

    n00 = _corner_dot(perm, xi, yi, xf, yf)
    n10 = _corner_dot(perm, xi + 1, yi, xf - 1.0, yf)
    n01 = _corner_dot(perm, xi, yi + 1, xf, yf - 1.0)
    n11 = _corner_dot(perm, xi + 1, yi + 1, xf - 1.0, yf - 1.0)

    u = _fade(xf)
    v = _fade(yf)
    nx0 = n00 + u * (n10 - n00)
    nx1 = n01 + u * (n11 - n01)
    value = np.clip(nx0 + v * (nx1 - nx0), -1.0, 1.0)
    if scalar:
        return float(value)
    return value


def fractal_noise(width: int, height: int, seed: int, cell_px: float = 64.0, octaves: int = 4) -> np.ndarray:
    """height x width field in [-1, 1], octaves of perlin2d with halving amplitude"""
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    total = np.zeros((height, width))
    norm = 0.0
    for octave in range(octaves):
        frequency = (2.0**octave) / cell_px
        amplitude = 0.5**octave
        total += amplitude * perlin2d(xs * frequency, ys * frequency, seed + octave)
        norm += amplitude
    return total / norm

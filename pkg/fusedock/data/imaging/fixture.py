"""
Procedural berthing fixture in the target frame F_t.

The front face of the plate lies in z = 0 and faces -z (towards an approaching camera); the docking axis is +z.
Parts:
    * square plate, 0.6 m side, 0.05 m thick, with a central hole
    * drogue funnel, outer radius 0.18 m at z = 0 narrowing to a 0.05 m throat at depth 0.12 m
    * four corner guide pins, radius 0.02 m, protruding 0.06 m; pin 0 is coloured to break the symmetry
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List
import math

import numpy as np

PLATE_HALF_SIDE = 0.3
PLATE_THICKNESS = 0.05
CONE_OUTER_RADIUS = 0.18
CONE_THROAT_RADIUS = 0.05
CONE_DEPTH = 0.12
CONE_SEGMENTS = 16
PIN_RADIUS = 0.02
PIN_HEIGHT = 0.06
PIN_OFFSET = 0.25
PIN_SEGMENTS = 8

ALBEDO_PLATE = (0.55, 0.55, 0.55)
ALBEDO_CONE = (0.75, 0.75, 0.75)
ALBEDO_PIN = (0.9, 0.9, 0.9)
ALBEDO_MARKED_PIN = (0.9, 0.3, 0.2)

FREE_SPACE = np.array([0.0, 0.0, -1.0])


@dataclass(frozen=True)
class FixtureModel:
    vertices: np.ndarray  # V x 3 [m]
    faces: np.ndarray  # F x 3 vertex indices, counter-clockwise around the outward normal
    albedo: np.ndarray  # F x 3, RGB in [0, 1]
    normals: np.ndarray  # F x 3 outward unit normals
    keypoints: Dict[str, np.ndarray]

    @property
    def keypoint_names(self) -> List[str]:
        return sorted(self.keypoints.keys())

    def keypoint_array(self) -> np.ndarray:
        return np.stack([self.keypoints[name] for name in self.keypoint_names])


class _MeshBuilder:
    def __init__(self) -> None:
        self.vertices: List[np.ndarray] = []
        self.faces: List[List[int]] = []
        self.albedo: List[tuple] = []
        self.normals: List[np.ndarray] = []

    def triangle(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, albedo: tuple, outward_hint: np.ndarray) -> None:
        a, b, c = (np.asarray(v, dtype=np.float64) for v in (a, b, c))
        normal = np.cross(b - a, c - a)
        if np.dot(normal, outward_hint) < 0:
            b, c = c, b
            normal = -normal
        first = len(self.vertices)
        self.vertices.extend([a, b, c])
        self.faces.append([first, first + 1, first + 2])
        self.albedo.append(albedo)
        self.normals.append(normal / np.linalg.norm(normal))

    def quad(self, a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray, albedo: tuple, outward_hint: np.ndarray) -> None:
        """a-b-c-d in order around the quad"""
        self.triangle(a, b, c, albedo, outward_hint)
        self.triangle(a, c, d, albedo, outward_hint)

    def build(self, keypoints: Dict[str, np.ndarray]) -> FixtureModel:
        return FixtureModel(
            vertices=np.array(self.vertices),
            faces=np.array(self.faces, dtype=np.int64),
            albedo=np.array(self.albedo, dtype=np.float64),
            normals=np.array(self.normals),
            keypoints={k: np.asarray(v, dtype=np.float64) for k, v in keypoints.items()},
        )


def _ring(radius: float, z: float, segments: int, center: tuple = (0.0, 0.0)) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(segments) / segments
    return np.stack(
        [center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles), np.full(segments, z)], axis=1
    )


def _square_boundary(half_side: float, segments: int) -> np.ndarray:
    """points on the square boundary along the same rays as _ring (corners fall on multiples of 45 deg)"""
    angles = 2.0 * math.pi * np.arange(segments) / segments
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    scale = half_side / np.max(np.abs(directions), axis=1, keepdims=True)
    return np.concatenate([directions * scale, np.zeros((segments, 1))], axis=1)


@lru_cache(maxsize=1)
def default_fixture() -> FixtureModel:
    mesh = _MeshBuilder()

    # plate front face with the drogue hole
    rim = _ring(CONE_OUTER_RADIUS, 0.0, CONE_SEGMENTS)
    square = _square_boundary(PLATE_HALF_SIDE, CONE_SEGMENTS)
    for i in range(CONE_SEGMENTS):
        j = (i + 1) % CONE_SEGMENTS
        mesh.quad(rim[i], square[i], square[j], rim[j], ALBEDO_PLATE, FREE_SPACE)

    # plate sides
    h, d = PLATE_HALF_SIDE, PLATE_THICKNESS
    corners = [(h, h), (-h, h), (-h, -h), (h, -h)]
    for i in range(4):
        (x0, y0), (x1, y1) = corners[i], corners[(i + 1) % 4]
        outward = np.array([(x0 + x1) / 2.0, (y0 + y1) / 2.0, 0.0])
        mesh.quad([x0, y0, 0.0], [x1, y1, 0.0], [x1, y1, d], [x0, y0, d], ALBEDO_PLATE, outward)

    # drogue funnel and its bottom
    throat = _ring(CONE_THROAT_RADIUS, CONE_DEPTH, CONE_SEGMENTS)
    for i in range(CONE_SEGMENTS):
        j = (i + 1) % CONE_SEGMENTS
        centroid = (rim[i] + rim[j] + throat[i] + throat[j]) / 4.0
        mesh.quad(rim[i], rim[j], throat[j], throat[i], ALBEDO_CONE, FREE_SPACE * 0.5 - centroid)
    bottom_center = np.array([0.0, 0.0, CONE_DEPTH])
    for i in range(CONE_SEGMENTS):
        j = (i + 1) % CONE_SEGMENTS
        mesh.triangle(bottom_center, throat[i], throat[j], ALBEDO_CONE, FREE_SPACE)

    # guide pins
    pin_centers = [(PIN_OFFSET, PIN_OFFSET), (-PIN_OFFSET, PIN_OFFSET), (-PIN_OFFSET, -PIN_OFFSET), (PIN_OFFSET, -PIN_OFFSET)]
    keypoints = {}
    for pin, (cx, cy) in enumerate(pin_centers):
        albedo = ALBEDO_MARKED_PIN if pin == 0 else ALBEDO_PIN
        base = _ring(PIN_RADIUS, 0.0, PIN_SEGMENTS, (cx, cy))
        top = _ring(PIN_RADIUS, -PIN_HEIGHT, PIN_SEGMENTS, (cx, cy))
        tip = np.array([cx, cy, -PIN_HEIGHT])
        for i in range(PIN_SEGMENTS):
            j = (i + 1) % PIN_SEGMENTS
            outward = (base[i] + base[j]) / 2.0 - np.array([cx, cy, 0.0])
            mesh.quad(base[i], base[j], top[j], top[i], albedo, outward)
            mesh.triangle(tip, top[i], top[j], albedo, FREE_SPACE)
        keypoints[f"pin_tip_{pin}"] = tip

    for name, (x, y) in zip(("pp", "mp", "mm", "pm"), corners):
        keypoints[f"plate_corner_{name}"] = np.array([x, y, 0.0])
    keypoints["drogue_rim_centre"] = np.zeros(3)

    return mesh.build(keypoints)

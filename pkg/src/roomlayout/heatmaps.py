"""Keypoint containers and the Gaussian heatmap codec.

Keypoints live in continuous image coordinates with the origin at the
top-left corner, x growing right and y growing down. A heatmap stack has
one channel per prototype keypoint ID of its group; absent IDs are all-zero
channels. Channel values are an unnormalized Gaussian sampled on the pixel
grid, peak 1.0 when the keypoint falls on a grid node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .taxonomy import GROUPS, HypothesisGroup

DEFAULT_HEATMAP_SIZE = (80, 80)
DEFAULT_SIGMA = 2.0
DEFAULT_MIN_CONF = 0.2


@dataclass(frozen=True)
class Keypoint:
    id: int
    x: float
    y: float
    confidence: float = 1.0


@dataclass(frozen=True)
class KeypointSet:
    """Keypoints of one hypothesis group, sorted by strictly increasing ID."""

    group: HypothesisGroup
    frame_size: tuple[int, int]  # (width, height) the coordinates refer to
    keypoints: tuple[Keypoint, ...]

    def __post_init__(self):
        w, h = self.frame_size
        if w <= 0 or h <= 0:
            raise ValueError(f"frame size must be positive, got {self.frame_size}")
        ids = [k.id for k in self.keypoints]
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise ValueError(f"keypoint ids must be strictly increasing, got {ids}")
        legal = set(range(1, self.group.keypoint_count + 1))
        if not set(ids) <= legal:
            raise ValueError(f"ids {sorted(set(ids) - legal)} not in group {self.group.tag} prototype table")
        for k in self.keypoints:
            if not (math.isfinite(k.x) and math.isfinite(k.y)):
                raise ValueError(f"keypoint {k.id} has non-finite coordinates ({k.x}, {k.y})")

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(k.id for k in self.keypoints)

    def __len__(self) -> int:
        return len(self.keypoints)

    def get(self, keypoint_id: int) -> Keypoint:
        for k in self.keypoints:
            if k.id == keypoint_id:
                return k
        raise KeyError(f"keypoint id {keypoint_id} not present")

    def coords(self) -> np.ndarray:
        """(n, 2) array of xy coordinates in ID order."""
        return np.array([(k.x, k.y) for k in self.keypoints], dtype=float).reshape(-1, 2)

    def subset(self, ids) -> "KeypointSet":
        wanted = set(ids)
        return replace(self, keypoints=tuple(k for k in self.keypoints if k.id in wanted))


def make_keypoint_set(group, frame_size, points, confidences=None) -> KeypointSet:
    """Build a KeypointSet from an {id: (x, y)} mapping."""
    if isinstance(group, str):
        group = GROUPS[group]
    items = sorted(points.items())
    kps = []
    for kid, (x, y) in items:
        conf = 1.0 if confidences is None else float(confidences.get(kid, 1.0))
        kps.append(Keypoint(int(kid), float(x), float(y), conf))
    return KeypointSet(group=group, frame_size=(int(frame_size[0]), int(frame_size[1])), keypoints=tuple(kps))


@dataclass
class HeatmapStack:
    """Per-ID confidence maps; channel i holds prototype ID i+1."""

    group: HypothesisGroup
    sigma: float
    data: np.ndarray  # (channels, height, width), values in [0, 1]

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ValueError(f"heatmap data must be (C, H, W), got shape {self.data.shape}")
        if self.data.shape[0] != self.group.keypoint_count:
            raise ValueError(
                f"group {self.group.tag} needs {self.group.keypoint_count} channels, got {self.data.shape[0]}"
            )

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def size(self) -> tuple[int, int]:
        return (self.width, self.height)


def encode(kps: KeypointSet, resolution: tuple[int, int] = DEFAULT_HEATMAP_SIZE, sigma: float = DEFAULT_SIGMA) -> HeatmapStack:
    """Encode a keypoint set as a stack of Gaussian heatmaps.

    Coordinates are rescaled from the set's frame to `resolution`. A keypoint
    whose Gaussian window falls entirely off the grid leaves its channel zero,
    which decodes back to "absent".
    """
    width, height = int(resolution[0]), int(resolution[1])
    if width <= 0 or height <= 0:
        raise ValueError(f"heatmap resolution must be positive, got {resolution}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")

    data = np.zeros((kps.group.keypoint_count, height, width), dtype=np.float64)
    sx = width / kps.frame_size[0]
    sy = height / kps.frame_size[1]
    radius = int(math.ceil(3.0 * sigma))
    for kp in kps.keypoints:
        cx, cy = kp.x * sx, kp.y * sy
        x0 = max(0, int(math.floor(cx)) - radius)
        x1 = min(width, int(math.floor(cx)) + radius + 1)
        y0 = max(0, int(math.floor(cy)) - radius)
        y1 = min(height, int(math.floor(cy)) + radius + 1)
        if x0 >= x1 or y0 >= y1:
            continue
        xs = np.arange(x0, x1, dtype=np.float64)
        ys = np.arange(y0, y1, dtype=np.float64)
        g = np.exp(-((xs[None, :] - cx) ** 2 + (ys[:, None] - cy) ** 2) / (2.0 * sigma * sigma))
        data[kp.id - 1, y0:y1, x0:x1] = g
    return HeatmapStack(group=kps.group, sigma=float(sigma), data=data)


def decode(stack: HeatmapStack, min_conf: float = DEFAULT_MIN_CONF) -> KeypointSet:
    """Decode heatmap peaks back into keypoints in the heatmap's own frame.

    Per channel: row-major argmax (first of equal maxima), refined by the
    intensity-weighted centroid of the surrounding 3x3 window. Channels whose
    peak is below `min_conf` decode to an absent ID.
    """
    height, width = stack.data.shape[1:]
    kps = []
    for ch in range(stack.data.shape[0]):
        plane = stack.data[ch]
        flat = int(np.argmax(plane))
        py, px = divmod(flat, width)
        peak = float(plane[py, px])
        if peak < min_conf:
            continue
        y0, y1 = max(0, py - 1), min(height, py + 2)
        x0, x1 = max(0, px - 1), min(width, px + 2)
        window = plane[y0:y1, x0:x1]
        total = float(window.sum())
        if total > 0.0:
            ys, xs = np.mgrid[y0:y1, x0:x1]
            cx = float((window * xs).sum() / total)
            cy = float((window * ys).sum() / total)
        else:
            cx, cy = float(px), float(py)
        kps.append(Keypoint(id=ch + 1, x=cx, y=cy, confidence=peak))
    return KeypointSet(group=stack.group, frame_size=(width, height), keypoints=tuple(kps))


def rescale_keypoints(kps: KeypointSet, to: tuple[int, int]) -> KeypointSet:
    """Scale coordinates to a new frame size; IDs and confidences unchanged."""
    tw, th = int(to[0]), int(to[1])
    if tw <= 0 or th <= 0:
        raise ValueError(f"target frame size must be positive, got {to}")
    sx = tw / kps.frame_size[0]
    sy = th / kps.frame_size[1]
    scaled = tuple(replace(k, x=k.x * sx, y=k.y * sy) for k in kps.keypoints)
    return KeypointSet(group=kps.group, frame_size=(tw, th), keypoints=scaled)

"""Layout construction from keypoints and rasterization to label masks.

A layout is described by up to two x-monotone boundary chains (ceiling and
floor) spanning the full image width and up to two y-monotone wall/wall
boundaries connecting them. Rasterization classifies pixel centers at
(column + 0.5, row + 0.5) against these polylines, which yields a gap-free,
overlap-free partition in O(pixels).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .heatmaps import KeypointSet
from .taxonomy import (
    HypothesisGroup,
    SemanticLabel,
    required_keypoint_ids,
    wall_labels_of_group,
)

# Keypoints may sit this far outside the image (fraction of size) and are
# clipped; beyond that layout construction fails.
BORDER_SLACK = 0.10


class LayoutError(ValueError):
    """Raised when keypoints cannot form a valid layout."""


@dataclass(frozen=True)
class LayoutEdge:
    """One boundary segment with the pair of regions it separates.

    For ceiling/floor segments the pair is (upper region, lower region); for
    wall/wall boundaries it is (left region, right region).
    """

    start: tuple[float, float]
    end: tuple[float, float]
    regions: tuple[SemanticLabel, SemanticLabel]


@dataclass
class Layout:
    group: HypothesisGroup
    keypoints: KeypointSet
    floor_present: bool
    ceiling_present: bool
    image_size: tuple[int, int]
    ceiling_chain: np.ndarray | None  # (n, 2), x weakly increasing from 0 to width
    floor_chain: np.ndarray | None
    wall_boundaries: tuple[np.ndarray, ...]  # each (2, 2) as [top, bottom]

    @property
    def region_count(self) -> int:
        return self.group.wall_count + int(self.floor_present) + int(self.ceiling_present)


def _ray_rect_exit(anchor, toward, width, height):
    """Last point of the ray anchor->toward inside [0,w]x[0,h], or None.

    Liang-Barsky clipping of the half-line t >= 0 against the rectangle.
    """
    ax, ay = anchor
    dx, dy = toward[0] - ax, toward[1] - ay
    if dx == 0.0 and dy == 0.0:
        return None
    t0, t1 = 0.0, np.inf
    for d, lo, hi, a in ((dx, 0.0, width, ax), (dy, 0.0, height, ay)):
        if d == 0.0:
            if a < lo or a > hi:
                return None
            continue
        ta, tb = (lo - a) / d, (hi - a) / d
        if ta > tb:
            ta, tb = tb, ta
        t0, t1 = max(t0, ta), min(t1, tb)
    if t1 < t0:
        return None
    return np.array([ax + t1 * dx, ay + t1 * dy])


def _clip_point(p, width, height):
    return np.array([min(max(p[0], 0.0), float(width)), min(max(p[1], 0.0), float(height))])


def _build_chain(interior, left_toward, right_toward, width, height, what):
    """Assemble a full-width x-monotone chain from interior points and the
    directions of its two terminal edges."""
    pts = []
    left_exit = _ray_rect_exit(interior[0], left_toward, width, height)
    if left_exit is not None:
        pts.append(left_exit)
    pts.extend(interior)
    right_exit = _ray_rect_exit(interior[-1], right_toward, width, height)
    if right_exit is not None:
        pts.append(right_exit)

    pts = [_clip_point(p, width, height) for p in pts]
    xs = [p[0] for p in pts]
    if any(b < a - 1e-9 for a, b in zip(xs, xs[1:])):
        raise LayoutError(f"{what} chain is not x-monotone (xs={np.round(xs, 3).tolist()})")

    if pts[0][0] > 0.0:
        pts.insert(0, np.array([0.0, pts[0][1]]))
    if pts[-1][0] < float(width):
        pts.append(np.array([float(width), pts[-1][1]]))
    return np.array(pts)


def _eval_chain(chain: np.ndarray, xs: np.ndarray) -> np.ndarray:
    # Tiny strictly-increasing nudge so np.interp tolerates duplicate x's.
    xp = chain[:, 0] + np.arange(len(chain)) * 1e-9
    return np.interp(xs, xp, chain[:, 1])


def _eval_boundary(boundary: np.ndarray, ys: np.ndarray) -> np.ndarray:
    yp = boundary[:, 1] + np.arange(len(boundary)) * 1e-9
    return np.interp(ys, yp, boundary[:, 0])


def build_layout(
    group: HypothesisGroup,
    kps: KeypointSet,
    floor_present: bool,
    ceiling_present: bool,
    image_size: tuple[int, int],
) -> Layout:
    """Construct boundary chains from a keypoint set.

    The set must contain exactly the IDs the (group, presence) combination
    demands; junction keypoints are connected directly and terminal edges are
    extended along their direction to the image border.
    """
    width, height = int(image_size[0]), int(image_size[1])
    if width <= 0 or height <= 0:
        raise LayoutError(f"image size must be positive, got {image_size}")
    if tuple(kps.frame_size) != (width, height):
        raise LayoutError(f"keypoint frame {kps.frame_size} does not match image size {(width, height)}")
    if kps.group is not group and kps.group.tag != group.tag:
        raise LayoutError(f"keypoint set is for group {kps.group.tag}, expected {group.tag}")

    needed = required_keypoint_ids(group, floor_present, ceiling_present)
    have = kps.ids
    if have != needed:
        missing = sorted(set(needed) - set(have))
        extra = sorted(set(have) - set(needed))
        raise LayoutError(
            f"group {group.tag} with floor={floor_present} ceiling={ceiling_present} "
            f"requires ids {list(needed)}: missing {missing}, extra {extra}"
        )

    for k in kps.keypoints:
        if not (-BORDER_SLACK * width <= k.x <= (1 + BORDER_SLACK) * width) or not (
            -BORDER_SLACK * height <= k.y <= (1 + BORDER_SLACK) * height
        ):
            raise LayoutError(f"keypoint {k.id} at ({k.x:.1f}, {k.y:.1f}) is too far outside the image")

    p = {k.id: np.array([k.x, k.y]) for k in kps.keypoints}
    ceiling_chain = None
    floor_chain = None
    boundaries: list[np.ndarray] = []

    if group.tag == "A":
        if ceiling_present:
            if p[2][0] < p[1][0] - 1e-9:
                raise LayoutError("ceiling junctions out of left-right order")
            ceiling_chain = _build_chain([p[1], p[2]], p[5], p[6], width, height, "ceiling")
        if floor_present:
            if p[4][0] < p[3][0] - 1e-9:
                raise LayoutError("floor junctions out of left-right order")
            floor_chain = _build_chain([p[3], p[4]], p[7], p[8], width, height, "floor")
        boundaries = [np.array([p[1], p[3]]), np.array([p[2], p[4]])]
    elif group.tag == "B":
        if ceiling_present:
            ceiling_chain = _build_chain([p[1]], p[3], p[4], width, height, "ceiling")
        if floor_present:
            floor_chain = _build_chain([p[2]], p[5], p[6], width, height, "floor")
        boundaries = [np.array([p[1], p[2]])]
    elif group.tag == "C":
        if ceiling_present:
            if p[2][0] < p[1][0] - 1e-9:
                raise LayoutError("ceiling line endpoints out of left-right order")
            ceiling_chain = _build_chain([p[1], p[2]], 2 * p[1] - p[2], 2 * p[2] - p[1], width, height, "ceiling")
        if floor_present:
            if p[4][0] < p[3][0] - 1e-9:
                raise LayoutError("floor line endpoints out of left-right order")
            floor_chain = _build_chain([p[3], p[4]], 2 * p[3] - p[4], 2 * p[4] - p[3], width, height, "floor")
    else:
        raise LayoutError(f"unknown group {group!r}")

    clipped = []
    for b in boundaries:
        top, bottom = _clip_point(b[0], width, height), _clip_point(b[1], width, height)
        if bottom[1] < top[1] - 1e-9:
            raise LayoutError("wall boundary is not y-monotone (junctions vertically inverted)")
        clipped.append(np.array([top, bottom]))

    if ceiling_chain is not None and floor_chain is not None:
        knots = np.unique(np.concatenate([ceiling_chain[:, 0], floor_chain[:, 0]]))
        if np.any(_eval_chain(ceiling_chain, knots) > _eval_chain(floor_chain, knots) + 1e-9):
            raise LayoutError("ceiling chain crosses below floor chain")

    return Layout(
        group=group,
        keypoints=kps,
        floor_present=bool(floor_present),
        ceiling_present=bool(ceiling_present),
        image_size=(width, height),
        ceiling_chain=ceiling_chain,
        floor_chain=floor_chain,
        wall_boundaries=tuple(clipped),
    )


def _scaled(poly: np.ndarray | None, sx: float, sy: float):
    if poly is None:
        return None
    return poly * np.array([sx, sy])


def rasterize(layout: Layout, size: tuple[int, int] | None = None, wall_labels=None) -> np.ndarray:
    """Rasterize a layout to a (h, w) uint8 label mask with no void pixels.

    Pixel centers above the ceiling chain become CEILING, below the floor
    chain FLOOR; the rest are split into wall regions by the x position
    relative to each wall boundary evaluated at the pixel's y.
    """
    if size is None:
        size = layout.image_size
    width, height = int(size[0]), int(size[1])
    sx, sy = width / layout.image_size[0], height / layout.image_size[1]
    if wall_labels is None:
        wall_labels = wall_labels_of_group(layout.group)

    xs = np.arange(width) + 0.5
    ys = np.arange(height) + 0.5

    mask = np.full((height, width), int(wall_labels[0]), dtype=np.uint8)
    if len(wall_labels) > 1:
        col = xs[None, :]
        assigned = np.zeros((height, width), dtype=bool)
        for i, boundary in enumerate(layout.wall_boundaries):
            bx = _eval_boundary(_scaled(boundary, sx, sy), ys)[:, None]
            left_of = (col < bx) & ~assigned
            mask[left_of] = int(wall_labels[i])
            assigned |= left_of
        mask[~assigned] = int(wall_labels[-1])

    if layout.ceiling_chain is not None:
        cy = _eval_chain(_scaled(layout.ceiling_chain, sx, sy), xs)
        mask[ys[:, None] < cy[None, :]] = int(SemanticLabel.CEILING)
    if layout.floor_chain is not None:
        fy = _eval_chain(_scaled(layout.floor_chain, sx, sy), xs)
        mask[ys[:, None] > fy[None, :]] = int(SemanticLabel.FLOOR)
    return mask


def _chain_edges(chain, boundaries, wall_labels, horizontal_region, above, width, height):
    """Split a chain into segments tagged with the wall they run along."""
    split_x = [b[0][0] if above else b[1][0] for b in boundaries]
    edges = []
    for a, b in zip(chain[:-1], chain[1:]):
        if np.hypot(*(b - a)) < 1e-9:
            continue
        on_border = any(
            abs(a[axis] - lim) < 1e-9 and abs(b[axis] - lim) < 1e-9
            for axis, lims in ((0, (0.0, width)), (1, (0.0, height)))
            for lim in lims
        )
        if on_border:
            continue
        mid = 0.5 * (a[0] + b[0])
        wall = wall_labels[sum(mid > x for x in split_x)]
        pair = (horizontal_region, wall) if above else (wall, horizontal_region)
        edges.append(LayoutEdge(start=(float(a[0]), float(a[1])), end=(float(b[0]), float(b[1])), regions=pair))
    return edges


def edges_of_layout(layout: Layout, wall_labels=None) -> list[LayoutEdge]:
    """All boundary segments of a layout, tagged with their region pairs."""
    if wall_labels is None:
        wall_labels = wall_labels_of_group(layout.group)
    width, height = layout.image_size
    edges: list[LayoutEdge] = []
    if layout.ceiling_chain is not None:
        edges += _chain_edges(
            layout.ceiling_chain, layout.wall_boundaries, wall_labels, SemanticLabel.CEILING, True, width, height
        )
    if layout.floor_chain is not None:
        edges += _chain_edges(
            layout.floor_chain, layout.wall_boundaries, wall_labels, SemanticLabel.FLOOR, False, width, height
        )
    for i, boundary in enumerate(layout.wall_boundaries):
        a, b = boundary
        if np.hypot(*(b - a)) < 1e-9:
            continue
        edges.append(
            LayoutEdge(
                start=(float(a[0]), float(a[1])),
                end=(float(b[0]), float(b[1])),
                regions=(wall_labels[i], wall_labels[i + 1]),
            )
        )
    return edges

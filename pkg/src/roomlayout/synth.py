"""Synthetic box-room scenes with analytic ground truth.

A scene is a room of unit wall width, height `aspect`, and depth
`room_depth`, viewed by a pinhole camera strictly inside it that faces the
front wall. Ground truth (room type, keypoints, label mask, depth) follows
from ray/box geometry alone, which makes these scenes a desk-scale oracle
for the layout, selection, and depth-recovery code paths.

`perturb` turns one ground truth into the three per-group hypothesis inputs:
the true group sees its own (optionally noised) data, while the two wrong
groups receive that group's keypoint slots projected from the actual scene
geometry. Slots of walls the image does not show land outside the heatmap
grid, so the wrong hypotheses lose required keypoints or build implausible
layouts, mirroring how specialist predictors fail on unfamiliar rooms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .camera import axis_angle_from_matrix, euler_rotation, pixel_ray_directions, rotation_matrix
from .heatmaps import (
    DEFAULT_HEATMAP_SIZE,
    DEFAULT_SIGMA,
    HeatmapStack,
    KeypointSet,
    encode,
    make_keypoint_set,
)
from .hypothesis import HypothesisInput
from .taxonomy import (
    GROUPS,
    HypothesisGroup,
    SemanticLabel,
    required_keypoint_ids,
    type_for_presence,
    wall_labels_of_group,
)

DEFAULT_IMAGE_SIZE = (320, 320)

# Box face indices used by the ray-exit classification.
_F_LEFT, _F_FRONT, _F_RIGHT, _F_FLOOR, _F_CEILING, _F_BACK = range(6)
_WALL_FACES = {"left": _F_LEFT, "front": _F_FRONT, "right": _F_RIGHT}
_FACE_TO_A_LABEL = {
    "left": SemanticLabel.LEFT_WALL,
    "front": SemanticLabel.CENTER_WALL,
    "right": SemanticLabel.RIGHT_WALL,
}

_SENTINEL_SCALE = -4.0  # far-out coordinate for slots with no valid projection


@dataclass(frozen=True)
class SceneRanges:
    """Sampling intervals and validity margins for scene generation."""

    aspect: tuple[float, float] = (0.6, 2.0)
    focal: tuple[float, float] = (0.6, 1.5)  # multiples of image width
    wall_distance: tuple[float, float] = (0.35, 2.0)  # camera to front wall, wall widths
    extra_depth: tuple[float, float] = (0.25, 1.5)  # room continues this far behind the camera
    lateral: float = 0.35  # max |x| camera offset, wall widths
    vertical: float = 0.3  # max |y| offset, fraction of wall height
    yaw_deg: float = 35.0
    pitch_deg: float = 20.0
    roll_deg: float = 5.0
    min_total_tilt_deg: float = 0.0  # lower bound on sqrt(yaw^2 + pitch^2)
    min_region_fraction: float = 0.025  # every visible region must cover this much
    absent_inflate: float = 0.08  # absent regions must stay out of a border-inflated view
    junction_margin: float = 0.012  # interior margin for junction keypoints, fraction of size
    max_attempts: int = 4000


DEFAULT_RANGES = SceneRanges()


@dataclass(frozen=True)
class SyntheticScene:
    seed: int
    image_size: tuple[int, int]
    aspect: float  # wall height / width
    room_depth: float  # front wall to back wall, wall widths
    focal: float  # pixels
    rotation: tuple[float, float, float]  # axis-angle, world to camera
    camera_position: tuple[float, float, float]  # world coordinates
    room_type: int
    group_tag: str

    @property
    def rotation_matrix(self) -> np.ndarray:
        return rotation_matrix(np.array(self.rotation))

    @property
    def translation(self) -> np.ndarray:
        return -self.rotation_matrix @ np.array(self.camera_position)

    @property
    def group(self) -> HypothesisGroup:
        return GROUPS[self.group_tag]


@dataclass(frozen=True)
class NoiseConfig:
    keypoint_jitter: float = 0.0  # pixel std at image scale
    label_flip_prob: float = 0.0
    boundary_radius: int = 0  # label min/max filter half-width
    seed: int = 0

    def __post_init__(self):
        if self.keypoint_jitter < 0 or self.boundary_radius < 0:
            raise ValueError("noise magnitudes must be non-negative")
        if not 0.0 <= self.label_flip_prob <= 1.0:
            raise ValueError(f"flip probability must be in [0, 1], got {self.label_flip_prob}")


@dataclass
class SceneGroundTruth:
    scene: SyntheticScene
    room_type: int
    group: HypothesisGroup
    floor_present: bool
    ceiling_present: bool
    visible_walls: tuple[str, ...]  # subset of ("left", "front", "right"), image order
    keypoints: KeypointSet
    mask: np.ndarray
    depth: np.ndarray  # camera-frame forward coordinate per pixel

    @property
    def image_size(self) -> tuple[int, int]:
        return self.keypoints.frame_size


class _SceneGeometry:
    """Camera-side helpers bound to one (scene, image size) combination."""

    def __init__(self, aspect, room_depth, focal, rotation_mat, camera_position, image_size):
        self.aspect = float(aspect)
        self.room_depth = float(room_depth)
        self.focal = float(focal)
        self.rot = rotation_mat
        self.cam = np.asarray(camera_position, dtype=float)
        self.width, self.height = int(image_size[0]), int(image_size[1])

    @classmethod
    def of(cls, scene: SyntheticScene, image_size=None) -> "_SceneGeometry":
        size = image_size if image_size is not None else scene.image_size
        # The focal length is defined in the scene's own pixel scale.
        focal = scene.focal * size[0] / scene.image_size[0]
        return cls(scene.aspect, scene.room_depth, focal, scene.rotation_matrix, scene.camera_position, size)

    def to_camera(self, points_world) -> np.ndarray:
        p = np.asarray(points_world, dtype=float).reshape(-1, 3)
        return (p - self.cam) @ self.rot.T

    def project(self, point_world):
        """(u, v) of one world point, or None when at/behind the camera."""
        pc = self.to_camera(point_world)[0]
        if pc[2] < 1e-9:
            return None
        return (
            self.focal * pc[0] / pc[2] + self.width / 2.0,
            self.focal * pc[1] / pc[2] + self.height / 2.0,
        )

    def _border_solutions(self, anchor_world, dir_world):
        """All border crossings of the projected line anchor + s * dir, s free.

        Yields (s, u, v) for crossings with positive camera depth whose
        position lies on the border segment.
        """
        a = self.to_camera(anchor_world)[0]
        d = np.asarray(dir_world, dtype=float) @ self.rot.T
        f, w, h = self.focal, self.width, self.height
        sols = []
        for border, horizontal in ((0.0, False), (w, False), (0.0, True), (h, True)):
            if horizontal:
                bb = border - h / 2.0
                num = bb * a[2] - f * a[1]
                den = f * d[1] - bb * d[2]
            else:
                bb = border - w / 2.0
                num = bb * a[2] - f * a[0]
                den = f * d[0] - bb * d[2]
            if abs(den) < 1e-12:
                continue
            s = num / den
            z = a[2] + s * d[2]
            if z < 1e-9:
                continue
            u = f * (a[0] + s * d[0]) / z + w / 2.0
            v = f * (a[1] + s * d[1]) / z + h / 2.0
            coord = u if horizontal else v
            limit = w if horizontal else h
            if -1e-6 <= coord <= limit + 1e-6:
                sols.append((s, u, v))
        return sols

    def ray_border_crossing(self, anchor_world, dir_world):
        """First image-border crossing along the ray (smallest s > 0)."""
        sols = [s for s in self._border_solutions(anchor_world, dir_world) if s[0] > 1e-9]
        if not sols:
            return None
        _, u, v = min(sols)
        return (u, v)

    def line_border_crossing(self, anchor_world, dir_world, border: str):
        """Crossing of the projected line with the top or bottom border."""
        target_v = 0.0 if border == "top" else float(self.height)
        sols = self._border_solutions(anchor_world, dir_world)
        best = None
        for s, u, v in sols:
            if abs(v - target_v) < 1e-6 and (best is None or abs(s) < abs(best[0])):
                best = (s, u, v)
        if best is None:
            return None
        return (best[1], best[2])

    def sentinel(self):
        return (_SENTINEL_SCALE * self.width, _SENTINEL_SCALE * self.height)


def _face_pass(geom: _SceneGeometry, dirs_world: np.ndarray):
    """Exit face index and ray parameter for a grid of world-frame ray dirs.

    With camera-frame unit z directions the ray parameter equals the
    camera-frame depth of the hit point.
    """
    ox, oy, oz = geom.cam
    half_h = geom.aspect / 2.0
    dx, dy, dz = dirs_world[..., 0], dirs_world[..., 1], dirs_world[..., 2]

    def axis_hits(d, origin, lo, hi, lo_face, hi_face):
        safe = np.where(d == 0.0, 1.0, d)
        t = np.where(d > 0, (hi - origin) / safe, (lo - origin) / safe)
        t = np.where(d == 0.0, np.inf, t)
        face = np.where(d > 0, hi_face, lo_face)
        return t, face

    tx, fx = axis_hits(dx, ox, -0.5, 0.5, _F_LEFT, _F_RIGHT)
    ty, fy = axis_hits(dy, oy, -half_h, half_h, _F_CEILING, _F_FLOOR)
    tz, fz = axis_hits(dz, oz, -geom.room_depth, 0.0, _F_BACK, _F_FRONT)

    ts = np.stack([tx, ty, tz])
    faces = np.stack([fx, fy, fz])
    pick = np.argmin(ts, axis=0)
    t = np.take_along_axis(ts, pick[None], axis=0)[0]
    face = np.take_along_axis(faces, pick[None], axis=0)[0]
    return face, t


def _image_face_pass(geom: _SceneGeometry, size):
    dirs = pixel_ray_directions(size, geom.focal * size[0] / geom.width) @ geom.rot
    return _face_pass(geom, dirs)


def _window_face_fractions(geom: _SceneGeometry, inflate: float, samples: int):
    """Face fractions over a border-inflated view at a coarse sample grid."""
    w, h, f = geom.width, geom.height, geom.focal
    us = (np.linspace(-inflate * w, (1 + inflate) * w, samples) - w / 2.0) / f
    vs = (np.linspace(-inflate * h, (1 + inflate) * h, samples) - h / 2.0) / f
    dirs = np.empty((samples, samples, 3))
    dirs[..., 0] = us[None, :]
    dirs[..., 1] = vs[:, None]
    dirs[..., 2] = 1.0
    face, _ = _face_pass(geom, dirs @ geom.rot)
    counts = np.bincount(face.ravel(), minlength=6)
    return counts / face.size


def _b_edge_x(geom: _SceneGeometry, visible_walls) -> float:
    """Which vertical wall/wall edge a two-wall hypothesis should use."""
    if tuple(visible_walls) == ("left", "front"):
        return -0.5
    if tuple(visible_walls) == ("front", "right"):
        return 0.5
    half_h = geom.aspect / 2.0
    anchor_y = min(max(geom.cam[1], -0.8 * half_h), 0.8 * half_h)
    best, best_dist = -0.5, math.inf
    for e in (-0.5, 0.5):
        uv = geom.project((e, anchor_y, 0.0))
        dist = abs(uv[0] - geom.width / 2.0) if uv is not None else math.inf
        if dist < best_dist:
            best, best_dist = e, dist
    return best


def _vertical_edge_anchor(geom: _SceneGeometry, edge_x: float):
    half_h = geom.aspect / 2.0
    y = min(max(geom.cam[1], -0.8 * half_h), 0.8 * half_h)
    return np.array([edge_x, y, 0.0])


_DOWN = np.array([0.0, 1.0, 0.0])
_TOWARD_CAMERA = np.array([0.0, 0.0, -1.0])


def slot_keypoints(
    scene: SyntheticScene,
    group: HypothesisGroup,
    floor_present: bool,
    ceiling_present: bool,
    image_size,
    visible_walls,
) -> dict[int, tuple[float, float]]:
    """Project the group's required keypoint slots from the scene geometry.

    Works for any group, not just the scene's true one: slots the image
    cannot show (corners behind the camera, edges that never cross the view)
    come back as far-out sentinel coordinates.
    """
    geom = _SceneGeometry.of(scene, image_size)
    half_h = scene.aspect / 2.0
    needed = set(required_keypoint_ids(group, floor_present, ceiling_present))
    out: dict[int, tuple[float, float]] = {}

    def put(kid, value):
        if kid in needed:
            out[kid] = value if value is not None else geom.sentinel()

    if group.tag == "A":
        for edge_x, jc, jf, ce, fe in ((-0.5, 1, 3, 5, 7), (0.5, 2, 4, 6, 8)):
            top = np.array([edge_x, -half_h, 0.0])
            bottom = np.array([edge_x, half_h, 0.0])
            edge_anchor = _vertical_edge_anchor(geom, edge_x)
            put(jc, geom.project(top) if ceiling_present else geom.line_border_crossing(edge_anchor, _DOWN, "top"))
            put(jf, geom.project(bottom) if floor_present else geom.line_border_crossing(edge_anchor, _DOWN, "bottom"))
            if ceiling_present:
                put(ce, geom.ray_border_crossing(top, _TOWARD_CAMERA))
            if floor_present:
                put(fe, geom.ray_border_crossing(bottom, _TOWARD_CAMERA))
    elif group.tag == "B":
        edge_x = _b_edge_x(geom, visible_walls)
        along_front = np.array([1.0 if edge_x < 0 else -1.0, 0.0, 0.0])
        top = np.array([edge_x, -half_h, 0.0])
        bottom = np.array([edge_x, half_h, 0.0])
        edge_anchor = _vertical_edge_anchor(geom, edge_x)
        put(1, geom.project(top) if ceiling_present else geom.line_border_crossing(edge_anchor, _DOWN, "top"))
        put(2, geom.project(bottom) if floor_present else geom.line_border_crossing(edge_anchor, _DOWN, "bottom"))
        if ceiling_present:
            side = geom.ray_border_crossing(top, _TOWARD_CAMERA)
            front = geom.ray_border_crossing(top, along_front)
            put(3, side if edge_x < 0 else front)
            put(4, front if edge_x < 0 else side)
        if floor_present:
            side = geom.ray_border_crossing(bottom, _TOWARD_CAMERA)
            front = geom.ray_border_crossing(bottom, along_front)
            put(5, side if edge_x < 0 else front)
            put(6, front if edge_x < 0 else side)
    elif group.tag == "C":
        right3d = np.array([1.0, 0.0, 0.0])
        if ceiling_present:
            anchor = np.array([geom.cam[0], -half_h, 0.0])
            put(1, geom.ray_border_crossing(anchor, -right3d))
            put(2, geom.ray_border_crossing(anchor, right3d))
        if floor_present:
            anchor = np.array([geom.cam[0], half_h, 0.0])
            put(3, geom.ray_border_crossing(anchor, -right3d))
            put(4, geom.ray_border_crossing(anchor, right3d))
    else:
        raise ValueError(f"unknown group {group!r}")
    return out


def _classify(geom: _SceneGeometry, ranges: SceneRanges, grid: int = 120):
    """Presence classification with validity margins; None when invalid."""
    w, h = geom.width, geom.height
    dirs = pixel_ray_directions((grid, grid), geom.focal * grid / w) @ geom.rot
    if np.any(dirs[..., 2] <= 0):
        return None  # some rays point backward; box-exit labels would be meaningless
    face, _ = _face_pass(geom, dirs)
    frac = np.bincount(face.ravel(), minlength=6) / face.size
    frac_inflated = _window_face_fractions(geom, ranges.absent_inflate, max(64, grid))

    if frac[_F_BACK] > 0 or frac_inflated[_F_BACK] > 0:
        return None
    visible = []
    for name, idx in (("left", _F_LEFT), ("front", _F_FRONT), ("right", _F_RIGHT)):
        if frac[idx] >= ranges.min_region_fraction:
            visible.append(name)
        elif frac_inflated[idx] > 0:
            return None  # in the margin gray zone
    if "front" not in visible:
        return None

    def optional_flag(idx):
        if frac[idx] >= ranges.min_region_fraction:
            return True
        if frac_inflated[idx] > 0:
            return None
        return False

    floor_present = optional_flag(_F_FLOOR)
    ceiling_present = optional_flag(_F_CEILING)
    if floor_present is None or ceiling_present is None:
        return None
    return tuple(visible), floor_present, ceiling_present


def _junction_ids(group: HypothesisGroup) -> tuple[int, ...]:
    return {"A": (1, 2, 3, 4), "B": (1, 2), "C": ()}[group.tag]


def _slots_well_formed(group, slots, floor_present, ceiling_present, size, margin_frac) -> bool:
    w, h = size
    mx, my = margin_frac * w, margin_frac * h
    for kid, (x, y) in slots.items():
        if not (-1.0 <= x <= w + 1.0 and -1.0 <= y <= h + 1.0):
            return False
        if kid in _junction_ids(group):
            if not mx <= x <= w - mx:
                return False
            # Junctions of a present region must sit strictly inside; the
            # reused border-endpoint slots only need the x margin.
            level_present = ceiling_present if (group.tag != "A" and kid == 1) or (
                group.tag == "A" and kid in (1, 2)
            ) else floor_present
            if level_present and not my <= y <= h - my:
                return False
    if group.tag == "A":
        if not (slots[1][0] + 2 * mx <= slots[2][0] and slots[3][0] + 2 * mx <= slots[4][0]):
            return False
    if group.tag == "C":
        # Canonical single-wall layouts have their boundary lines crossing the
        # side borders, not the top/bottom ones.
        for a, b in ((1, 2), (3, 4)):
            if a in slots and b in slots:
                if not (slots[a][0] <= mx and slots[b][0] >= w - mx):
                    return False
                if not (my <= slots[a][1] <= h - my and my <= slots[b][1] <= h - my):
                    return False
    return True


def sample_scene(
    seed: int,
    ranges: SceneRanges = DEFAULT_RANGES,
    image_size=DEFAULT_IMAGE_SIZE,
    require_type: int | None = None,
    require_group: str | None = None,
) -> SyntheticScene:
    """Rejection-sample a valid scene, deterministically for a given seed."""
    rng = np.random.default_rng(seed)
    w, h = int(image_size[0]), int(image_size[1])

    for _ in range(ranges.max_attempts):
        aspect = rng.uniform(*ranges.aspect)
        focal = rng.uniform(*ranges.focal) * w
        dist = rng.uniform(*ranges.wall_distance)
        room_depth = dist + rng.uniform(*ranges.extra_depth)
        cx = rng.uniform(-ranges.lateral, ranges.lateral)
        cy = rng.uniform(-ranges.vertical, ranges.vertical) * aspect
        yaw = math.radians(rng.uniform(-ranges.yaw_deg, ranges.yaw_deg))
        pitch = math.radians(rng.uniform(-ranges.pitch_deg, ranges.pitch_deg))
        roll = math.radians(rng.uniform(-ranges.roll_deg, ranges.roll_deg))
        if math.hypot(math.degrees(yaw), math.degrees(pitch)) < ranges.min_total_tilt_deg:
            continue

        rot = euler_rotation(yaw, pitch, roll)
        geom = _SceneGeometry(aspect, room_depth, focal, rot, (cx, cy, -dist), (w, h))
        outcome = _classify(geom, ranges)
        if outcome is None:
            continue
        visible, floor_present, ceiling_present = outcome
        group = GROUPS["ABC"[3 - len(visible)]]
        room_type = type_for_presence(group, floor_present, ceiling_present)
        if room_type is None:
            continue
        if require_type is not None and room_type != require_type:
            continue
        if require_group is not None and group.tag != require_group:
            continue

        scene = SyntheticScene(
            seed=int(seed),
            image_size=(w, h),
            aspect=float(aspect),
            room_depth=float(room_depth),
            focal=float(focal),
            rotation=tuple(float(v) for v in axis_angle_from_matrix(rot)),
            camera_position=(float(cx), float(cy), float(-dist)),
            room_type=int(room_type),
            group_tag=group.tag,
        )
        slots = slot_keypoints(scene, group, floor_present, ceiling_present, (w, h), visible)
        if set(slots) != set(required_keypoint_ids(group, floor_present, ceiling_present)):
            continue
        if not _slots_well_formed(group, slots, floor_present, ceiling_present, (w, h), ranges.junction_margin):
            continue
        return scene

    raise RuntimeError(
        f"rejection budget of {ranges.max_attempts} attempts exhausted for seed {seed} "
        f"(require_type={require_type}, require_group={require_group})"
    )


def scene_to_groundtruth(scene: SyntheticScene, image_size=None) -> SceneGroundTruth:
    """Analytic room type, keypoints, label mask, and depth for a scene."""
    size = tuple(image_size) if image_size is not None else scene.image_size
    geom = _SceneGeometry.of(scene, size)
    face, depth = _image_face_pass(geom, size)
    if np.any(face == _F_BACK):
        raise ValueError("scene shows the back wall; not a valid single-room view")

    frac = np.bincount(face.ravel(), minlength=6) / face.size
    visible = tuple(name for name, idx in _WALL_FACES.items() if frac[idx] > 0.01)
    if "front" not in visible:
        raise ValueError("front wall not visible; degenerate scene")
    floor_present = bool(frac[_F_FLOOR] > 0.01)
    ceiling_present = bool(frac[_F_CEILING] > 0.01)
    group = GROUPS["ABC"[3 - len(visible)]]
    room_type = type_for_presence(group, floor_present, ceiling_present)
    if room_type is None:
        raise ValueError("scene shows a bare wall with neither floor nor ceiling")

    lut = np.zeros(6, dtype=np.uint8)
    lut[_F_FLOOR] = int(SemanticLabel.FLOOR)
    lut[_F_CEILING] = int(SemanticLabel.CEILING)
    labels = wall_labels_of_group(group)
    for label, name in zip(labels, visible):
        lut[_WALL_FACES[name]] = int(label)
    mask = lut[face]

    slots = slot_keypoints(scene, group, floor_present, ceiling_present, size, visible)
    keypoints = make_keypoint_set(group, size, slots)
    return SceneGroundTruth(
        scene=scene,
        room_type=room_type,
        group=group,
        floor_present=floor_present,
        ceiling_present=ceiling_present,
        visible_walls=visible,
        keypoints=keypoints,
        mask=mask,
        depth=depth,
    )


def _relabel_walls(gt: SceneGroundTruth, target: HypothesisGroup, geom: _SceneGeometry) -> np.ndarray:
    """Rewrite the true mask's wall labels into the target group's alphabet."""
    lut = np.arange(6, dtype=np.uint8)
    src_labels = wall_labels_of_group(gt.group)
    if target.tag == gt.group.tag:
        pass
    elif target.tag == "C":
        for lab in src_labels:
            lut[int(lab)] = int(SemanticLabel.CENTER_WALL)
    elif target.tag == "A":
        for lab, face_name in zip(src_labels, gt.visible_walls):
            lut[int(lab)] = int(_FACE_TO_A_LABEL[face_name])
    elif target.tag == "B":
        tgt = wall_labels_of_group(target)
        edge_x = _b_edge_x(geom, gt.visible_walls)
        for lab, face_name in zip(src_labels, gt.visible_walls):
            if gt.group.tag == "A":
                left_of_edge = (face_name == "left") if edge_x < 0 else (face_name in ("left", "front"))
            else:  # single-wall truth
                left_of_edge = edge_x > 0
            lut[int(lab)] = int(tgt[0] if left_of_edge else tgt[1])
    return lut[gt.mask]


def _flip_labels(seg: np.ndarray, prob: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each non-void pixel with probability `prob` to another label that
    is present in the mask (absent regions are never hallucinated)."""
    present = np.array(sorted(int(v) for v in np.unique(seg) if v != int(SemanticLabel.VOID)))
    if len(present) < 2 or prob <= 0:
        return seg
    flip = (rng.random(seg.shape) < prob) & (seg != int(SemanticLabel.VOID))
    n = int(np.count_nonzero(flip))
    if n == 0:
        return seg
    index_of = np.zeros(6, dtype=np.int64)
    index_of[present] = np.arange(len(present))
    cur = index_of[seg[flip]]
    draw = rng.integers(0, len(present) - 1, size=n)
    new = draw + (draw >= cur)
    out = seg.copy()
    out[flip] = present[new].astype(seg.dtype)
    return out


def perturb(
    gt: SceneGroundTruth,
    noise: NoiseConfig = NoiseConfig(),
    sigma: float = DEFAULT_SIGMA,
    heatmap_size=DEFAULT_HEATMAP_SIZE,
) -> dict[str, HypothesisInput]:
    """Produce the three per-group hypothesis inputs for one ground truth.

    The true group's input carries the (noised) ground truth; the wrong
    groups get their keypoint slots projected from the same scene geometry
    and the true mask rewritten into their wall alphabet.
    """
    size = gt.image_size
    geom = _SceneGeometry.of(gt.scene, size)
    rng = np.random.default_rng(noise.seed)
    inputs: dict[str, HypothesisInput] = {}
    for tag in ("A", "B", "C"):
        group = GROUPS[tag]
        if tag == gt.group.tag:
            slots = {k.id: (k.x, k.y) for k in gt.keypoints.keypoints}
        else:
            slots = slot_keypoints(gt.scene, group, gt.floor_present, gt.ceiling_present, size, gt.visible_walls)
        if noise.keypoint_jitter > 0 and slots:
            jit = rng.normal(0.0, noise.keypoint_jitter, size=(len(slots), 2))
            slots = {kid: (x + jit[i, 0], y + jit[i, 1]) for i, (kid, (x, y)) in enumerate(sorted(slots.items()))}
        kps = make_keypoint_set(group, size, slots)
        stack: HeatmapStack = encode(kps, heatmap_size, sigma)

        seg = _relabel_walls(gt, group, geom)
        if noise.label_flip_prob > 0:
            seg = _flip_labels(seg, noise.label_flip_prob, rng)
        if noise.boundary_radius > 0:
            footprint = 2 * noise.boundary_radius + 1
            if rng.integers(0, 2) == 0:
                seg = ndimage.grey_erosion(seg, size=footprint)
            else:
                seg = ndimage.grey_dilation(seg, size=footprint)
        inputs[tag] = HypothesisInput(group=group, segmentation=seg, heatmaps=stack)
    return inputs

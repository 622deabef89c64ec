"""Relative depth from a full three-wall layout with both floor and ceiling.

The room is modeled as a box of unit wall width (fixing the scale gauge),
unknown height/width ratio, focal length, and camera pose. Parameters are
found by damped least squares on the reprojection error of the four center
wall corners plus point-to-line distances of samples along the four edges
running perpendicular to the wall. A weak prior keeps the focal length near
its initial value because in (near-)frontoparallel views the perpendicular
edges all project through the principal point for any focal length, leaving
f and the camera distance separately unobservable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .camera import pixel_ray_directions, project_points, rotation_matrix
from .heatmaps import KeypointSet
from .layout import Layout, LayoutError, rasterize
from .taxonomy import SemanticLabel


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 200
    initial_damping: float = 1e-3
    cost_tolerance: float = 1e-10
    step_tolerance: float = 1e-10
    focal_prior_weight: float = 1e-3
    edge_samples: int = 10
    jacobian_step: float = 1e-6
    condition_limit: float = 1e8


@dataclass
class CameraFit:
    """Recovered box/camera parameters, scale fixed by unit wall width."""

    aspect: float  # center wall height / width
    focal: float  # pixels
    rotation: np.ndarray  # axis-angle (3,)
    translation: np.ndarray  # (3,), wall-width units
    rms_residual: float  # pixels, over the geometric residuals
    converged: bool
    iterations: int
    degenerate: bool  # normal-equations conditioning above the limit
    image_size: tuple[int, int]


@dataclass
class DepthMap:
    values: np.ndarray  # (h, w) camera-frame forward-axis coordinate
    min_value: float
    max_value: float
    filled_pixels: int  # pixels recovered from a neighbor (ray parallel to plane)


def box_corners(aspect: float) -> np.ndarray:
    """Center wall corners in keypoint ID order 1..4 (top-left, top-right,
    bottom-left, bottom-right); the wall spans x in [-1/2, 1/2] at z = 0."""
    h = aspect / 2.0
    return np.array(
        [[-0.5, -h, 0.0], [0.5, -h, 0.0], [-0.5, h, 0.0], [0.5, h, 0.0]]
    )


# (junction id, border-exit id) pairs defining the 2D line of each
# perpendicular edge, in box_corners order.
_EDGE_LINES = ((1, 5), (2, 6), (3, 7), (4, 8))


def _quad_check(pts: np.ndarray) -> None:
    # Polygon 1 -> 2 -> 4 -> 3 must be convex with nonzero turns.
    ring = pts[[0, 1, 3, 2]]
    crosses = []
    for i in range(4):
        a, b, c = ring[i], ring[(i + 1) % 4], ring[(i + 2) % 4]
        crosses.append(float(np.cross(b - a, c - b)))
    if any(abs(c) < 1e-9 for c in crosses):
        raise LayoutError("center wall corners are (near) collinear")
    if not (all(c > 0 for c in crosses) or all(c < 0 for c in crosses)):
        raise LayoutError("center wall corner quad is not convex")


def make_residual_function(kps: KeypointSet, image_size, options: FitOptions = FitOptions()):
    """Build the residual vector function used by the fit.

    Parameter vector: [aspect, focal, axis-angle (3), translation (3)].
    Residuals: 8 corner reprojection errors, 4*edge_samples point-to-line
    distances, and one focal prior term; all but the prior in pixels.
    """
    if kps.ids != tuple(range(1, 9)):
        raise LayoutError(f"depth recovery needs all 8 keypoint ids, got {list(kps.ids)}")
    pts = {k.id: np.array([k.x, k.y]) for k in kps.keypoints}
    _quad_check(np.array([pts[i] for i in (1, 2, 3, 4)]))

    normals = []
    anchors = []
    for jid, eid in _EDGE_LINES:
        a, b = pts[jid], pts[eid]
        d = b - a
        n = np.linalg.norm(d)
        if n < 1e-9:
            raise LayoutError(f"keypoints {jid} and {eid} coincide; edge line undefined")
        normals.append(np.array([-d[1], d[0]]) / n)
        anchors.append(a)
    normals = np.array(normals)
    anchors = np.array(anchors)

    corner_targets = np.array([pts[i] for i in (1, 2, 3, 4)])
    m = options.edge_samples
    depths = (np.arange(m) + 1.0) / m  # wall-width units along -z from each corner
    f0 = float(image_size[0])
    w_prior = options.focal_prior_weight

    def residuals(theta: np.ndarray) -> np.ndarray:
        aspect, focal = theta[0], theta[1]
        rot = rotation_matrix(theta[2:5])
        trans = theta[5:8]
        corners = box_corners(aspect)
        samples = (corners[:, None, :] + depths[None, :, None] * np.array([0.0, 0.0, -1.0])).reshape(-1, 3)
        uv, _ = project_points(np.vstack([corners, samples]), rot, trans, focal, image_size)
        corner_res = (uv[:4] - corner_targets).ravel()
        q = uv[4:].reshape(4, m, 2)
        line_res = np.einsum("kj,kmj->km", normals, q - anchors[:, None, :]).ravel()
        prior = np.array([w_prior * (focal - f0) / f0])
        return np.concatenate([corner_res, line_res, prior])

    return residuals


def numeric_jacobian(fun, theta: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Forward-difference Jacobian with per-parameter scaled steps."""
    base = fun(theta)
    jac = np.empty((len(base), len(theta)))
    for i in range(len(theta)):
        h = step * max(1.0, abs(theta[i]))
        bumped = theta.copy()
        bumped[i] += h
        jac[:, i] = (fun(bumped) - base) / h
    return jac


def _initial_parameters(kps: KeypointSet, image_size) -> np.ndarray:
    p = {k.id: np.array([k.x, k.y]) for k in kps.keypoints}
    width_px = 0.5 * (np.linalg.norm(p[2] - p[1]) + np.linalg.norm(p[4] - p[3]))
    height_px = 0.5 * (np.linalg.norm(p[3] - p[1]) + np.linalg.norm(p[4] - p[2]))
    if width_px < 1e-6 or height_px < 1e-6:
        raise LayoutError("center wall projection is degenerate")
    f0 = float(image_size[0])
    z0 = f0 / width_px
    center = np.mean([p[i] for i in (1, 2, 3, 4)], axis=0)
    tx = (center[0] - image_size[0] / 2.0) * z0 / f0
    ty = (center[1] - image_size[1] / 2.0) * z0 / f0
    return np.array([height_px / width_px, f0, 0.0, 0.0, 0.0, tx, ty, z0])


def fit_camera_and_box(kps: KeypointSet, image_size, options: FitOptions = FitOptions()) -> CameraFit:
    """Fit aspect ratio, focal length, and camera pose to a full 8-keypoint set.

    Damped least squares: damping shrinks tenfold on accepted steps and grows
    tenfold on rejected ones; stops on relative cost change, step norm, or the
    iteration cap. Non-convergence returns the best parameters found with
    converged=False rather than raising.
    """
    image_size = (int(image_size[0]), int(image_size[1]))
    residual_fn = make_residual_function(kps, image_size, options)
    theta = _initial_parameters(kps, image_size)

    res = residual_fn(theta)
    cost = float(res @ res)
    damping = options.initial_damping
    jac = None
    converged = False
    iterations = 0

    while iterations < options.max_iterations:
        iterations += 1
        if jac is None:
            jac = numeric_jacobian(residual_fn, theta, options.jacobian_step)
            jtj = jac.T @ jac
            grad = jac.T @ res
            diag = np.maximum(np.diag(jtj), 1e-12)
        try:
            delta = np.linalg.solve(jtj + damping * np.diag(diag), -grad)
        except np.linalg.LinAlgError:
            damping *= 10.0
            continue
        trial = theta + delta
        trial_res = residual_fn(trial)
        trial_cost = float(trial_res @ trial_res)
        if trial_cost < cost:
            rel_change = (cost - trial_cost) / max(cost, 1e-300)
            theta, res, cost = trial, trial_res, trial_cost
            jac = None
            damping = max(damping / 10.0, 1e-15)
            if rel_change < options.cost_tolerance or float(np.linalg.norm(delta)) < options.step_tolerance:
                converged = True
                break
        else:
            damping *= 10.0
            if damping > 1e15:
                break

    final_jac = numeric_jacobian(residual_fn, theta, options.jacobian_step)
    degenerate = bool(np.linalg.cond(final_jac.T @ final_jac) > options.condition_limit)

    # All box corners must sit in front of the camera for a usable fit.
    rot = rotation_matrix(theta[2:5])
    _, z = project_points(box_corners(theta[0]), rot, theta[5:8], theta[1], image_size)
    if np.any(z <= 0) or theta[0] <= 0 or theta[1] <= 0:
        converged = False

    geometric = res[:-1]  # drop the focal prior term
    return CameraFit(
        aspect=float(theta[0]),
        focal=float(theta[1]),
        rotation=theta[2:5].copy(),
        translation=theta[5:8].copy(),
        rms_residual=float(np.sqrt(np.mean(geometric**2))),
        converged=converged,
        iterations=iterations,
        degenerate=degenerate,
        image_size=image_size,
    )


# Region label -> (plane normal, plane offset) in box coordinates; the plane
# equation is n . p = d with the aspect ratio substituted for `r`.
def _region_planes(aspect: float):
    h = aspect / 2.0
    return {
        int(SemanticLabel.CENTER_WALL): (np.array([0.0, 0.0, 1.0]), 0.0),
        int(SemanticLabel.LEFT_WALL): (np.array([1.0, 0.0, 0.0]), -0.5),
        int(SemanticLabel.RIGHT_WALL): (np.array([1.0, 0.0, 0.0]), 0.5),
        int(SemanticLabel.FLOOR): (np.array([0.0, 1.0, 0.0]), h),
        int(SemanticLabel.CEILING): (np.array([0.0, 1.0, 0.0]), -h),
    }


def render_depth(fit: CameraFit, layout: Layout, size: tuple[int, int] | None = None) -> DepthMap:
    """Per-pixel relative depth of the fitted box seen through the layout.

    Each pixel's ray is intersected with the plane of its layout region; the
    depth is the camera-frame forward coordinate of the hit. Pixels whose ray
    runs parallel to their plane (or hits it behind the camera) are filled
    from the nearest valid pixel and counted.
    """
    if layout.group.tag != "A" or not (layout.floor_present and layout.ceiling_present):
        raise LayoutError("depth rendering needs a three-wall layout with floor and ceiling")
    if size is None:
        size = layout.image_size
    size = (int(size[0]), int(size[1]))

    focal = fit.focal * size[0] / fit.image_size[0]
    mask = rasterize(layout, size)
    rot = rotation_matrix(fit.rotation)
    origin = -rot.T @ fit.translation
    dirs = pixel_ray_directions(size, focal) @ rot  # world-frame, z-component 1 in camera frame

    depth = np.full(mask.shape, np.nan)
    for label, (normal, offset) in _region_planes(fit.aspect).items():
        sel = mask == label
        if not np.any(sel):
            continue
        denom = dirs[sel] @ normal
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (offset - origin @ normal) / denom
        t[np.abs(denom) < 1e-12] = np.nan
        t[t <= 0] = np.nan
        depth[sel] = t

    invalid = ~np.isfinite(depth)
    filled = int(np.count_nonzero(invalid))
    if filled:
        if filled == depth.size:
            raise RuntimeError("no pixel produced a valid depth; fit is unusable")
        idx = ndimage.distance_transform_edt(invalid, return_distances=False, return_indices=True)
        depth = depth[tuple(idx)]

    return DepthMap(
        values=depth,
        min_value=float(depth.min()),
        max_value=float(depth.max()),
        filled_pixels=filled,
    )

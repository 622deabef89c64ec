"""Pinhole camera primitives shared by depth fitting and scene synthesis.

World and camera frames are right-handed with x right, y down, z forward.
A camera with rotation R and translation t maps world points p to camera
coordinates R @ p + t and projects them with the principal point fixed at
the image center.
"""

from __future__ import annotations

import numpy as np


def rotation_matrix(axis_angle: np.ndarray) -> np.ndarray:
    """Rodrigues rotation from a 3-vector whose norm is the angle."""
    w = np.asarray(axis_angle, dtype=float).reshape(3)
    theta = float(np.linalg.norm(w))
    if theta < 1e-12:
        return np.eye(3)
    k = w / theta
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(theta) * kx + (1.0 - np.cos(theta)) * (kx @ kx)


def axis_angle_from_matrix(matrix: np.ndarray) -> np.ndarray:
    """Inverse of rotation_matrix (principal branch)."""
    m = np.asarray(matrix, dtype=float)
    cos_theta = np.clip((np.trace(m) - 1.0) / 2.0, -1.0, 1.0)
    theta = float(np.arccos(cos_theta))
    if theta < 1e-12:
        return np.zeros(3)
    if np.pi - theta < 1e-6:
        # Near 180 degrees the off-diagonal extraction degenerates.
        a = (m + np.eye(3)) / 2.0
        axis = np.sqrt(np.clip(np.diag(a), 0.0, None))
        k = int(np.argmax(axis))
        v = a[:, k] / max(axis[k], 1e-12)
        return theta * v / np.linalg.norm(v)
    v = np.array([m[2, 1] - m[1, 2], m[0, 2] - m[2, 0], m[1, 0] - m[0, 1]])
    return theta / (2.0 * np.sin(theta)) * v


def euler_rotation(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """R = Rz(roll) @ Rx(pitch) @ Ry(yaw), angles in radians.

    Positive yaw turns the view left (world x decreases ahead), positive
    pitch tilts it toward the floor (y down), roll spins about the axis.
    """
    cy, sy = np.cos(yaw), np.sin(yaw)
    cp, sp = np.cos(pitch), np.sin(pitch)
    cr, sr = np.cos(roll), np.sin(roll)
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]])
    rz = np.array([[cr, -sr, 0.0], [sr, cr, 0.0], [0.0, 0.0, 1.0]])
    return rz @ rx @ ry


def project_points(points_world, rotation, translation, focal, image_size):
    """Project (n, 3) world points; returns ((n, 2) pixel coords, (n,) depths).

    Depth is the camera-frame z coordinate; callers must deal with
    non-positive depths (points at or behind the camera) themselves.
    """
    p = np.asarray(points_world, dtype=float).reshape(-1, 3)
    pc = p @ np.asarray(rotation, dtype=float).T + np.asarray(translation, dtype=float).reshape(3)
    z = pc[:, 2]
    w, h = image_size
    safe_z = np.where(np.abs(z) < 1e-12, 1e-12, z)
    uv = np.empty((len(p), 2))
    uv[:, 0] = focal * pc[:, 0] / safe_z + w / 2.0
    uv[:, 1] = focal * pc[:, 1] / safe_z + h / 2.0
    return uv, z


def pixel_ray_directions(image_size, focal):
    """Camera-frame ray directions through all pixel centers, z fixed at 1.

    Shape (h, w, 3); with unit z the ray parameter of any intersection equals
    the camera-frame depth directly.
    """
    w, h = int(image_size[0]), int(image_size[1])
    us = (np.arange(w) + 0.5 - w / 2.0) / focal
    vs = (np.arange(h) + 0.5 - h / 2.0) / focal
    dirs = np.empty((h, w, 3))
    dirs[..., 0] = us[None, :]
    dirs[..., 1] = vs[:, None]
    dirs[..., 2] = 1.0
    return dirs

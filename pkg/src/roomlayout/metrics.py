"""Benchmark metrics: per-pixel label error and diagonal-normalized keypoint error.

Both metrics are computed per image at the image's original scale and
averaged over the dataset with equal weight per image.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .heatmaps import KeypointSet
from .taxonomy import SemanticLabel, WALL_LABELS

UNMATCHED_PENALTY = 1.0


@dataclass(frozen=True)
class ImageMetrics:
    image_id: str
    pixel_error_pct: float
    keypoint_error_pct: float | None


@dataclass
class MetricsReport:
    pixel_error_pct: float
    keypoint_error_pct: float | None
    images: list[ImageMetrics]
    image_count: int
    skipped: list[tuple[str, str]]


def pixel_error(pred: np.ndarray, gt: np.ndarray, wall_permutation_tolerant: bool = False) -> float:
    """Percentage of non-void ground-truth pixels with a wrong predicted label.

    With `wall_permutation_tolerant` the minimum over all six wall-label
    permutations of the prediction is reported, acknowledging the inherent
    left/center/right ambiguity. Off by default: the benchmark convention
    compares raw labels.
    """
    if pred.shape != gt.shape:
        raise ValueError(f"mask shapes differ: {pred.shape} vs {gt.shape}")
    valid = gt != int(SemanticLabel.VOID)
    total = int(np.count_nonzero(valid))
    if total == 0:
        raise ValueError("ground truth contains only void pixels")
    p = pred[valid]
    g = gt[valid]
    if not wall_permutation_tolerant:
        return 100.0 * int(np.count_nonzero(p != g)) / total

    best = math.inf
    walls = [int(w) for w in WALL_LABELS]
    for perm in itertools.permutations(walls):
        lut = np.arange(6, dtype=pred.dtype)
        for src, dst in zip(walls, perm):
            lut[src] = dst
        best = min(best, 100.0 * int(np.count_nonzero(lut[p] != g)) / total)
    return best


def keypoint_error(pred: KeypointSet, gt: KeypointSet, image_size: tuple[int, int]) -> float:
    """Mean keypoint distance in percent of the image diagonal.

    Point pairs are matched ID-to-ID when both sets belong to the same group,
    otherwise by minimum-cost assignment. Every point left unmatched by a
    cardinality difference costs one full diagonal. Individual distances are
    capped at one diagonal, so the result never exceeds 100.
    """
    if len(pred) == 0 and len(gt) == 0:
        raise ValueError("both keypoint sets are empty")
    w, h = image_size
    for name, kps in (("pred", pred), ("gt", gt)):
        if tuple(kps.frame_size) != (int(w), int(h)):
            raise ValueError(f"{name} keypoints are in frame {kps.frame_size}, expected {(w, h)}")
    diag = math.hypot(w, h)

    if pred.group.tag == gt.group.tag:
        pred_by_id = {k.id: k for k in pred.keypoints}
        gt_by_id = {k.id: k for k in gt.keypoints}
        common = sorted(set(pred_by_id) & set(gt_by_id))
        cost = sum(
            min(math.hypot(pred_by_id[i].x - gt_by_id[i].x, pred_by_id[i].y - gt_by_id[i].y) / diag, 1.0)
            for i in common
        )
        unmatched = (len(pred) - len(common)) + (len(gt) - len(common))
    else:
        pc = pred.coords()
        gc = gt.coords()
        if len(pc) and len(gc):
            dists = np.linalg.norm(pc[:, None, :] - gc[None, :, :], axis=2) / diag
            rows, cols = linear_sum_assignment(np.minimum(dists, 1.0))
            cost = float(np.minimum(dists[rows, cols], 1.0).sum())
        else:
            cost = 0.0
        unmatched = abs(len(pred) - len(gt))

    cost += UNMATCHED_PENALTY * unmatched
    return 100.0 * cost / max(len(pred), len(gt))


@dataclass
class EvalCase:
    """One dataset image: prediction and ground truth at original scale."""

    image_id: str
    pred_mask: np.ndarray
    gt_mask: np.ndarray
    image_size: tuple[int, int]
    pred_keypoints: KeypointSet | None = None
    gt_keypoints: KeypointSet | None = None


def dataset_eval(cases, wall_permutation_tolerant: bool = False) -> MetricsReport:
    """Evaluate a sequence of EvalCase and average per-image metrics.

    Images that fail (bad shapes, empty ground truth, ...) are recorded in
    the report's `skipped` list and excluded from the means.
    """
    cases = list(cases)
    if not cases:
        raise ValueError("no evaluation cases supplied")

    rows: list[ImageMetrics] = []
    skipped: list[tuple[str, str]] = []
    for case in cases:
        try:
            pe = pixel_error(case.pred_mask, case.gt_mask, wall_permutation_tolerant)
            kpe = None
            if case.pred_keypoints is not None and case.gt_keypoints is not None:
                kpe = keypoint_error(case.pred_keypoints, case.gt_keypoints, case.image_size)
            rows.append(ImageMetrics(image_id=case.image_id, pixel_error_pct=pe, keypoint_error_pct=kpe))
        except (ValueError, KeyError) as exc:
            skipped.append((case.image_id, str(exc)))
    if not rows:
        raise RuntimeError(f"every image failed evaluation; first: {skipped[0]}")

    kpe_rows = [r.keypoint_error_pct for r in rows if r.keypoint_error_pct is not None]
    return MetricsReport(
        pixel_error_pct=float(np.mean([r.pixel_error_pct for r in rows])),
        keypoint_error_pct=float(np.mean(kpe_rows)) if kpe_rows else None,
        images=rows,
        image_count=len(rows),
        skipped=skipped,
    )

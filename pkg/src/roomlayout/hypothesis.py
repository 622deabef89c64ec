"""Hypothesis scoring and selection.

Each of the three wall-count hypotheses supplies its own segmentation and
keypoint heatmaps. A hypothesis is scored by how well the layout built from
its keypoints explains its segmentation: the number of regions matched above
an IoU threshold plus a weighted mean IoU. The count term is deliberately
unnormalized so layouts that explain more regions win over simpler ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .heatmaps import DEFAULT_MIN_CONF, DEFAULT_SIGMA, HeatmapStack, decode, rescale_keypoints
from .layout import Layout, LayoutError, build_layout, rasterize
from .taxonomy import (
    HypothesisGroup,
    SemanticLabel,
    required_keypoint_ids,
    type_for_presence,
    wall_labels_of_group,
)

DEFAULT_LAMBDA = 1.0
DEFAULT_IOU_THRESHOLD = 0.8
DEFAULT_PRESENCE_TAU = 0.01

# Selection preference on exact score ties: fewest visible walls wins.
_TIE_ORDER = ("C", "B", "A")


@dataclass(frozen=True)
class EngineConfig:
    """Tunables of the selection pipeline."""

    lambda_weight: float = DEFAULT_LAMBDA
    iou_threshold: float = DEFAULT_IOU_THRESHOLD
    presence_tau: float = DEFAULT_PRESENCE_TAU
    sigma: float = DEFAULT_SIGMA
    min_conf: float = DEFAULT_MIN_CONF
    two_wall_labels: str = "left_center"


@dataclass(frozen=True)
class HypothesisScore:
    matching_regions: int
    mean_iou: float
    lambda_weight: float

    @property
    def total(self) -> float:
        return self.matching_regions + self.lambda_weight * self.mean_iou


@dataclass
class HypothesisInput:
    group: HypothesisGroup
    segmentation: np.ndarray  # (h, w) uint8 label codes
    heatmaps: HeatmapStack


@dataclass
class GroupOutcome:
    """Everything one hypothesis produced, or why it failed."""

    group: HypothesisGroup
    floor_present: bool | None = None
    ceiling_present: bool | None = None
    layout: Layout | None = None
    mask: np.ndarray | None = None
    score: HypothesisScore | None = None
    error: str | None = None

    @property
    def total(self) -> float:
        return self.score.total if self.score is not None else float("-inf")


@dataclass
class SelectionResult:
    chosen: str
    outcomes: dict[str, GroupOutcome]
    image_size: tuple[int, int]
    keypoints: "object"  # chosen hypothesis' KeypointSet at original image scale
    room_type: int | None = None
    config: EngineConfig = field(default_factory=EngineConfig)

    @property
    def chosen_outcome(self) -> GroupOutcome:
        return self.outcomes[self.chosen]


def detect_presence(seg: np.ndarray, label: SemanticLabel, tau: float = DEFAULT_PRESENCE_TAU) -> bool:
    """True iff `label` covers at least a `tau` fraction of the non-void pixels."""
    if not 0 <= tau < 1:
        raise ValueError(f"tau must be in [0, 1), got {tau}")
    nonvoid = int(np.count_nonzero(seg != int(SemanticLabel.VOID)))
    if nonvoid == 0:
        raise ValueError("segmentation contains only void pixels")
    return int(np.count_nonzero(seg == int(label))) / nonvoid >= tau


def region_iou(a: np.ndarray, b: np.ndarray, label: SemanticLabel) -> float:
    """Intersection over union of one label; NaN when absent from both masks."""
    if a.shape != b.shape:
        raise ValueError(f"mask shapes differ: {a.shape} vs {b.shape}")
    ia = a == int(label)
    ib = b == int(label)
    union = int(np.count_nonzero(ia | ib))
    if union == 0:
        return float("nan")
    return int(np.count_nonzero(ia & ib)) / union


def score(
    layout_mask: np.ndarray,
    seg: np.ndarray,
    lambda_weight: float = DEFAULT_LAMBDA,
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> HypothesisScore:
    """Consistency score between a rasterized layout and a segmentation.

    Considered regions are the non-void labels present in either mask, so a
    region that only one side claims drags the mean down instead of being
    skipped. A region matches when its IoU strictly exceeds the threshold.
    """
    if layout_mask.shape != seg.shape:
        raise ValueError(f"mask shapes differ: {layout_mask.shape} vs {seg.shape}")
    if not 0 < iou_threshold < 1:
        raise ValueError(f"iou threshold must be in (0, 1), got {iou_threshold}")

    a = layout_mask.ravel()
    b = seg.ravel()
    counts_a = np.bincount(a, minlength=6)[:6]
    counts_b = np.bincount(b, minlength=6)[:6]
    inter = np.bincount(a[a == b], minlength=6)[:6]

    considered = [lab for lab in range(1, 6) if counts_a[lab] or counts_b[lab]]
    if not considered:
        raise ValueError("no non-void regions in either mask")

    ious = [inter[lab] / (counts_a[lab] + counts_b[lab] - inter[lab]) for lab in considered]
    matching = int(sum(iou > iou_threshold for iou in ious))
    return HypothesisScore(
        matching_regions=matching,
        mean_iou=float(np.mean(ious)),
        lambda_weight=float(lambda_weight),
    )


def evaluate_hypothesis(inp: HypothesisInput, config: EngineConfig = EngineConfig()) -> GroupOutcome:
    """Run one hypothesis end to end against its own segmentation."""
    out = GroupOutcome(group=inp.group)
    seg = inp.segmentation
    try:
        out.floor_present = detect_presence(seg, SemanticLabel.FLOOR, config.presence_tau)
        out.ceiling_present = detect_presence(seg, SemanticLabel.CEILING, config.presence_tau)
        decoded = decode(inp.heatmaps, min_conf=config.min_conf)
        needed = required_keypoint_ids(inp.group, out.floor_present, out.ceiling_present)
        missing = sorted(set(needed) - set(decoded.ids))
        if missing:
            raise LayoutError(f"heatmaps are missing required keypoint ids {missing}")
        seg_size = (seg.shape[1], seg.shape[0])
        kps = rescale_keypoints(decoded.subset(needed), seg_size)
        out.layout = build_layout(inp.group, kps, out.floor_present, out.ceiling_present, seg_size)
        out.mask = rasterize(out.layout, wall_labels=wall_labels_of_group(inp.group, config.two_wall_labels))
        out.score = score(out.mask, seg, config.lambda_weight, config.iou_threshold)
    except (LayoutError, ValueError) as exc:
        out.error = str(exc)
    return out


def select(inputs, image_size: tuple[int, int], config: EngineConfig = EngineConfig()) -> SelectionResult:
    """Evaluate all three hypotheses and pick the best-matching one.

    `inputs` maps group tags to HypothesisInput (or is an iterable of them).
    A hypothesis whose layout cannot be built scores -inf; ties go to the
    hypothesis with fewer walls.
    """
    if not isinstance(inputs, dict):
        inputs = {inp.group.tag: inp for inp in inputs}
    if sorted(inputs) != ["A", "B", "C"]:
        raise ValueError(f"need exactly one input per group A/B/C, got {sorted(inputs)}")

    outcomes = {tag: evaluate_hypothesis(inputs[tag], config) for tag in ("A", "B", "C")}
    chosen = None
    best = float("-inf")
    for tag in _TIE_ORDER:
        if outcomes[tag].total > best:
            best = outcomes[tag].total
            chosen = tag
    if chosen is None or best == float("-inf"):
        details = "; ".join(f"{t}: {outcomes[t].error}" for t in ("A", "B", "C"))
        raise RuntimeError(f"all three hypotheses failed layout construction ({details})")

    won = outcomes[chosen]
    keypoints = rescale_keypoints(won.layout.keypoints, (int(image_size[0]), int(image_size[1])))
    return SelectionResult(
        chosen=chosen,
        outcomes=outcomes,
        image_size=(int(image_size[0]), int(image_size[1])),
        keypoints=keypoints,
        room_type=type_for_presence(won.group, won.floor_present, won.ceiling_present),
        config=config,
    )

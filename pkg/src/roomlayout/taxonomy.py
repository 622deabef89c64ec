"""Room-type taxonomy: semantic labels, hypothesis groups, and keypoint ID tables.

The 11 LSUN room types are partitioned into three groups by the number of
visible walls. Each group has a prototype type (the one showing both floor
and ceiling) whose keypoint IDs all other types of the group reuse, so the
ID sequence of a non-prototype type may be discontinuous.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum


class SemanticLabel(IntEnum):
    """Per-pixel region classes. Numeric codes are stable on disk."""

    VOID = 0
    FLOOR = 1
    CEILING = 2
    LEFT_WALL = 3
    CENTER_WALL = 4
    RIGHT_WALL = 5


WALL_LABELS = (SemanticLabel.LEFT_WALL, SemanticLabel.CENTER_WALL, SemanticLabel.RIGHT_WALL)

ROOM_TYPES = tuple(range(11))


@dataclass(frozen=True)
class HypothesisGroup:
    """One wall-count family of room types sharing a prototype keypoint table."""

    tag: str
    wall_count: int
    prototype: int
    keypoint_count: int

    def __str__(self) -> str:
        return self.tag


GROUP_A = HypothesisGroup(tag="A", wall_count=3, prototype=0, keypoint_count=8)
GROUP_B = HypothesisGroup(tag="B", wall_count=2, prototype=5, keypoint_count=6)
GROUP_C = HypothesisGroup(tag="C", wall_count=1, prototype=6, keypoint_count=4)

GROUPS = {"A": GROUP_A, "B": GROUP_B, "C": GROUP_C}

_GROUP_OF_TYPE = {
    0: GROUP_A, 1: GROUP_A, 2: GROUP_A, 7: GROUP_A,
    3: GROUP_B, 4: GROUP_B, 5: GROUP_B, 10: GROUP_B,
    6: GROUP_C, 8: GROUP_C, 9: GROUP_C,
}

# Canonical keypoint IDs per room type, expressed in the prototype's ID space.
#
# Group A prototype (type 0): 1/2 ceiling junctions of the left/center and
# center/right wall pairs, 3/4 the matching floor junctions, 5/6 ceiling
# border exits (left/right), 7/8 floor border exits. When the ceiling is
# absent, slots 1/2 hold the top-border endpoints of the two vertical
# wall/wall edges instead (slots 3/4 analogously when the floor is absent).
#
# Group B prototype (type 5): 1 ceiling wall/wall junction, 2 floor junction,
# 3/4 ceiling border exits, 5/6 floor border exits; same slot reuse.
#
# Group C prototype (type 6): 1/2 ceiling line endpoints, 3/4 floor line
# endpoints.
_TYPE_KEYPOINT_IDS = {
    0: (1, 2, 3, 4, 5, 6, 7, 8),
    1: (1, 2, 3, 4, 7, 8),
    2: (1, 2, 3, 4, 5, 6),
    7: (1, 2, 3, 4),
    5: (1, 2, 3, 4, 5, 6),
    3: (1, 2, 5, 6),
    4: (1, 2, 3, 4),
    10: (1, 2),
    6: (1, 2, 3, 4),
    8: (1, 2),
    9: (3, 4),
}

# (floor_present, ceiling_present) per room type.
_TYPE_PRESENCE = {
    0: (True, True), 1: (True, False), 2: (False, True), 7: (False, False),
    5: (True, True), 3: (True, False), 4: (False, True), 10: (False, False),
    6: (True, True), 9: (True, False), 8: (False, True),
}


class KeypointKind(IntEnum):
    """What a prototype keypoint slot marks in the image."""

    JUNCTION = 0        # wall/wall/ceiling or wall/wall/floor corner
    CEILING_EXIT = 1    # ceiling boundary edge leaving the image
    FLOOR_EXIT = 2      # floor boundary edge leaving the image


@dataclass(frozen=True)
class KeypointRole:
    """Semantic role of one prototype keypoint ID within its group."""

    id: int
    kind: KeypointKind
    level: str  # "ceiling" or "floor" edge the slot belongs to
    side: str   # "left" or "right" (wall pair for group A junctions)


_J, _CE, _FE = KeypointKind.JUNCTION, KeypointKind.CEILING_EXIT, KeypointKind.FLOOR_EXIT

KEYPOINT_ROLES = {
    "A": (
        KeypointRole(1, _J, "ceiling", "left"),
        KeypointRole(2, _J, "ceiling", "right"),
        KeypointRole(3, _J, "floor", "left"),
        KeypointRole(4, _J, "floor", "right"),
        KeypointRole(5, _CE, "ceiling", "left"),
        KeypointRole(6, _CE, "ceiling", "right"),
        KeypointRole(7, _FE, "floor", "left"),
        KeypointRole(8, _FE, "floor", "right"),
    ),
    "B": (
        KeypointRole(1, _J, "ceiling", "left"),
        KeypointRole(2, _J, "floor", "left"),
        KeypointRole(3, _CE, "ceiling", "left"),
        KeypointRole(4, _CE, "ceiling", "right"),
        KeypointRole(5, _FE, "floor", "left"),
        KeypointRole(6, _FE, "floor", "right"),
    ),
    "C": (
        KeypointRole(1, _CE, "ceiling", "left"),
        KeypointRole(2, _CE, "ceiling", "right"),
        KeypointRole(3, _FE, "floor", "left"),
        KeypointRole(4, _FE, "floor", "right"),
    ),
}


def _check_type(room_type: int) -> int:
    if room_type not in _GROUP_OF_TYPE:
        raise ValueError(f"room type must be in 0..10, got {room_type!r}")
    return int(room_type)


def group_of_type(room_type: int) -> HypothesisGroup:
    """Return the hypothesis group a room type belongs to."""
    return _GROUP_OF_TYPE[_check_type(room_type)]


def keypoint_ids_of_type(room_type: int) -> tuple[int, ...]:
    """Canonical (possibly discontinuous) keypoint IDs of a room type."""
    return _TYPE_KEYPOINT_IDS[_check_type(room_type)]


def presence_of_type(room_type: int) -> tuple[bool, bool]:
    """(floor_present, ceiling_present) flags of a room type."""
    return _TYPE_PRESENCE[_check_type(room_type)]


def type_for_presence(group: HypothesisGroup, floor_present: bool, ceiling_present: bool) -> int | None:
    """Room type of `group` with the given optional regions.

    Returns None for the one combination outside the taxonomy (a single
    wall with neither floor nor ceiling), which is still a buildable layout.
    """
    for t in ROOM_TYPES:
        if _GROUP_OF_TYPE[t] is group and _TYPE_PRESENCE[t] == (bool(floor_present), bool(ceiling_present)):
            return t
    return None


def required_keypoint_ids(group: HypothesisGroup, floor_present: bool, ceiling_present: bool) -> tuple[int, ...]:
    """Keypoint IDs a layout of `group` with the given presence flags must carry."""
    t = type_for_presence(group, floor_present, ceiling_present)
    if t is None:
        return ()
    return _TYPE_KEYPOINT_IDS[t]


def wall_labels_of_group(group: HypothesisGroup, two_wall_labels: str = "left_center") -> tuple[SemanticLabel, ...]:
    """Semantic labels of the group's wall regions, ordered left to right.

    The two-wall case is inherently ambiguous; `two_wall_labels` selects
    either the ("left_center") or the ("center_right") assignment.
    """
    if group.wall_count == 3:
        return (SemanticLabel.LEFT_WALL, SemanticLabel.CENTER_WALL, SemanticLabel.RIGHT_WALL)
    if group.wall_count == 2:
        if two_wall_labels == "left_center":
            return (SemanticLabel.LEFT_WALL, SemanticLabel.CENTER_WALL)
        if two_wall_labels == "center_right":
            return (SemanticLabel.CENTER_WALL, SemanticLabel.RIGHT_WALL)
        raise ValueError(f"unknown two-wall label mapping {two_wall_labels!r}")
    return (SemanticLabel.CENTER_WALL,)


def legal_labels_of_group(group: HypothesisGroup, two_wall_labels: str = "left_center") -> tuple[SemanticLabel, ...]:
    """All labels a segmentation for this group may contain (void included)."""
    return (SemanticLabel.VOID, SemanticLabel.FLOOR, SemanticLabel.CEILING) + wall_labels_of_group(
        group, two_wall_labels
    )

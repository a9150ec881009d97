"""Discrepancy-preserving point shifts for 2D sets.

A point may slide up/right by up to ``1/n`` minus its vertical/horizontal
gap to the nearest point it dominates (down/left symmetrically, with the
points dominating it).  Shifts bounded this way never increase the star
discrepancy of a set whose discrepancy is at least ``1/n``, which holds
for every 2D set with n >= 4.  ``canonicalize`` sweeps such shifts to a
fixpoint, and ``boundary_lift`` moves the lowest/leftmost points away
from the boundary by up to the discrepancy value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pointset import PointSet
from .discrepancy import star_discrepancy

UP, DOWN, LEFT, RIGHT = "up", "down", "left", "right"

_AXIS = {UP: 1, DOWN: 1, LEFT: 0, RIGHT: 0}
_SIGN = {UP: 1.0, DOWN: -1.0, LEFT: -1.0, RIGHT: 1.0}


@dataclass(frozen=True)
class ShiftMove:
    """Axis-aligned displacement of a single point."""

    point_index: int
    direction: str
    delta: float

    def __post_init__(self):
        if self.direction not in _AXIS:
            raise ValueError(f"unknown direction: {self.direction}")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


def admissible_delta(pset: PointSet, i: int, direction: str) -> float:
    """Largest admissible shift of point ``i`` in the given direction.

    Up/right shifts are limited by ``1/n`` minus the smallest same-axis gap
    to a point dominated by ``i`` (coordinate-wise smaller or equal);
    down/left shifts use the points dominating ``i``.  When no such point
    exists the admissible shift is 0 -- boundary points are handled by
    :func:`boundary_lift` instead.  The result is clamped so the moved
    coordinate stays inside [0, 1].
    """
    if pset.dim != 2:
        raise ValueError("shifts are defined for 2D sets only")
    n = pset.n
    if not 0 <= i < n:
        raise IndexError(f"point index {i} out of range")
    pts = pset.points
    axis = _AXIS[direction]
    outward = _SIGN[direction] > 0

    others = np.ones(n, dtype=bool)
    others[i] = False
    if outward:
        related = others & np.all(pts <= pts[i], axis=1)
        gaps = pts[i, axis] - pts[related, axis]
        room = 1.0 - pts[i, axis]
    else:
        related = others & np.all(pts >= pts[i], axis=1)
        gaps = pts[related, axis] - pts[i, axis]
        room = pts[i, axis]
    if not related.any():
        return 0.0
    delta = max(0.0, 1.0 / n - float(gaps.min()))
    return min(delta, room)


def apply_shift(pset: PointSet, move: ShiftMove) -> PointSet:
    """Move one point by ``move.delta`` along ``move.direction``.

    The caller is responsible for admissibility; only the unit-cube bound
    is enforced here.
    """
    axis = _AXIS[move.direction]
    new_point = pset.points[move.point_index].copy()
    new_point[axis] += _SIGN[move.direction] * move.delta
    if not 0.0 <= new_point[axis] <= 1.0:
        raise ValueError("shift leaves the unit cube")
    return pset.with_point(move.point_index, new_point)


def boundary_lift(pset: PointSet) -> PointSet:
    """Lift the lowest point and the leftmost point away from the boundary.

    Each is moved outward until its coordinate reaches the star discrepancy
    of the input set, but never past the nearest same-axis coordinate of
    another point and never downward.  Sets already satisfying the bound
    are returned unchanged (as a new object).
    """
    if pset.dim != 2:
        raise ValueError("boundary_lift is defined for 2D sets only")
    f = star_discrepancy(pset).value
    pts = pset.points.copy()
    for axis in (0, 1):
        if pset.n < 2:
            continue
        i = int(np.argmin(pts[:, axis]))
        others = np.delete(pts[:, axis], i)
        target = min(f, float(others.min()))
        if target > pts[i, axis]:
            pts[i, axis] = target
    return PointSet(pts)


def canonicalize(pset: PointSet, tol: float = 1e-9) -> PointSet:
    """Sweep maximal admissible up- and right-shifts to a fixpoint.

    Points are visited in order of increasing x (up-shift first, then
    right-shift) and sweeps repeat until every admissible shift is at most
    ``tol``.  Every applied shift moves total coordinate mass outward by
    more than ``tol``, so the sweep terminates.
    """
    if pset.dim != 2:
        raise ValueError("canonicalize is defined for 2D sets only")
    current = pset
    while True:
        moved = False
        order = np.lexsort((np.arange(current.n), current.points[:, 0]))
        for i in order:
            for direction in (UP, RIGHT):
                delta = admissible_delta(current, int(i), direction)
                if delta > tol:
                    current = apply_shift(
                        current, ShiftMove(int(i), direction, delta)
                    )
                    moved = True
        if not moved:
            return current

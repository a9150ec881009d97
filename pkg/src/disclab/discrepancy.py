"""Exact local and global discrepancy engines.

Four box families are supported on 2D sets (star, extreme, periodic and
4-corner); star is also available in 3D.  Every global engine returns a
:class:`DiscrepancyReport` whose witness box can be re-evaluated
independently with :func:`recompute_witness`.

The computation is discrete: only boxes whose faces carry point
coordinates (or the outer boundary) can attain the maximum, so each engine
enumerates candidate corners on the coordinate grid of the set.  Closed
boxes count points with ``<=`` on every axis, open boxes with ``<``; the
two one-sided maxima are combined into the final value.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .pointset import PointSet, grid_of, reflect

CLOSED = "closed"
OPEN = "open"


@dataclass(frozen=True)
class DiscrepancyReport:
    """Value of a discrepancy measure together with its witness box.

    ``witness_lower``/``witness_upper`` are the box corners.  For the
    periodic measure a lower coordinate exceeding the upper one signals a
    box wrapping around that axis; equal coordinates signal a degenerate
    line for closed boxes and a full wrap that excludes one grid line for
    open boxes.  ``corner_id`` identifies the anchoring corner for the
    4-corner measure (1 = origin) and is 1 everywhere else.
    """

    value: float
    witness_lower: tuple
    witness_upper: tuple
    box_kind: str
    measure: str
    corner_id: int = 1


def local_closed(pset: PointSet, q) -> float:
    """Signed local discrepancy of the closed anchored box at ``q``.

    Returns ``|P ∩ [0,q]| / n - prod(q)`` with inclusive comparisons.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (pset.dim,):
        raise ValueError(f"q must have {pset.dim} coordinates")
    count = int(np.all(pset.points <= q, axis=1).sum())
    return count / pset.n - float(np.prod(q))


def local_open(pset: PointSet, q) -> float:
    """Signed local discrepancy of the open anchored box at ``q``.

    Returns ``prod(q) - |P ∩ [0,q)| / n`` with strict comparisons.
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (pset.dim,):
        raise ValueError(f"q must have {pset.dim} coordinates")
    count = int(np.all(pset.points < q, axis=1).sum())
    return float(np.prod(q)) - count / pset.n


def star_lower_bound(n: int, dim: int) -> float:
    """Universal lower bound on the star discrepancy of any n-point set.

    Equals ``1/n`` for 2D sets with at least 4 points and for sets in
    dimension 3 or higher with at least 3 points; 0 otherwise.
    """
    if (dim == 2 and n >= 4) or (dim >= 3 and n >= 3):
        return 1.0 / n
    return 0.0


def _axis_candidates(pset):
    """Per-axis closure grids plus count-lookup index arrays.

    For every axis returns (values, le, lt) where ``le[k]`` is the number
    of point coordinates <= values[k] and ``lt[k]`` the number < values[k],
    as indices into the padded prefix-count array.
    """
    grid = grid_of(pset)
    out = []
    for j in range(pset.dim):
        uniq = grid.gamma[j]
        vals = grid.gamma_bar[j]
        le = np.searchsorted(uniq, vals, side="right")
        lt = np.searchsorted(uniq, vals, side="left")
        out.append((vals, le, lt))
    return grid, out


def _prefix_counts(pset, grid):
    """Padded cumulative histogram: entry [i1..id] counts points whose
    j-th coordinate is among the i_j smallest grid values, for all j."""
    shape = tuple(len(g) + 1 for g in grid.gamma)
    hist = np.zeros(shape, dtype=np.int64)
    idx = tuple(
        np.searchsorted(grid.gamma[j], pset.points[:, j]) + 1
        for j in range(pset.dim)
    )
    np.add.at(hist, idx, 1)
    for axis in range(pset.dim):
        np.cumsum(hist, axis=axis, out=hist)
    return hist


def _lex_argmax(values, target):
    """First index tuple (row-major order) where ``values == target``."""
    flat = np.flatnonzero(values.reshape(-1) == target)
    if flat.size == 0:
        return None
    return np.unravel_index(flat[0], values.shape)


def star_discrepancy(pset: PointSet) -> DiscrepancyReport:
    """Exact star discrepancy with witness box, for 2D and 3D sets.

    Candidate corners run over the closure grid of the set; the closed and
    open one-sided terms are evaluated on all of them via prefix-count
    lookups, which keeps the 2D case at O(n^2) after sorting.
    """
    if pset.dim not in (2, 3):
        raise ValueError("star_discrepancy supports dim 2 and 3")
    grid, axes = _axis_candidates(pset)
    prefix = _prefix_counts(pset, grid)
    n = pset.n

    vals = [a[0] for a in axes]
    le = [a[1] for a in axes]
    lt = [a[2] for a in axes]

    volume = vals[0]
    for v in vals[1:]:
        volume = np.multiply.outer(volume, v)
    closed_cnt = prefix[np.ix_(*le)]
    open_cnt = prefix[np.ix_(*lt)]

    closed_vals = closed_cnt / n - volume
    open_vals = volume - open_cnt / n

    best = max(float(closed_vals.max()), float(open_vals.max()))
    # Deterministic witness: smallest grid index tuple, closed before open.
    idx_c = _lex_argmax(closed_vals, best)
    idx_o = _lex_argmax(open_vals, best)
    if idx_o is None or (idx_c is not None and idx_c <= idx_o):
        idx, kind = idx_c, CLOSED
    else:
        idx, kind = idx_o, OPEN
    q = tuple(float(vals[j][idx[j]]) for j in range(pset.dim))
    return DiscrepancyReport(
        value=best,
        witness_lower=(0.0,) * pset.dim,
        witness_upper=q,
        box_kind=kind,
        measure="star",
    )


def max_closed_local(pset: PointSet) -> float:
    """Maximum closed-box local discrepancy over the grid candidates."""
    grid, axes = _axis_candidates(pset)
    prefix = _prefix_counts(pset, grid)
    vals = [a[0] for a in axes]
    volume = vals[0]
    for v in vals[1:]:
        volume = np.multiply.outer(volume, v)
    closed_cnt = prefix[np.ix_(*[a[1] for a in axes])]
    return float((closed_cnt / pset.n - volume).max())


def max_open_local(pset: PointSet) -> float:
    """Maximum open-box local discrepancy over the grid candidates."""
    grid, axes = _axis_candidates(pset)
    prefix = _prefix_counts(pset, grid)
    vals = [a[0] for a in axes]
    volume = vals[0]
    for v in vals[1:]:
        volume = np.multiply.outer(volume, v)
    open_cnt = prefix[np.ix_(*[a[2] for a in axes])]
    return float((volume - open_cnt / pset.n).max())


def critical_boxes(pset: PointSet):
    """Grid boxes that can attain the star discrepancy maximum.

    A closed box is critical when every face carries a point inside the
    box; an open box when every face either carries a point of its closure
    or lies on the outer boundary.  Returns (grid index tuple, kind) pairs
    with indices into the closure grid of each axis.
    """
    if pset.dim not in (2, 3):
        raise ValueError("critical_boxes supports dim 2 and 3")
    grid, axes = _axis_candidates(pset)
    vals = [a[0] for a in axes]
    pts = pset.points
    out = []
    for idx in np.ndindex(*[len(v) for v in vals]):
        q = np.array([vals[j][idx[j]] for j in range(pset.dim)])
        inside = np.all(pts <= q, axis=1)
        on_face = [np.any(inside & (pts[:, j] == q[j])) for j in range(pset.dim)]
        if all(on_face):
            out.append((idx, CLOSED))
        if all(on_face[j] or q[j] == 1.0 for j in range(pset.dim)):
            out.append((idx, OPEN))
    return out


def raster_oracle(pset: PointSet, resolution: int, measure: str = "star",
                  augment: bool = True) -> float:
    """Independent naive star evaluation on a raster of anchor corners.

    Evaluates both box variants by direct point counting on the lattice
    ``k/resolution`` united (when ``augment`` is set) with the closure grid
    of the set.  With augmentation the result equals the exact star
    discrepancy; without it, it is a lower bound.
    """
    if measure != "star":
        raise ValueError(f"unsupported measure for the raster oracle: {measure}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    raster = np.arange(resolution + 1) / resolution
    cands = []
    grid = grid_of(pset)
    for j in range(pset.dim):
        c = raster
        if augment:
            c = np.union1d(c, grid.gamma_bar[j])
        cands.append(c)
    # Boolean candidate-by-point masks; joint counts via integer matmul.
    le = [c[:, None] >= pset.points[:, j][None, :] for j, c in enumerate(cands)]
    lt = [c[:, None] > pset.points[:, j][None, :] for j, c in enumerate(cands)]
    best = -np.inf
    if pset.dim == 2:
        closed_cnt = le[0].astype(np.int64) @ le[1].astype(np.int64).T
        open_cnt = lt[0].astype(np.int64) @ lt[1].astype(np.int64).T
        vol = np.multiply.outer(cands[0], cands[1])
        best = max(
            float((closed_cnt / pset.n - vol).max()),
            float((vol - open_cnt / pset.n).max()),
        )
    else:
        for a, qa in enumerate(cands[0]):
            m_le = le[0][a]
            m_lt = lt[0][a]
            closed_cnt = (le[1] & m_le).astype(np.int64) @ le[2].astype(np.int64).T
            open_cnt = (lt[1] & m_lt).astype(np.int64) @ lt[2].astype(np.int64).T
            vol = qa * np.multiply.outer(cands[1], cands[2])
            best = max(
                best,
                float((closed_cnt / pset.n - vol).max()),
                float((vol - open_cnt / pset.n).max()),
            )
    return best


def _interval_pairs(values):
    """Index pairs (lo, hi) with lo <= hi over a candidate value array."""
    m = len(values)
    lo, hi = np.triu_indices(m)
    return lo, hi


def _free_axis_candidates(pset):
    """Candidate interval endpoints per axis: coordinates plus 0 and 1."""
    grid = grid_of(pset)
    out = []
    for j in range(pset.dim):
        vals = np.unique(np.concatenate(([0.0, 1.0], grid.gamma[j])))
        uniq = grid.gamma[j]
        le = np.searchsorted(uniq, vals, side="right")
        lt = np.searchsorted(uniq, vals, side="left")
        out.append((vals, le, lt))
    return out


def extreme_discrepancy(pset: PointSet) -> DiscrepancyReport:
    """Exact extreme discrepancy (free lower corner) of a 2D set.

    Both corners range over the point coordinates extended by the cube
    boundary; closed and open counting variants are evaluated for every
    corner pair, a superset of the boxes that can attain the supremum.
    """
    if pset.dim != 2:
        raise ValueError("extreme_discrepancy supports dim 2 only")
    axes = _free_axis_candidates(pset)
    grid = grid_of(pset)
    prefix = _prefix_counts(pset, grid)
    n = pset.n
    full = tuple(len(g) for g in grid.gamma)

    (xv, xle, xlt), (yv, yle, ylt) = axes
    xlo, xhi = _interval_pairs(xv)
    ylo, yhi = _interval_pairs(yv)

    # Closed box [lo, hi]: count via inclusive/exclusive prefix differences.
    c_hi_x, c_lo_x = xle[xhi], xlt[xlo]
    c_hi_y, c_lo_y = yle[yhi], ylt[ylo]
    closed_cnt = (
        prefix[np.ix_(c_hi_x, c_hi_y)]
        - prefix[np.ix_(c_lo_x, c_hi_y)]
        - prefix[np.ix_(c_hi_x, c_lo_y)]
        + prefix[np.ix_(c_lo_x, c_lo_y)]
    )
    o_hi_x, o_lo_x = xlt[xhi], xle[xlo]
    o_hi_y, o_lo_y = ylt[yhi], yle[ylo]
    open_cnt = (
        prefix[np.ix_(o_hi_x, o_hi_y)]
        - prefix[np.ix_(o_lo_x, o_hi_y)]
        - prefix[np.ix_(o_hi_x, o_lo_y)]
        + prefix[np.ix_(o_lo_x, o_lo_y)]
    )
    vol = np.multiply.outer(xv[xhi] - xv[xlo], yv[yhi] - yv[ylo])

    closed_vals = closed_cnt / n - vol
    open_vals = vol - open_cnt / n
    best = max(float(closed_vals.max()), float(open_vals.max()))
    idx_c = _lex_argmax(closed_vals, best)
    idx_o = _lex_argmax(open_vals, best)
    if idx_o is None or (idx_c is not None and idx_c <= idx_o):
        idx, kind = idx_c, CLOSED
    else:
        idx, kind = idx_o, OPEN
    px, py = idx
    return DiscrepancyReport(
        value=best,
        witness_lower=(float(xv[xlo[px]]), float(yv[ylo[py]])),
        witness_upper=(float(xv[xhi[px]]), float(yv[yhi[py]])),
        box_kind=kind,
        measure="extreme",
    )


def periodic_discrepancy(pset: PointSet) -> DiscrepancyReport:
    """Exact periodic (toroidal) discrepancy of a 2D set.

    For every pair of interval endpoints per axis, all four wrap types are
    evaluated (plain, x-wrap, y-wrap, double wrap) with both counting
    variants.  A wrapped interval [q,1) u [0,r) has length (1-q)+r and the
    double-wrap volume is the product of the two wrapped lengths.
    """
    if pset.dim != 2:
        raise ValueError("periodic_discrepancy supports dim 2 only")
    axes = _free_axis_candidates(pset)
    grid = grid_of(pset)
    prefix = _prefix_counts(pset, grid)
    n = pset.n
    mx, my = (len(g) for g in grid.gamma)

    (xv, xle, xlt), (yv, yle, ylt) = axes
    xlo, xhi = _interval_pairs(xv)
    ylo, yhi = _interval_pairs(yv)
    x_nondeg = xlo < xhi
    y_nondeg = ylo < yhi

    def count2(ix, iy):
        return prefix[np.ix_(ix, iy)]

    # Per-axis count building blocks, as prefix indices for each pair.
    x_in_c = (xle[xhi], xlt[xlo])        # x in [lo, hi]
    x_in_o = (xlt[xhi], xle[xlo])        # x in (lo, hi)
    y_in_c = (yle[yhi], ylt[ylo])
    y_in_o = (ylt[yhi], yle[ylo])

    full_x = np.full(len(xlo), mx)
    full_y = np.full(len(ylo), my)

    def band(ax_hi, ax_lo, ay_hi, ay_lo):
        return (
            count2(ax_hi, ay_hi) - count2(ax_lo, ay_hi)
            - count2(ax_hi, ay_lo) + count2(ax_lo, ay_lo)
        )

    reports = []

    def consider(vals, vol, kind, wrap_x, wrap_y, valid=None):
        arr = vol - vals / n if kind == OPEN else vals / n - vol
        if valid is not None:
            arr = np.where(valid, arr, -np.inf)
        reports.append((arr, kind, wrap_x, wrap_y))

    vol_plain = np.multiply.outer(xv[xhi] - xv[xlo], yv[yhi] - yv[ylo])
    vol_xwrap = np.multiply.outer(1.0 - xv[xhi] + xv[xlo], yv[yhi] - yv[ylo])
    vol_ywrap = np.multiply.outer(xv[xhi] - xv[xlo], 1.0 - yv[yhi] + yv[ylo])
    vol_dwrap = np.multiply.outer(
        1.0 - xv[xhi] + xv[xlo], 1.0 - yv[yhi] + yv[ylo]
    )

    # Plain boxes, identical to the extreme enumeration.
    consider(band(x_in_c[0], x_in_c[1], y_in_c[0], y_in_c[1]),
             vol_plain, CLOSED, False, False)
    consider(band(x_in_o[0], x_in_o[1], y_in_o[0], y_in_o[1]),
             vol_plain, OPEN, False, False)

    # x-wrap: x outside (lo, hi); closed keeps the endpoints, open drops
    # them.  Degenerate closed wraps would double-count the shared line.
    xw_c = (
        band(xle[xlo], np.zeros_like(xlo), y_in_c[0], y_in_c[1])
        + band(full_x, xlt[xhi], y_in_c[0], y_in_c[1])
    )
    consider(xw_c, vol_xwrap, CLOSED, True, False,
             valid=x_nondeg[:, None] & np.ones(len(ylo), dtype=bool)[None, :])
    xw_o = (
        band(xlt[xlo], np.zeros_like(xlo), y_in_o[0], y_in_o[1])
        + band(full_x, xle[xhi], y_in_o[0], y_in_o[1])
    )
    consider(xw_o, vol_xwrap, OPEN, True, False)

    yw_c = (
        band(x_in_c[0], x_in_c[1], yle[ylo], np.zeros_like(ylo))
        + band(x_in_c[0], x_in_c[1], full_y, ylt[yhi])
    )
    consider(yw_c, vol_ywrap, CLOSED, False, True,
             valid=np.ones(len(xlo), dtype=bool)[:, None] & y_nondeg[None, :])
    yw_o = (
        band(x_in_o[0], x_in_o[1], ylt[ylo], np.zeros_like(ylo))
        + band(x_in_o[0], x_in_o[1], full_y, yle[yhi])
    )
    consider(yw_o, vol_ywrap, OPEN, False, True)

    # Double wrap: both coordinates outside their interval.
    def outside_c(ax_le_lo, ax_lt_hi, fx, ay_le_lo, ay_lt_hi, fy):
        zx = np.zeros_like(fx)
        zy = np.zeros_like(fy)
        return (
            band(ax_le_lo, zx, ay_le_lo, zy)
            + band(ax_le_lo, zx, fy, ay_lt_hi)
            + band(fx, ax_lt_hi, ay_le_lo, zy)
            + band(fx, ax_lt_hi, fy, ay_lt_hi)
        )

    dw_c = outside_c(xle[xlo], xlt[xhi], full_x, yle[ylo], ylt[yhi], full_y)
    consider(dw_c, vol_dwrap, CLOSED, True, True,
             valid=x_nondeg[:, None] & y_nondeg[None, :])
    dw_o = outside_c(xlt[xlo], xle[xhi], full_x, ylt[ylo], yle[yhi], full_y)
    consider(dw_o, vol_dwrap, OPEN, True, True)

    best = max(float(arr.max()) for arr, _, _, _ in reports)
    chosen = None
    for arr, kind, wrap_x, wrap_y in reports:
        idx = _lex_argmax(arr, best)
        if idx is None:
            continue
        key = (idx, 0 if kind == CLOSED else 1, wrap_x, wrap_y)
        if chosen is None or key < chosen[0]:
            chosen = (key, idx, kind, wrap_x, wrap_y)
    _, idx, kind, wrap_x, wrap_y = chosen
    px, py = idx
    lo1, hi1 = float(xv[xlo[px]]), float(xv[xhi[px]])
    lo2, hi2 = float(yv[ylo[py]]), float(yv[yhi[py]])
    if wrap_x:
        lo1, hi1 = hi1, lo1
    if wrap_y:
        lo2, hi2 = hi2, lo2
    return DiscrepancyReport(
        value=best,
        witness_lower=(lo1, lo2),
        witness_upper=(hi1, hi2),
        box_kind=kind,
        measure="periodic",
    )


def corner4_discrepancy(pset: PointSet) -> DiscrepancyReport:
    """4-corner discrepancy: worst star discrepancy over all four corner
    anchorings, computed via coordinate reflections of the set.

    ``corner_id`` names the anchoring corner of the witness (1 = origin,
    then counter-clockwise: 2 = (1,0), 3 = (1,1), 4 = (0,1)); the witness
    box is expressed in the reflected frame of that corner.
    """
    if pset.dim != 2:
        raise ValueError("corner4_discrepancy supports dim 2 only")
    best = None
    for cid in (1, 2, 3, 4):
        rep = star_discrepancy(reflect(pset, cid))
        if best is None or rep.value > best.value + 0.0:
            best = replace(rep, corner_id=cid, measure="corner4")
    return best


def _count_box(pts, lower, upper, closed):
    if closed:
        return int(np.all((pts >= lower) & (pts <= upper), axis=1).sum())
    return int(np.all((pts > lower) & (pts < upper), axis=1).sum())


def recompute_witness(pset: PointSet, report: DiscrepancyReport) -> float:
    """Re-evaluate the local discrepancy of a report's witness box.

    Serves as the audit path for every engine: the returned value must
    reproduce ``report.value``.
    """
    lower = np.asarray(report.witness_lower, dtype=np.float64)
    upper = np.asarray(report.witness_upper, dtype=np.float64)
    closed = report.box_kind == CLOSED
    measure = report.measure

    if measure in ("star", "corner4"):
        base = pset if report.corner_id == 1 else reflect(pset, report.corner_id)
        q = tuple(upper)
        return local_closed(base, q) if closed else local_open(base, q)

    if measure == "extreme":
        cnt = _count_box(pset.points, lower, upper, closed)
        vol = float(np.prod(upper - lower))
        return cnt / pset.n - vol if closed else vol - cnt / pset.n

    if measure == "periodic":
        n = pset.n
        vol = 1.0
        masks = []
        for j in range(2):
            lo, hi, c = lower[j], upper[j], pset.points[:, j]
            if lo < hi:
                vol *= hi - lo
                masks.append((c >= lo) & (c <= hi) if closed else (c > lo) & (c < hi))
            elif lo > hi:
                vol *= (1.0 - lo) + hi
                masks.append((c >= lo) | (c <= hi) if closed else (c > lo) | (c < hi))
            elif closed:  # degenerate line
                vol *= 0.0
                masks.append(c == lo)
            else:  # full wrap minus one line
                vol *= 1.0
                masks.append(c != lo)
        cnt = int((masks[0] & masks[1]).sum())
        return cnt / n - vol if closed else vol - cnt / n

    raise ValueError(f"unknown measure: {measure}")

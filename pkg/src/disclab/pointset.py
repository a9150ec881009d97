"""Point sets in the unit cube: generators, grids, reflections and CSV I/O.

A point set is represented by the :class:`PointSet` wrapper around an
``(n, dim)`` float64 array with all coordinates in [0, 1].  Generators are
deterministic: calling them twice with the same arguments yields
bit-identical coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0

# Direction-number initialisation for the second Sobol' dimension
# (primitive polynomial x + 1, classic Joe-Kuo style m-values).
_SOBOL_DIM2_M = (1,)
_SOBOL_BITS = 52


class DomainError(ValueError):
    """A coordinate fell outside the unit cube."""


class ParseError(ValueError):
    """A point file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class PointSet:
    """``n`` points in ``[0, 1]^dim``.

    The coordinate array is copied and locked on construction, so instances
    can be shared freely across threads.
    """

    points: np.ndarray
    dim: int = field(default=0)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2d array of shape (n, dim)")
        n, d = pts.shape
        if n < 1:
            raise ValueError("a point set needs at least one point")
        dim = self.dim or d
        if dim != d:
            raise ValueError(f"dim={dim} does not match coordinate width {d}")
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise DomainError("coordinates must lie in [0, 1]")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "dim", dim)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def coords(self, axis: int) -> np.ndarray:
        return self.points[:, axis]

    def with_point(self, index: int, new_point) -> "PointSet":
        """Copy of the set with one point replaced."""
        pts = self.points.copy()
        pts[index] = new_point
        return PointSet(pts)

    def __iter__(self):
        return (tuple(p) for p in self.points)

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class Grid:
    """Per-dimension sorted unique coordinate values and their closures.

    ``gamma[j]`` holds the distinct j-th coordinates in increasing order;
    ``gamma_bar[j]`` is the same list with 1 appended when absent.
    """

    gamma: tuple
    gamma_bar: tuple

    @property
    def dim(self) -> int:
        return len(self.gamma)


def grid_of(pset: PointSet) -> Grid:
    """Extract the coordinate grid of a point set.

    Each axis contributes its sorted unique coordinates; the closure adds
    the value 1 if no point sits on that boundary.
    """
    gamma = []
    gamma_bar = []
    for j in range(pset.dim):
        vals = np.unique(pset.points[:, j])
        gamma.append(vals)
        if vals[-1] < 1.0:
            closure = np.append(vals, 1.0)
        else:
            closure = vals
        gamma_bar.append(closure)
    return Grid(tuple(gamma), tuple(gamma_bar))


def fibonacci_set(n: int) -> PointSet:
    """Golden-ratio lattice set ``(i/n, frac(i*phi))`` for ``i = 0..n-1``.

    Each fractional part is computed directly from ``i * phi`` rather than
    by repeated addition, so coordinates do not drift for large ``i``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    i = np.arange(n, dtype=np.float64)
    x = i / n
    y = np.mod(i * GOLDEN_RATIO, 1.0)
    return PointSet(np.column_stack([x, y]))


def lattice1(n: int, r: float) -> PointSet:
    """Rank-1 style lattice ``(i/n, frac(i*r))`` for ``i = 0..n-1``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not 0.0 <= r < 1.0:
        raise ValueError("r must lie in [0, 1)")
    i = np.arange(n, dtype=np.float64)
    return PointSet(np.column_stack([i / n, np.mod(i * r, 1.0)]))


def lattice2(n: int, r1: float, r2: float) -> PointSet:
    """Two-parameter lattice ``(frac(i*r1), frac(i*r2))`` for ``i = 0..n-1``."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    for name, r in (("r1", r1), ("r2", r2)):
        if not 0.0 <= r < 1.0:
            raise ValueError(f"{name} must lie in [0, 1)")
    i = np.arange(n, dtype=np.float64)
    return PointSet(np.column_stack([np.mod(i * r1, 1.0), np.mod(i * r2, 1.0)]))


def sobol2d(n: int) -> PointSet:
    """First ``n`` points of the plain (unscrambled) 2D Sobol' sequence.

    Dimension 1 is the van der Corput sequence in base 2; dimension 2 uses
    the direction numbers derived from the degree-1 primitive polynomial.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    nbits = max(1, int(n - 1).bit_length())

    # Direction integers v[k] scaled to _SOBOL_BITS fractional bits.
    v1 = [1 << (_SOBOL_BITS - k - 1) for k in range(nbits)]
    v2 = []
    s = len(_SOBOL_DIM2_M)
    for k in range(nbits):
        if k < s:
            v2.append(_SOBOL_DIM2_M[k] << (_SOBOL_BITS - k - 1))
        else:
            # Recurrence for poly x + 1 (degree 1, no middle coefficients).
            prev = v2[k - s]
            v2.append(prev ^ (prev >> s))

    pts = np.empty((n, 2), dtype=np.float64)
    scale = float(1 << _SOBOL_BITS)
    for i in range(n):
        acc1 = 0
        acc2 = 0
        bits = i
        k = 0
        while bits:
            if bits & 1:
                acc1 ^= v1[k]
                acc2 ^= v2[k]
            bits >>= 1
            k += 1
        pts[i, 0] = acc1 / scale
        pts[i, 1] = acc2 / scale
    return PointSet(pts)


def random_set(n: int, dim: int, seed: int) -> PointSet:
    """Uniform random points, deterministic for a fixed seed."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    rng = np.random.default_rng(seed)
    return PointSet(rng.random((n, dim)))


def reflections(pset: PointSet):
    """The three reflected copies ``P2``, ``P3``, ``P4`` of a 2D set.

    ``P2`` mirrors x, ``P3`` mirrors both axes, ``P4`` mirrors y.  Applying
    the same reflection twice restores the original coordinates.
    """
    if pset.dim != 2:
        raise ValueError("reflections are defined for 2D sets only")
    x = pset.points[:, 0]
    y = pset.points[:, 1]
    p2 = PointSet(np.column_stack([1.0 - x, y]))
    p3 = PointSet(np.column_stack([1.0 - x, 1.0 - y]))
    p4 = PointSet(np.column_stack([x, 1.0 - y]))
    return p2, p3, p4


def reflect(pset: PointSet, corner_id: int) -> PointSet:
    """Reflected copy anchoring corner ``corner_id`` at the origin.

    Corner 1 is the origin itself (identity), 2 = (1,0), 3 = (1,1),
    4 = (0,1), matching the order returned by :func:`reflections`.
    """
    if corner_id == 1:
        return pset
    p2, p3, p4 = reflections(pset)
    try:
        return {2: p2, 3: p3, 4: p4}[corner_id]
    except KeyError:
        raise ValueError("corner_id must be in 1..4") from None


def write_points(pset: PointSet, path) -> None:
    """Write one point per line as comma-separated 17-digit decimals."""
    with open(path, "w") as fh:
        fh.write(f"# dim={pset.dim} n={pset.n}\n")
        for p in pset.points:
            fh.write(",".join(f"{c:.17g}" for c in p) + "\n")


def read_points(path) -> PointSet:
    """Read a CSV point file written by :func:`write_points`.

    Lines starting with ``#`` are ignored; an optional non-numeric header
    row is skipped.  Raises :class:`ParseError` with the offending line
    number for malformed rows and :class:`DomainError` for coordinates
    outside [0, 1].
    """
    rows = []
    width = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f.strip() for f in line.split(",")]
            try:
                values = [float(f) for f in fields]
            except ValueError:
                if not rows and width is None:
                    continue  # header row
                raise ParseError("non-numeric field", line=lineno) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise ParseError(
                    f"expected {width} coordinates, got {len(values)}", line=lineno
                )
            for c in values:
                if not 0.0 <= c <= 1.0:
                    raise DomainError(
                        f"line {lineno}: coordinate {c!r} outside [0, 1]"
                    )
            rows.append(values)
    if not rows:
        raise ParseError("no points found")
    return PointSet(np.array(rows, dtype=np.float64))

"""Solver-neutral optimization models for box-discrepancy minimization.

The builders emit a :class:`ModelIR` per formulation family: the ordered
"classical" model over point coordinates with sorting indicators, the
assignment model over grid coordinates with a permutation matrix, its 3D
extension with quadratic-izing auxiliaries, lattice restrictions with wrap
binaries, and the extreme/periodic/4-corner extensions.  Models serialize
to LP-format text; externally produced solutions are checked constraint by
constraint and certified by re-evaluating the exact discrepancy engines on
the extracted point set.

Variable naming is fixed (``x_1``, ``y_2_3``, ``a_1_2``, ``a_1_2_3``,
``w_1_2``, ``k_1``, ``h_1``, ``r``, ``r1``, ``r2``, ``f``) so solution
records can be matched by name.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np

from . import discrepancy
from .pointset import PointSet

CONTINUOUS = "continuous"
BINARY = "binary"

DEFAULT_EPS = 1e-6


class SerializationError(ValueError):
    pass


class IncompleteSolutionError(KeyError):
    """A solution record is missing a free model variable."""


class ExtractionError(ValueError):
    """A solution's assignment structure is inconsistent."""


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = CONTINUOUS
    lb: float = 0.0
    ub: float = 1.0
    fixed: float | None = None


@dataclass(frozen=True)
class Constraint:
    """``terms + products (sense) rhs`` with terms summed per variable."""

    label: str
    terms: tuple
    sense: str
    rhs: float
    products: tuple = ()

    @property
    def is_bilinear(self) -> bool:
        return bool(self.products)


@dataclass
class ModelIR:
    name: str
    variables: list
    constraints: list
    objective: str = "f"
    meta: dict = field(default_factory=dict)

    @property
    def linear_constraints(self):
        return [c for c in self.constraints if not c.is_bilinear]

    @property
    def bilinear_constraints(self):
        return [c for c in self.constraints if c.is_bilinear]

    def variable(self, name):
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def validate(self):
        names = {v.name for v in self.variables}
        if len(names) != len(self.variables):
            raise ValueError("duplicate variable names")
        if self.objective not in names:
            raise ValueError(f"objective variable {self.objective} undeclared")
        for v in self.variables:
            if v.lb > v.ub:
                raise ValueError(f"{v.name}: lb > ub")
            if v.fixed is not None and not (v.lb <= v.fixed <= v.ub):
                raise ValueError(f"{v.name}: fixed value outside bounds")
        for c in self.constraints:
            for _, name in c.terms:
                if name not in names:
                    raise ValueError(f"{c.label}: undeclared variable {name}")
            for _, a, b in c.products:
                if a not in names or b not in names:
                    raise ValueError(f"{c.label}: undeclared product variable")
            if c.sense not in ("<=", ">=", "="):
                raise ValueError(f"{c.label}: bad sense {c.sense}")
        return self


@dataclass
class SolutionRecord:
    """Named variable values, typically parsed from a solver's output."""

    assignment: dict
    source: str = ""


@dataclass
class CheckReport:
    ok: bool
    max_violation: float
    violations: list
    n_constraints: int


def _merge_terms(pairs):
    acc = {}
    order = []
    for coef, name in pairs:
        if name not in acc:
            acc[name] = 0.0
            order.append(name)
        acc[name] += coef
    return tuple((acc[n], n) for n in order if acc[n] != 0.0)


def _merge_products(triples):
    acc = {}
    order = []
    for coef, a, b in triples:
        key = (a, b)
        if key not in acc:
            acc[key] = 0.0
            order.append(key)
        acc[key] += coef
    return tuple((acc[k], k[0], k[1]) for k in order if acc[k] != 0.0)


def _con(label, terms, sense, rhs, products=()):
    return Constraint(label, _merge_terms(terms), sense, float(rhs),
                      _merge_products(products))


# --------------------------------------------------------------- builders

CLASSICAL_EXTRAS = ("lb", "tri", "ysum", "shift")
ASSIGNMENT_EXTRAS = ("lb", "anchor", "gap", "box_bounds")
ASSIGNMENT3D_EXTRAS = ("lb", "anchor")


def _check_extras(extras, allowed):
    extras = tuple(extras) if extras is not None else ()
    for e in extras:
        if e not in allowed:
            raise ValueError(f"unknown extra {e!r}; allowed: {allowed}")
    return extras


def build_classical_2d(n, eps=DEFAULT_EPS, extras=("lb",), _lattice=None):
    """Ordered-coordinate model: point i is (x_{2i-1}, x_{2i}), sorted by
    first coordinate, with binaries y_i_j ordering second coordinates.

    Closed-box constraints run over j <= i, open-box ones over j < i with
    boundary grid lines supplied by two dummy coordinates fixed to 1.

    Extras: ``lb`` (objective at least 1/n, added when n >= 4), ``tri``
    (indicator transitivity both ways), ``ysum`` (total indicator count),
    ``shift`` (shift-derived anchors, spacing and box bounds; replaces the
    plain indicator spacing and re-fixes the y_i_0 dummies to 0).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if eps <= 0:
        raise ValueError("eps must be positive")
    extras = _check_extras(extras, CLASSICAL_EXTRAS)
    shift = "shift" in extras
    lattice = _lattice or {}

    variables = []
    coord_lb = 0.0 if lattice else eps
    fixed_x = lattice.get("fixed_x", {})
    for i in range(1, 2 * n + 1):
        fx = fixed_x.get(i)
        variables.append(
            Variable(f"x_{i}", CONTINUOUS,
                     lb=0.0 if fx is not None else coord_lb, ub=1.0,
                     fixed=fx)
        )
    variables.append(Variable("x_0", CONTINUOUS, 1.0, 1.0, fixed=1.0))
    variables.append(Variable(f"x_{2 * n + 1}", CONTINUOUS, 1.0, 1.0, fixed=1.0))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            variables.append(Variable(f"y_{i}_{j}", BINARY))
    for j in range(1, n + 1):
        variables.append(Variable(f"y_0_{j}", BINARY, fixed=0.0))
    variables.append(Variable("y_0_0", BINARY, fixed=1.0))
    for j in range(1, n + 2):
        variables.append(Variable(f"y_{j}_0", BINARY, fixed=0.0 if shift else 1.0))
    for j in range(1, n + 1):
        variables.append(Variable(f"y_{n + 1}_{j}", BINARY, fixed=1.0))
    variables.append(Variable("f", CONTINUOUS, 0.0, 1.0))

    cons = []
    inv = 1.0 / n
    # closed boxes: grid point (x_{2i-1}, x_{2j}), j <= i
    for i in range(1, n + 1):
        for j in range(1, i + 1):
            terms = [(inv, f"y_{u}_{j}") for u in range(1, i + 1)]
            terms += [(1.0, f"y_{i}_{j}"), (-1.0, "f")]
            cons.append(_con(f"closed_{i}_{j}", terms, "<=", 1.0,
                             [(-1.0, f"x_{2 * i - 1}", f"x_{2 * j}")]))
    # open boxes: i up to n+1, j from 0; dummies supply the boundary
    for i in range(1, n + 2):
        for j in range(0, min(i, n + 1)):
            terms = [(-inv, f"y_{u}_{j}") for u in range(0, i)]
            terms += [(1.0, f"y_{i}_{j}"), (-1.0, "f")]
            xi = f"x_{2 * i - 1}" if i <= n else f"x_{2 * n + 1}"
            xj = f"x_{2 * j}" if j >= 1 else "x_0"
            cons.append(_con(f"open_{i}_{j}", terms, "<=", 1.0 - inv,
                             [(1.0, xi, xj)]))
    # consecutive spacing in the first coordinate
    if not lattice.get("skip_mindist"):
        for i in range(1, n):
            cons.append(_con(f"xgap_{i}",
                             [(1.0, f"x_{2 * i + 1}"), (-1.0, f"x_{2 * i - 1}")],
                             ">=", eps))
    # indicator definition (replaced by the stronger shift spacing below)
    if not shift:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                cons.append(_con(f"ydef_lo_{i}_{j}",
                                 [(1.0, f"x_{2 * j}"), (-1.0, f"x_{2 * i}"),
                                  (-1.0, f"y_{i}_{j}")], ">=", eps - 1.0))
                cons.append(_con(f"ydef_hi_{i}_{j}",
                                 [(1.0, f"x_{2 * j}"), (-1.0, f"x_{2 * i}"),
                                  (-1.0, f"y_{i}_{j}")], "<=", 0.0))
    for i in range(1, n + 1):
        for j in range(1, i):
            cons.append(_con(f"yanti_{i}_{j}",
                             [(1.0, f"y_{i}_{j}"), (1.0, f"y_{j}_{i}")],
                             "=", 1.0))
    for i in range(1, n + 1):
        cons.append(_con(f"ydiag_{i}", [(1.0, f"y_{i}_{i}")], "=", 1.0))

    if "lb" in extras and n >= 4:
        cons.append(_con("f_lower_bound", [(1.0, "f")], ">=", inv))
    if "tri" in extras:
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for k in range(1, n + 1):
                    cons.append(_con(f"tri_a_{i}_{j}_{k}",
                                     [(1.0, f"y_{i}_{j}"), (1.0, f"y_{j}_{k}"),
                                      (-1.0, f"y_{i}_{k}")], "<=", 1.0))
                    cons.append(_con(f"tri_b_{i}_{j}_{k}",
                                     [(1.0, f"y_{i}_{j}"), (1.0, f"y_{j}_{k}"),
                                      (-1.0, f"y_{i}_{k}")], ">=", 0.0))
    if "ysum" in extras:
        cons.append(_con("ysum",
                         [(1.0, f"y_{i}_{j}")
                          for i in range(1, n + 1) for j in range(1, n + 1)],
                         "=", n * (n + 1) / 2.0))
    if shift:
        cons.append(_con("anchor_x1", [(1.0, "x_1"), (-1.0, "f")], "=", 0.0))
        for i in range(1, n + 1):
            cons.append(_con(f"ymin_{i}",
                             [(1.0, f"x_{2 * i}"), (-1.0, "f")], ">=", 0.0))
        for i in range(1, n):
            cons.append(_con(f"xgap_strong_{i}",
                             [(1.0, f"x_{2 * i + 1}"), (-1.0, f"x_{2 * i - 1}"),
                              (-1.0, f"y_{i}_{i + 1}")], ">=", inv - 1.0))
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                cons.append(_con(f"ygap_strong_{i}_{j}",
                                 [(1.0, f"x_{2 * j}"), (-1.0, f"x_{2 * i}"),
                                  (-1.0, f"y_{i}_{j}")], ">=", inv - 1.0))
        for i in range(1, n + 1):
            cons.append(_con(f"xbound_hi_{i}",
                             [(1.0, f"x_{2 * i - 1}"), (-1.0, "f")],
                             "<=", (i - 1) * inv))
            cons.append(_con(f"xbound_lo_{i}",
                             [(1.0, f"x_{2 * i - 1}"), (1.0, "f")],
                             ">=", i * inv))
        for i in range(1, n):
            for j in range(i + 1, n):
                cons.append(_con(
                    f"pairgap_{i}_{j}",
                    [(1.0, f"x_{2 * j - 1}"), (-1.0, f"x_{2 * i - 1}"),
                     (1.0, f"x_{2 * j}"), (-1.0, f"x_{2 * i}"),
                     (-1.0, f"y_{i}_{j}")], ">=", 2.0 * inv - 1.0))

    meta = {"family": "classical2d", "n": n, "dim": 2, "eps": eps,
            "extras": list(extras)}
    meta.update(lattice.get("meta", {}))
    return ModelIR("classical2d", variables, cons, "f", meta).validate()


def build_lattice_model(n, double=False, eps=DEFAULT_EPS):
    """Classical model restricted to lattice point sets.

    Single parameter: first coordinates are fixed to the grid (i-1)/n and
    the second coordinates advance by ``r`` modulo 1, with wrap binaries
    ``k_i``.  Double: both coordinates advance modulo 1 (``r1`` horizontal
    with wrap binaries ``h_i``, ``r2`` vertical with ``k_i``); coordinate
    sorting is kept by the consecutive-spacing constraints, so the double
    model describes the wrap-free horizontal parameter range.
    """
    if n < 2:
        raise ValueError("lattice models need n >= 2")
    if double:
        fixed_x = {1: 0.0, 2: 0.0}
        meta = {"family": "lattice2"}
        skip_mindist = False
    else:
        fixed_x = {2 * i - 1: (i - 1) / n for i in range(1, n + 1)}
        fixed_x[2] = 0.0
        meta = {"family": "lattice1"}
        skip_mindist = True
    m = build_classical_2d(
        n, eps=eps, extras=(),
        _lattice={"fixed_x": fixed_x, "skip_mindist": skip_mindist,
                  "meta": meta},
    )
    variables = list(m.variables)
    cons = list(m.constraints)

    def add_wraps(param, prefix, coord):
        # coord(i) + param = coord(i+1) + binary; binary forced up when
        # the sum passes 1 (strictness through eps)
        for i in range(1, n):
            variables.append(Variable(f"{prefix}_{i}", BINARY))
            cons.append(_con(
                f"wrap_{prefix}_{i}",
                [(1.0, coord(i)), (1.0, param), (-1.0, coord(i + 1)),
                 (-1.0, f"{prefix}_{i}")], "=", 0.0))
            cons.append(_con(
                f"wrapdef_{prefix}_{i}",
                [(1.0, f"{prefix}_{i}"), (-1.0, coord(i)), (-1.0, param)],
                ">=", eps - 1.0))

    if double:
        variables.append(Variable("r1", CONTINUOUS, 0.0, 1.0))
        variables.append(Variable("r2", CONTINUOUS, 0.0, 1.0))
        add_wraps("r1", "h", lambda i: f"x_{2 * i - 1}")
        add_wraps("r2", "k", lambda i: f"x_{2 * i}")
        name = "lattice2"
    else:
        variables.append(Variable("r", CONTINUOUS, 0.0, 1.0))
        add_wraps("r", "k", lambda i: f"x_{2 * i}")
        name = "lattice1"

    out = ModelIR(name, variables, cons, "f", dict(m.meta))
    out.meta["family"] = name
    return out.validate()


def _assignment_core(n, eps):
    variables = []
    for i in range(1, n + 1):
        variables.append(Variable(f"x_{i}", CONTINUOUS, 0.0, 1.0))
    variables.append(Variable(f"x_{n + 1}", CONTINUOUS, 1.0, 1.0, fixed=1.0))
    for i in range(1, n + 1):
        variables.append(Variable(f"y_{i}", CONTINUOUS, 0.0, 1.0))
    variables.append(Variable(f"y_{n + 1}", CONTINUOUS, 1.0, 1.0, fixed=1.0))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            variables.append(Variable(f"a_{i}_{j}", BINARY))
    variables.append(Variable("f", CONTINUOUS, 0.0, 1.0))

    cons = []
    for i in range(1, n):
        cons.append(_con(f"xgap_{i}",
                         [(1.0, f"x_{i + 1}"), (-1.0, f"x_{i}")], ">=", eps))
        cons.append(_con(f"ygap_{i}",
                         [(1.0, f"y_{i + 1}"), (-1.0, f"y_{i}")], ">=", eps))
    for j in range(1, n + 1):
        cons.append(_con(f"col_{j}",
                         [(1.0, f"a_{i}_{j}") for i in range(1, n + 1)],
                         "=", 1.0))
    for i in range(1, n + 1):
        cons.append(_con(f"row_{i}",
                         [(1.0, f"a_{i}_{j}") for j in range(1, n + 1)],
                         "=", 1.0))
    return variables, cons


def build_assignment_2d(n, eps=DEFAULT_EPS, extras=("lb",), critical=False):
    """Grid-assignment model: sorted coordinate vectors x, y and a
    permutation matrix a_i_j placing one point per grid row and column.

    ``critical`` relaxes each closed-box constraint unless a point sits on
    both of its outer edges (off by default; slows solvers in practice).

    Extras: ``lb``, ``anchor`` (x_1 = f and y_1 = f), ``gap`` (1/n spacing
    between coordinates of nested points, expressed through assignment
    prefix sums), ``box_bounds`` (per-rank coordinate bounds).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    extras = _check_extras(extras, ASSIGNMENT_EXTRAS)
    variables, cons = _assignment_core(n, eps)
    inv = 1.0 / n

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            terms = [(inv, f"a_{u}_{v}")
                     for u in range(1, i + 1) for v in range(1, j + 1)]
            terms.append((-1.0, "f"))
            rhs = 0.0
            if critical:
                # relaxed unless a point lies on each outer edge
                terms += [(1.0, f"a_{k}_{j}") for k in range(1, i + 1)]
                terms += [(1.0, f"a_{i}_{k}") for k in range(1, j + 1)]
                rhs = 2.0
            cons.append(_con(f"closed_{i}_{j}", terms, "<=", rhs,
                             [(-1.0, f"x_{i}", f"y_{j}")]))
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            terms = [(-inv, f"a_{u}_{v}")
                     for u in range(1, i) for v in range(1, j)]
            terms.append((-1.0, "f"))
            cons.append(_con(f"open_{i}_{j}", terms, "<=", 0.0,
                             [(1.0, f"x_{i}", f"y_{j}")]))

    if "lb" in extras and n >= 4:
        cons.append(_con("f_lower_bound", [(1.0, "f")], ">=", inv))
    if "anchor" in extras:
        cons.append(_con("anchor_x1", [(1.0, "x_1"), (-1.0, "f")], "=", 0.0))
        cons.append(_con("anchor_y1", [(1.0, "y_1"), (-1.0, "f")], "=", 0.0))
    if "gap" in extras:
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                for k in range(1, n + 1):
                    xt = [(1.0, f"x_{j}"), (-1.0, f"x_{i}")]
                    xt += [(-1.0, f"a_{i}_{u}") for u in range(1, k + 1)]
                    xt += [(1.0, f"a_{j}_{u}") for u in range(1, k + 1)]
                    cons.append(_con(f"xgap_nest_{i}_{j}_{k}", xt, ">=",
                                     inv - 1.0))
                    yt = [(1.0, f"y_{j}"), (-1.0, f"y_{i}")]
                    yt += [(-1.0, f"a_{u}_{i}") for u in range(1, k + 1)]
                    yt += [(1.0, f"a_{u}_{j}") for u in range(1, k + 1)]
                    cons.append(_con(f"ygap_nest_{i}_{j}_{k}", yt, ">=",
                                     inv - 1.0))
    if "box_bounds" in extras:
        for i in range(2, n + 1):
            for c in ("x", "y"):
                cons.append(_con(f"{c}bound_hi_{i}",
                                 [(1.0, f"{c}_{i}"), (-1.0, "f")],
                                 "<=", (i - 1) * inv))
                cons.append(_con(f"{c}bound_lo_{i}",
                                 [(1.0, f"{c}_{i}"), (1.0, "f")],
                                 ">=", i * inv))

    meta = {"family": "assignment2d", "n": n, "dim": 2, "eps": eps,
            "extras": list(extras), "critical": critical}
    return ModelIR("assignment2d", variables, cons, "f", meta).validate()


def build_assignment_3d(n, extras=()):
    """3D grid-assignment model with trilinear volumes made quadratic.

    Auxiliary variables w_i_j stand for the products x_i * y_j, so every
    box volume x_i * y_j * z_k becomes the bilinear term w_i_j * z_k.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    extras = _check_extras(extras, ASSIGNMENT3D_EXTRAS)
    variables = []
    for c in ("x", "y", "z"):
        for i in range(1, n + 1):
            variables.append(Variable(f"{c}_{i}", CONTINUOUS, 0.0, 1.0))
        variables.append(Variable(f"{c}_{n + 1}", CONTINUOUS, 1.0, 1.0,
                                  fixed=1.0))
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            variables.append(Variable(f"w_{i}_{j}", CONTINUOUS, 0.0, 1.0))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                variables.append(Variable(f"a_{i}_{j}_{k}", BINARY))
    variables.append(Variable("f", CONTINUOUS, 0.0, 1.0))

    cons = []
    inv = 1.0 / n
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            cons.append(_con(f"wdef_{i}_{j}", [(1.0, f"w_{i}_{j}")], "=", 0.0,
                             [(-1.0, f"x_{i}", f"y_{j}")]))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                terms = [(inv, f"a_{u}_{v}_{w}")
                         for u in range(1, i + 1)
                         for v in range(1, j + 1)
                         for w in range(1, k + 1)]
                terms.append((-1.0, "f"))
                cons.append(_con(f"closed_{i}_{j}_{k}", terms, "<=", 0.0,
                                 [(-1.0, f"w_{i}_{j}", f"z_{k}")]))
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            for k in range(1, n + 2):
                terms = [(-inv, f"a_{u}_{v}_{w}")
                         for u in range(1, i)
                         for v in range(1, j)
                         for w in range(1, k)]
                terms.append((-1.0, "f"))
                cons.append(_con(f"open_{i}_{j}_{k}", terms, "<=", 0.0,
                                 [(1.0, f"w_{i}_{j}", f"z_{k}")]))
    for i in range(1, n + 1):
        cons.append(_con(f"marg_x_{i}",
                         [(1.0, f"a_{i}_{j}_{k}")
                          for j in range(1, n + 1) for k in range(1, n + 1)],
                         "=", 1.0))
    for j in range(1, n + 1):
        cons.append(_con(f"marg_y_{j}",
                         [(1.0, f"a_{i}_{j}_{k}")
                          for i in range(1, n + 1) for k in range(1, n + 1)],
                         "=", 1.0))
    for k in range(1, n + 1):
        cons.append(_con(f"marg_z_{k}",
                         [(1.0, f"a_{i}_{j}_{k}")
                          for i in range(1, n + 1) for j in range(1, n + 1)],
                         "=", 1.0))

    if "anchor" in extras:
        for c in ("x", "y", "z"):
            cons.append(_con(f"anchor_{c}1",
                             [(1.0, f"{c}_1"), (-1.0, "f")], "=", 0.0))
    if "lb" in extras and n >= 3:
        cons.append(_con("f_lower_bound", [(1.0, "f")], ">=", inv))

    meta = {"family": "assignment3d", "n": n, "dim": 3, "extras": list(extras)}
    return ModelIR("assignment3d", variables, cons, "f", meta).validate()


def _extreme_dummies(n, variables):
    variables.append(Variable("x_0", CONTINUOUS, 0.0, 0.0, fixed=0.0))
    variables.append(Variable("y_0", CONTINUOUS, 0.0, 0.0, fixed=0.0))
    variables.append(Variable("a_0_0", BINARY, fixed=0.0))
    for i in range(1, n + 1):
        variables.append(Variable(f"a_{i}_0", BINARY, fixed=0.0))
        variables.append(Variable(f"a_0_{i}", BINARY, fixed=0.0))


def _box_product(sign, xi, xk, yj, yl):
    """Expansion of sign * (x_i - x_k)(y_j - y_l) into product terms."""
    return [(sign, xi, yj), (-sign, xi, yl), (-sign, xk, yj), (sign, xk, yl)]


def build_extreme_model(n, eps=DEFAULT_EPS):
    """Assignment model generalized to boxes with a free lower corner.

    Closed boxes range over corner indices 0 <= k < i <= n (with zero
    dummies for the lower boundary), open ones up to n+1; the anchored
    star boxes are exactly the k = l = 0 slice.  The universal 1/n lower
    bound stays valid for this measure.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    variables, cons = _assignment_core(n, eps)
    _extreme_dummies(n, variables)
    inv = 1.0 / n

    for k in range(0, n + 1):
        for i in range(k + 1, n + 1):
            for l in range(0, n + 1):
                for j in range(l + 1, n + 1):
                    terms = [(inv, f"a_{u}_{v}")
                             for u in range(max(k, 1), i + 1)
                             for v in range(max(l, 1), j + 1)]
                    terms.append((-1.0, "f"))
                    cons.append(_con(
                        f"eclosed_{k}_{i}_{l}_{j}", terms, "<=", 0.0,
                        _box_product(-1.0, f"x_{i}", f"x_{k}",
                                     f"y_{j}", f"y_{l}")))
    for k in range(0, n + 2):
        for i in range(k + 1, n + 2):
            for l in range(0, n + 2):
                for j in range(l + 1, n + 2):
                    terms = [(-inv, f"a_{u}_{v}")
                             for u in range(k + 1, min(i, n + 1))
                             for v in range(l + 1, min(j, n + 1))
                             if u >= 1 and v >= 1]
                    terms.append((-1.0, "f"))
                    cons.append(_con(
                        f"eopen_{k}_{i}_{l}_{j}", terms, "<=", 0.0,
                        _box_product(1.0, f"x_{i}", f"x_{k}",
                                     f"y_{j}", f"y_{l}")))
    cons.append(_con("f_lower_bound", [(1.0, "f")], ">=", inv))

    meta = {"family": "extreme", "n": n, "dim": 2, "eps": eps}
    return ModelIR("extreme", variables, cons, "f", meta).validate()


def build_periodic_model(n, eps=DEFAULT_EPS):
    """Extreme model plus the boxes wrapping around either or both axes.

    Wrapped interval lengths are (1 - hi + lo); the double-wrap volume is
    split into the two opposite corner products, matching the source
    constraint family.  Open wrap families include the degenerate full
    wrap that excludes a single grid line (k = i resp. l = j), which
    carries the n = 1 optimum of 1.
    """
    base = build_extreme_model(n, eps=eps)
    variables = list(base.variables)
    cons = list(base.constraints)
    inv = 1.0 / n

    def a_sum(coef, u_range, v_range):
        return [(coef, f"a_{u}_{v}") for u in u_range for v in v_range]

    # x-wrap, closed: x <= x_k or x >= x_i, y in [y_l, y_j]
    for k in range(1, n + 1):
        for i in range(k + 1, n + 1):
            for l in range(0, n + 1):
                for j in range(l + 1, n + 1):
                    vy = range(max(l, 1), j + 1)
                    terms = a_sum(inv, range(1, k + 1), vy)
                    terms += a_sum(inv, range(i, n + 1), vy)
                    terms += [(-1.0, f"y_{j}"), (1.0, f"y_{l}"), (-1.0, "f")]
                    prods = _box_product(1.0, f"x_{i}", f"x_{k}",
                                         f"y_{j}", f"y_{l}")
                    cons.append(_con(f"pxw_closed_{k}_{i}_{l}_{j}",
                                     terms, "<=", 0.0, prods))
    # x-wrap, open: x < x_k or x > x_i (k = i drops a single grid line)
    for k in range(1, n + 2):
        for i in range(k, n + 2):
            for l in range(0, n + 1):
                for j in range(l + 1, n + 2):
                    vy = range(l + 1, min(j, n + 1))
                    terms = a_sum(-inv, range(1, k), vy)
                    terms += a_sum(-inv, range(i + 1, n + 1), vy)
                    terms += [(1.0, f"y_{j}"), (-1.0, f"y_{l}"), (-1.0, "f")]
                    prods = _box_product(-1.0, f"x_{i}", f"x_{k}",
                                         f"y_{j}", f"y_{l}")
                    cons.append(_con(f"pxw_open_{k}_{i}_{l}_{j}",
                                     terms, "<=", 0.0, prods))
    # y-wrap, closed
    for k in range(0, n + 1):
        for i in range(k + 1, n + 1):
            for l in range(1, n + 1):
                for j in range(l + 1, n + 1):
                    ux = range(max(k, 1), i + 1)
                    terms = a_sum(inv, ux, range(1, l + 1))
                    terms += a_sum(inv, ux, range(j, n + 1))
                    terms += [(-1.0, f"x_{i}"), (1.0, f"x_{k}"), (-1.0, "f")]
                    prods = _box_product(1.0, f"x_{i}", f"x_{k}",
                                         f"y_{j}", f"y_{l}")
                    cons.append(_con(f"pyw_closed_{k}_{i}_{l}_{j}",
                                     terms, "<=", 0.0, prods))
    # y-wrap, open (l = j drops a single grid line)
    for k in range(0, n + 1):
        for i in range(k + 1, n + 2):
            for l in range(1, n + 2):
                for j in range(l, n + 2):
                    ux = range(k + 1, min(i, n + 1))
                    terms = a_sum(-inv, ux, range(1, l))
                    terms += a_sum(-inv, ux, range(j + 1, n + 1))
                    terms += [(1.0, f"x_{i}"), (-1.0, f"x_{k}"), (-1.0, "f")]
                    prods = _box_product(-1.0, f"x_{i}", f"x_{k}",
                                         f"y_{j}", f"y_{l}")
                    cons.append(_con(f"pyw_open_{k}_{i}_{l}_{j}",
                                     terms, "<=", 0.0, prods))
    # double wrap, closed: the two opposite corner boxes
    for k in range(1, n + 1):
        for i in range(k + 1, n + 1):
            for l in range(1, n + 1):
                for j in range(l + 1, n + 1):
                    terms = a_sum(inv, range(1, k + 1), range(1, l + 1))
                    terms += a_sum(inv, range(i, n + 1), range(j, n + 1))
                    terms += [(1.0, f"x_{i}"), (1.0, f"y_{j}"), (-1.0, "f")]
                    prods = [(-1.0, f"x_{i}", f"y_{j}"),
                             (-1.0, f"x_{k}", f"y_{l}")]
                    cons.append(_con(f"pdw_closed_{k}_{i}_{l}_{j}",
                                     terms, "<=", 1.0, prods))
    # double wrap, open
    for k in range(1, n + 2):
        for i in range(k + 1, n + 2):
            for l in range(1, n + 2):
                for j in range(l + 1, n + 2):
                    terms = a_sum(-inv, range(1, k), range(1, l))
                    terms += a_sum(-inv, range(i + 1, n + 1),
                                   range(j + 1, n + 1))
                    terms += [(-1.0, f"x_{i}"), (-1.0, f"y_{j}"), (-1.0, "f")]
                    prods = [(1.0, f"x_{i}", f"y_{j}"),
                             (1.0, f"x_{k}", f"y_{l}")]
                    cons.append(_con(f"pdw_open_{k}_{i}_{l}_{j}",
                                     terms, "<=", -1.0, prods))

    meta = {"family": "periodic", "n": n, "dim": 2, "eps": eps}
    return ModelIR("periodic", variables, cons, "f", meta).validate()


def build_corner4_model(n, eps=DEFAULT_EPS):
    """Assignment model with the box families of all four corner
    anchorings, for the worst-corner discrepancy."""
    base = build_assignment_2d(n, eps=eps, extras=())
    variables = list(base.variables)
    cons = list(base.constraints)
    inv = 1.0 / n

    def a_sum(coef, u_range, v_range):
        return [(coef, f"a_{u}_{v}") for u in u_range for v in v_range]

    # corner (1,0): boxes (x_i, 1] x [0, y_j]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            terms = a_sum(inv, range(i, n + 1), range(1, j + 1))
            terms += [(-1.0, f"y_{j}"), (-1.0, "f")]
            cons.append(_con(f"c2_closed_{i}_{j}", terms, "<=", 0.0,
                             [(1.0, f"x_{i}", f"y_{j}")]))
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            terms = a_sum(-inv, range(i + 1, n + 1), range(1, min(j, n + 1)))
            terms += [(1.0, f"y_{j}"), (-1.0, "f")]
            cons.append(_con(f"c2_open_{i}_{j}", terms, "<=", 0.0,
                             [(-1.0, f"x_{i}", f"y_{j}")]))
    # corner (1,1): boxes (x_i, 1] x (y_j, 1]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            terms = a_sum(inv, range(i, n + 1), range(j, n + 1))
            terms += [(1.0, f"x_{i}"), (1.0, f"y_{j}"), (-1.0, "f")]
            cons.append(_con(f"c3_closed_{i}_{j}", terms, "<=", 1.0,
                             [(-1.0, f"x_{i}", f"y_{j}")]))
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            terms = a_sum(-inv, range(i + 1, n + 1), range(j + 1, n + 1))
            terms += [(-1.0, f"x_{i}"), (-1.0, f"y_{j}"), (-1.0, "f")]
            cons.append(_con(f"c3_open_{i}_{j}", terms, "<=", -1.0,
                             [(1.0, f"x_{i}", f"y_{j}")]))
    # corner (0,1): boxes [0, x_i] x (y_j, 1]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            terms = a_sum(inv, range(1, i + 1), range(j, n + 1))
            terms += [(-1.0, f"x_{i}"), (-1.0, "f")]
            cons.append(_con(f"c4_closed_{i}_{j}", terms, "<=", 0.0,
                             [(1.0, f"x_{i}", f"y_{j}")]))
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            terms = a_sum(-inv, range(1, min(i, n + 1)), range(j + 1, n + 1))
            terms += [(1.0, f"x_{i}"), (-1.0, "f")]
            cons.append(_con(f"c4_open_{i}_{j}", terms, "<=", 0.0,
                             [(-1.0, f"x_{i}", f"y_{j}")]))

    meta = {"family": "corner4", "n": n, "dim": 2, "eps": eps}
    return ModelIR("corner4", variables, cons, "f", meta).validate()


# ------------------------------------------------------------ LP format

def _fmt(x):
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _fmt_terms(terms, products):
    parts = []
    for coef, name in terms:
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = name if mag == 1.0 else f"{_fmt(mag)} {name}"
        parts.append((sign, body))
    if products:
        inner = []
        for coef, a, b in products:
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            body = f"{a} * {b}" if mag == 1.0 else f"{_fmt(mag)} {a} * {b}"
            inner.append((sign, body))
        chunks = []
        for idx, (sign, body) in enumerate(inner):
            chunks.append(body if idx == 0 and sign == "+"
                          else f"{sign} {body}")
        parts.append(("+", "[ " + " ".join(chunks) + " ]"))
    out = []
    for idx, (sign, body) in enumerate(parts):
        if idx == 0:
            out.append(body if sign == "+" else f"- {body}")
        else:
            out.append(f"{sign} {body}")
    return " ".join(out)


def serialize_lp(model: ModelIR) -> str:
    """Deterministic LP-format text for a model.

    Quadratic terms appear in square-bracket sections inside constraints;
    binaries are declared in a Binary section; fixed variables become
    equality bounds.  Identical IR yields byte-identical output.
    """
    model.validate()
    lines = ["Minimize", f" obj: {model.objective}", "Subject To"]
    for c in model.constraints:
        if not c.terms and not c.products:
            raise SerializationError(f"empty constraint {c.label}")
        lines.append(f" {c.label}: {_fmt_terms(c.terms, c.products)} "
                     f"{c.sense} {_fmt(c.rhs)}")
    lines.append("Bounds")
    for v in model.variables:
        if v.fixed is not None:
            lines.append(f" {v.name} = {_fmt(v.fixed)}")
        else:
            lines.append(f" {_fmt(v.lb)} <= {v.name} <= {_fmt(v.ub)}")
    binaries = [v.name for v in model.variables if v.kind == BINARY]
    if binaries:
        lines.append("Binary")
        row = " "
        for name in binaries:
            if len(row) + len(name) + 1 > 78 and row.strip():
                lines.append(row.rstrip())
                row = " "
            row += name + " "
        if row.strip():
            lines.append(row.rstrip())
    lines.append("End")
    return "\n".join(lines) + "\n"


_TERM_RE = re.compile(
    r"(?P<sign>[+-])?\s*(?P<coef>\d+(?:\.\d+)?(?:e[+-]?\d+)?)?\s*"
    r"(?P<var>[A-Za-z_][A-Za-z0-9_]*)"
    r"(?:\s*\*\s*(?P<var2>[A-Za-z_][A-Za-z0-9_]*))?",
    re.IGNORECASE)


def _parse_expr(expr):
    terms = []
    products = []
    expr = expr.strip()
    bracket = None
    m = re.search(r"\[(?P<body>[^\]]*)\]", expr)
    if m:
        bracket = m.group("body")
        expr = (expr[: m.start()].rstrip().rstrip("+")
                + " " + expr[m.end():]).strip()

    def walk(text, product_sink):
        pos = 0
        while pos < len(text):
            ch = text[pos]
            if ch.isspace() or ch == "+":
                pos += 1
                continue
            m = _TERM_RE.match(text, pos)
            if m is None:
                raise SerializationError(f"cannot parse term at {text[pos:]!r}")
            sign = -1.0 if m.group("sign") == "-" else 1.0
            coef = float(m.group("coef")) if m.group("coef") else 1.0
            if m.group("var2") is not None:
                product_sink((sign * coef, m.group("var"), m.group("var2")))
            else:
                terms.append((sign * coef, m.group("var")))
            pos = m.end()

    walk(expr, lambda t: products.append(t))
    if bracket:
        saved = list(terms)
        terms.clear()
        walk(bracket, lambda t: products.append(t))
        for coef, name in terms:
            products.append((coef, name, name))
        terms[:] = saved
    return terms, products


def parse_lp(text: str) -> ModelIR:
    """Read back the documented LP subset written by :func:`serialize_lp`."""
    section = None
    objective = None
    constraints = []
    bounds = {}
    fixed = {}
    binaries = []
    order = []

    def note(name):
        if name not in order:
            order.append(name)

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        lowered = line.lower()
        if lowered in ("minimize", "subject to", "bounds", "binary", "end",
                       "general", "st", "s.t."):
            section = lowered
            continue
        if section == "minimize":
            objective = line.split(":", 1)[1].strip() if ":" in line else line
        elif section in ("subject to", "st", "s.t."):
            label, body = line.split(":", 1)
            m = re.search(
                r"(<=|>=|=)\s*([-+]?\d+(?:\.\d+)?(?:e[-+]?\d+)?)\s*$",
                body, re.IGNORECASE)
            if m is None:
                raise SerializationError(f"no sense/rhs in {line!r}")
            sense, rhs = m.group(1), float(m.group(2))
            terms, products = _parse_expr(body[: m.start()])
            constraints.append(
                Constraint(label.strip(), _merge_terms(terms), sense, rhs,
                           tuple(products)))
        elif section == "bounds":
            if "<=" in line:
                m = re.match(
                    r"([-+0-9.eE]+)\s*<=\s*(\w+)\s*<=\s*([-+0-9.eE]+)", line)
                if m is None:
                    raise SerializationError(f"bad bounds line {line!r}")
                lo, name, hi = m.groups()
                bounds[name] = (float(lo), float(hi))
                note(name)
            else:
                name, val = [p.strip() for p in line.split("=")]
                fixed[name] = float(val)
                note(name)
        elif section == "binary":
            binaries.extend(line.split())

    binset = set(binaries)
    variables = []
    declared = set()
    for name in order:
        kind = BINARY if name in binset else CONTINUOUS
        if name in fixed:
            v = Variable(name, kind, fixed[name], fixed[name],
                         fixed=fixed[name])
        else:
            lo, hi = bounds[name]
            v = Variable(name, kind, lo, hi)
        variables.append(v)
        declared.add(name)
    for c in constraints:
        for _, nm in c.terms:
            if nm not in declared:
                variables.append(
                    Variable(nm, BINARY if nm in binset else CONTINUOUS))
                declared.add(nm)
        for _, a, b in c.products:
            for nm in (a, b):
                if nm not in declared:
                    variables.append(
                        Variable(nm, BINARY if nm in binset else CONTINUOUS))
                    declared.add(nm)
    return ModelIR("parsed", variables, constraints,
                   objective or "f", {"family": "parsed"}).validate()


# ------------------------------------------------------- solution records

def solution_from_json(text: str, source="json") -> SolutionRecord:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("solution JSON must be an object of name: value")
    return SolutionRecord({str(k): float(v) for k, v in data.items()}, source)


def solution_from_text(text: str, source="text") -> SolutionRecord:
    assignment = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'name value'")
        assignment[parts[0]] = float(parts[1])
    return SolutionRecord(assignment, source)


def read_solution(path) -> SolutionRecord:
    with open(path) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return solution_from_json(text, source=str(path))
    return solution_from_text(text, source=str(path))


# ----------------------------------------------------------- verification

def _resolved_values(model, record):
    values = {}
    for v in model.variables:
        if v.name in record.assignment:
            val = float(record.assignment[v.name])
        elif v.fixed is not None:
            val = v.fixed
        else:
            raise IncompleteSolutionError(v.name)
        if v.kind == BINARY:
            val = 1.0 if val >= 0.5 else 0.0
        values[v.name] = val
    return values


def check_solution(model: ModelIR, record: SolutionRecord,
                   tol: float = 1e-6) -> CheckReport:
    """Evaluate every constraint and bound of a model on a solution.

    Binary values are rounded at 0.5 before evaluation; fixed variables
    default to their fixed value when absent from the record.  The report
    lists all residuals above ``tol``; the check passes when the largest
    one is within ``tol``.
    """
    values = _resolved_values(model, record)
    violations = []
    max_violation = 0.0

    for v in model.variables:
        val = values[v.name]
        if v.fixed is not None:
            resid = abs(val - v.fixed)
        else:
            resid = max(0.0, v.lb - val, val - v.ub)
        if resid > 0:
            max_violation = max(max_violation, resid)
            if resid > tol:
                violations.append((f"bound:{v.name}", resid))

    for c in model.constraints:
        lhs = sum(coef * values[name] for coef, name in c.terms)
        lhs += sum(coef * values[a] * values[b] for coef, a, b in c.products)
        if c.sense == "<=":
            resid = lhs - c.rhs
        elif c.sense == ">=":
            resid = c.rhs - lhs
        else:
            resid = abs(lhs - c.rhs)
        if resid > 0:
            max_violation = max(max_violation, resid)
            if resid > tol:
                violations.append((c.label, resid))

    return CheckReport(ok=max_violation <= tol,
                       max_violation=max_violation,
                       violations=violations,
                       n_constraints=len(model.constraints))


def tightest_f(model: ModelIR, record: SolutionRecord) -> float:
    """Smallest objective value keeping every objective-row satisfied.

    Evaluates each <= constraint with the objective forced to 0; rows
    carrying the objective with a negative coefficient then demand at
    least their scaled residual.
    """
    values = _resolved_values(model, record)
    values[model.objective] = 0.0
    worst = 0.0
    for c in model.constraints:
        coeff_f = sum(coef for coef, name in c.terms
                      if name == model.objective)
        if coeff_f >= 0 or c.sense != "<=":
            continue
        lhs = sum(coef * values[name] for coef, name in c.terms)
        lhs += sum(coef * values[a] * values[b] for coef, a, b in c.products)
        worst = max(worst, (lhs - c.rhs) / -coeff_f)
    return worst


# ------------------------------------------------------------- embeddings

def _general_position(points):
    for j in range(points.shape[1]):
        if len(np.unique(points[:, j])) != len(points):
            raise ExtractionError("embedding needs pairwise distinct "
                                  f"coordinates in axis {j}")


_ENGINES_2D = {
    "assignment2d": discrepancy.star_discrepancy,
    "extreme": discrepancy.extreme_discrepancy,
    "periodic": discrepancy.periodic_discrepancy,
    "corner4": discrepancy.corner4_discrepancy,
}


def embed_pointset(model: ModelIR, pset: PointSet, f=None,
                   source="embedding") -> SolutionRecord:
    """Build the full variable assignment representing a point set.

    The objective value defaults to the exact discrepancy of the set under
    the model's measure.  Points must be in general position.
    """
    family = model.meta["family"]
    n = model.meta["n"]
    if pset.n != n:
        raise ValueError(f"model expects {n} points, got {pset.n}")
    pts = pset.points
    _general_position(pts)
    assignment = {}

    if family in ("classical2d", "lattice1", "lattice2"):
        order = np.argsort(pts[:, 0])
        pts = pts[order]
        for i in range(1, n + 1):
            assignment[f"x_{2 * i - 1}"] = float(pts[i - 1, 0])
            assignment[f"x_{2 * i}"] = float(pts[i - 1, 1])
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assignment[f"y_{i}_{j}"] = float(pts[i - 1, 1] <= pts[j - 1, 1])
        if family == "lattice1":
            r = float(pts[1, 1]) if n >= 2 else 0.0
            assignment["r"] = r
            for i in range(1, n):
                assignment[f"k_{i}"] = round(pts[i - 1, 1] + r - pts[i, 1])
        elif family == "lattice2":
            r1 = float(pts[1, 0])
            r2 = float(pts[1, 1])
            assignment["r1"] = r1
            assignment["r2"] = r2
            for i in range(1, n):
                assignment[f"h_{i}"] = round(pts[i - 1, 0] + r1 - pts[i, 0])
                assignment[f"k_{i}"] = round(pts[i - 1, 1] + r2 - pts[i, 1])
        if f is None:
            f = discrepancy.star_discrepancy(pset).value
    elif family in _ENGINES_2D:
        xs = np.sort(pts[:, 0])
        ys = np.sort(pts[:, 1])
        for i in range(1, n + 1):
            assignment[f"x_{i}"] = float(xs[i - 1])
            assignment[f"y_{i}"] = float(ys[i - 1])
        rank_x = np.searchsorted(xs, pts[:, 0])
        rank_y = np.searchsorted(ys, pts[:, 1])
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assignment[f"a_{i}_{j}"] = 0.0
        for px, py in zip(rank_x, rank_y):
            assignment[f"a_{px + 1}_{py + 1}"] = 1.0
        if f is None:
            f = _ENGINES_2D[family](pset).value
    elif family == "assignment3d":
        axes = [np.sort(pts[:, j]) for j in range(3)]
        for axis, cname in enumerate(("x", "y", "z")):
            for i in range(1, n + 1):
                assignment[f"{cname}_{i}"] = float(axes[axis][i - 1])
        ranks = [np.searchsorted(axes[j], pts[:, j]) for j in range(3)]
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                for k in range(1, n + 1):
                    assignment[f"a_{i}_{j}_{k}"] = 0.0
        for rx, ry, rz in zip(*ranks):
            assignment[f"a_{rx + 1}_{ry + 1}_{rz + 1}"] = 1.0
        for i in range(1, n + 2):
            xi = assignment.get(f"x_{i}", 1.0)
            for j in range(1, n + 2):
                yj = assignment.get(f"y_{j}", 1.0)
                assignment[f"w_{i}_{j}"] = xi * yj
        if f is None:
            f = discrepancy.star_discrepancy(pset).value
    else:
        raise ValueError(f"cannot embed into family {family!r}")

    assignment["f"] = float(f)
    return SolutionRecord(assignment, source)


def extract_pointset(model: ModelIR, record: SolutionRecord):
    """Rebuild the point set of a feasible record and certify its value.

    The certified value is the exact discrepancy of the extracted set
    under the model's measure, recomputed by the matching engine; for the
    anchored-box families it never exceeds the record's objective.
    """
    family = model.meta["family"]
    n = model.meta["n"]
    values = _resolved_values(model, record)

    if family in ("classical2d", "lattice1", "lattice2"):
        pts = np.array([[values[f"x_{2 * i - 1}"], values[f"x_{2 * i}"]]
                        for i in range(1, n + 1)])
        engine = discrepancy.star_discrepancy
    elif family in _ENGINES_2D:
        pts = []
        for i in range(1, n + 1):
            row = [j for j in range(1, n + 1) if values[f"a_{i}_{j}"] >= 0.5]
            if len(row) != 1:
                raise ExtractionError(f"row {i} selects {len(row)} columns")
            pts.append([values[f"x_{i}"], values[f"y_{row[0]}"]])
        for j in range(1, n + 1):
            col = sum(values[f"a_{i}_{j}"] >= 0.5 for i in range(1, n + 1))
            if col != 1:
                raise ExtractionError(f"column {j} selected {col} times")
        pts = np.array(pts)
        engine = _ENGINES_2D[family]
    elif family == "assignment3d":
        pts = []
        for i in range(1, n + 1):
            sel = [(j, k) for j in range(1, n + 1) for k in range(1, n + 1)
                   if values[f"a_{i}_{j}_{k}"] >= 0.5]
            if len(sel) != 1:
                raise ExtractionError(f"slab {i} selects {len(sel)} cells")
            j, k = sel[0]
            pts.append([values[f"x_{i}"], values[f"y_{j}"], values[f"z_{k}"]])
        pts = np.array(pts)
        engine = discrepancy.star_discrepancy
    else:
        raise ValueError(f"cannot extract from family {family!r}")

    pset = PointSet(np.clip(pts, 0.0, 1.0))
    certified = engine(pset).value
    return pset, certified

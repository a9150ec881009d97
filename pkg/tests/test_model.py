import numpy as np
import pytest

from disclab.discrepancy import (
    corner4_discrepancy,
    extreme_discrepancy,
    periodic_discrepancy,
    star_discrepancy,
)
from disclab.model import (
    ExtractionError,
    IncompleteSolutionError,
    ModelIR,
    SolutionRecord,
    Variable,
    build_assignment_2d,
    build_assignment_3d,
    build_classical_2d,
    build_corner4_model,
    build_extreme_model,
    build_lattice_model,
    build_periodic_model,
    check_solution,
    embed_pointset,
    extract_pointset,
    parse_lp,
    serialize_lp,
    solution_from_json,
    solution_from_text,
    tightest_f,
    _con,
)
from disclab.pointset import PointSet, lattice1, lattice2, random_set

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0

# Optimal two-point configuration for the free-corner measure, value
# (sqrt(5)-1)/2; verified against a global numeric search.
EXTREME2_OPT = PointSet(np.array([[0.0, 1.0], [GOLDEN, 1.0 - GOLDEN]]))


def count_labels(model, prefix):
    return sum(c.label.startswith(prefix) for c in model.constraints)


# -------------------------------------------------------------- classical

def test_classical_census_n2():
    m = build_classical_2d(2, extras=())
    assert count_labels(m, "closed_") == 3
    assert count_labels(m, "open_") == 6
    free_x = [v for v in m.variables
              if v.name.startswith("x_") and v.fixed is None]
    free_y = [v for v in m.variables
              if v.name.startswith("y_") and v.fixed is None]
    assert len(free_x) == 4
    assert len(free_y) == 4
    assert m.variable("f").fixed is None


def test_classical_census_formulas():
    for n in range(1, 7):
        m = build_classical_2d(n, extras=())
        assert count_labels(m, "closed_") == n * (n + 1) // 2
        assert count_labels(m, "open_") == (n + 1) * (n + 2) // 2


def test_classical_lb_extra():
    m = build_classical_2d(5, extras=("lb",))
    rows = [c for c in m.constraints if c.label == "f_lower_bound"]
    assert len(rows) == 1
    assert rows[0].sense == ">=" and rows[0].rhs == pytest.approx(0.2)
    # not valid (and not added) below n = 4
    assert count_labels(build_classical_2d(3, extras=("lb",)),
                        "f_lower_bound") == 0


def test_classical_shift_extra_refixes_dummies():
    m = build_classical_2d(4, extras=("shift",))
    assert m.variable("y_1_0").fixed == 0.0
    assert m.variable("y_5_0").fixed == 0.0
    assert count_labels(m, "anchor_x1") == 1
    assert count_labels(m, "pairgap_") == 3  # i < j <= n-1
    plain = build_classical_2d(4, extras=())
    assert plain.variable("y_1_0").fixed == 1.0


def test_classical_embedding_consistency():
    for seed in range(6):
        n = 4 + seed
        p = random_set(n, 2, seed=seed)
        m = build_classical_2d(n, extras=())
        f = star_discrepancy(p).value
        good = embed_pointset(m, p, f=f + 1e-9)
        assert check_solution(m, good, tol=1e-9).ok
        bad = embed_pointset(m, p, f=f - 1e-6)
        report = check_solution(m, bad, tol=1e-9)
        assert not report.ok
        assert any(lbl.startswith(("closed_", "open_"))
                   for lbl, _ in report.violations)


def test_classical_embedding_with_all_extras():
    p = random_set(6, 2, seed=3)
    f = star_discrepancy(p).value
    m = build_classical_2d(6, extras=("lb", "tri", "ysum"))
    rec = embed_pointset(m, p, f=f + 1e-9)
    assert check_solution(m, rec, tol=1e-9).ok


def test_ysum_constant_on_feasible_assignments():
    m = build_classical_2d(5, extras=("ysum",))
    p = random_set(5, 2, seed=9)
    rec = embed_pointset(m, p)
    y_total = sum(v for k, v in rec.assignment.items()
                  if k.startswith("y_") and k.count("_") == 2
                  and "_0" not in k and not k.startswith("y_0")
                  and not k.startswith("y_6"))
    assert y_total == 5 * 6 / 2
    assert check_solution(m, rec, tol=1e-6).ok


# ------------------------------------------------------------- assignment

def test_assignment_census():
    m = build_assignment_2d(2, extras=())
    assert count_labels(m, "closed_") == 4
    assert count_labels(m, "open_") == 9
    m3 = build_assignment_2d(3, extras=())
    assert count_labels(m3, "row_") == 3
    assert count_labels(m3, "col_") == 3


def test_assignment_anchor_extra():
    m = build_assignment_2d(4, extras=("anchor",))
    labels = {c.label for c in m.constraints}
    assert "anchor_x1" in labels and "anchor_y1" in labels
    x1 = next(c for c in m.constraints if c.label == "anchor_x1")
    assert x1.sense == "=" and dict((n, c) for c, n in x1.terms) == {
        "x_1": 1.0, "f": -1.0}


def test_assignment_embedding_consistency():
    for seed in range(6):
        n = 4 + seed
        p = random_set(n, 2, seed=100 + seed)
        m = build_assignment_2d(n, extras=())
        f = star_discrepancy(p).value
        assert check_solution(m, embed_pointset(m, p, f=f + 1e-9),
                              tol=1e-9).ok
        assert not check_solution(m, embed_pointset(m, p, f=f - 1e-6),
                                  tol=1e-9).ok


def test_assignment_critical_filter():
    m = build_assignment_2d(5, extras=(), critical=True)
    p = random_set(5, 2, seed=4)
    f = star_discrepancy(p).value
    assert check_solution(m, embed_pointset(m, p, f=f + 1e-9), tol=1e-9).ok
    # the binding box is critical, so undercutting f still fails
    assert not check_solution(m, embed_pointset(m, p, f=f - 1e-4),
                              tol=1e-9).ok


def test_assignment_gap_and_bounds_extras_census():
    n = 4
    m = build_assignment_2d(n, extras=("gap", "box_bounds"))
    assert count_labels(m, "xgap_nest_") == n * (n - 1) // 2 * n
    assert count_labels(m, "xbound_hi_") == n - 1


# ------------------------------------------------------------------- 3d

def test_assignment3d_census():
    m = build_assignment_3d(1)
    assert count_labels(m, "closed_") == 1
    assert count_labels(m, "open_") == 8
    m2 = build_assignment_3d(2)
    assert sum(v.name.startswith("w_") for v in m2.variables) == 9
    m3 = build_assignment_3d(3, extras=("lb",))
    lb = next(c for c in m3.constraints if c.label == "f_lower_bound")
    assert lb.rhs == pytest.approx(1 / 3)


def test_assignment3d_embedding_consistency():
    p = random_set(3, 3, seed=11)
    m = build_assignment_3d(3)
    f = star_discrepancy(p).value
    assert check_solution(m, embed_pointset(m, p, f=f + 1e-9), tol=1e-9).ok
    assert not check_solution(m, embed_pointset(m, p, f=f - 1e-6),
                              tol=1e-9).ok


def test_assignment3d_quadratic_reformulation_matches_cubic():
    # with w_i_j = x_i * y_j the rendered bilinear residual equals the
    # direct triple-product evaluation
    p = random_set(2, 3, seed=5)
    m = build_assignment_3d(2)
    rec = embed_pointset(m, p)
    vals = dict(rec.assignment)
    for i in (1, 2, 3):
        xi = vals.get(f"x_{i}", 1.0)
        for j in (1, 2, 3):
            yj = vals.get(f"y_{j}", 1.0)
            assert vals[f"w_{i}_{j}"] == pytest.approx(xi * yj, abs=1e-15)


# -------------------------------------------------------------- lattices

def test_lattice_single_structure():
    m = build_lattice_model(3)
    names = {v.name for v in m.variables}
    assert {"k_1", "k_2", "r"} <= names
    assert "k_3" not in names
    assert m.variable("x_1").fixed == 0.0
    assert m.variable("x_3").fixed == pytest.approx(1 / 3)
    assert m.variable("x_2").fixed == 0.0


def test_lattice_single_reference_solution():
    # parameter refined within the printing radius of the published 0.653
    r = 0.65306120
    p = lattice1(20, r)
    f = star_discrepancy(p).value
    assert f == pytest.approx(0.094898, abs=1e-4)
    m = build_lattice_model(20)
    rec = embed_pointset(m, p, f=f + 1e-6)
    assert rec.assignment["r"] == pytest.approx(r, abs=1e-12)
    assert check_solution(m, rec, tol=1e-6).ok
    assert not check_solution(m, embed_pointset(m, p, f=f - 1e-4),
                              tol=1e-6).ok


def test_lattice_double_reference_solution():
    p = lattice2(20, 0.052, 0.737)
    f = star_discrepancy(p).value
    assert f == pytest.approx(0.083795, abs=1.5e-2)
    m = build_lattice_model(20, double=True)
    rec = embed_pointset(m, p, f=f + 1e-6)
    assert rec.assignment["r1"] == pytest.approx(0.052)
    assert rec.assignment["r2"] == pytest.approx(0.737)
    assert check_solution(m, rec, tol=1e-6).ok


def test_lattice_extract_roundtrip():
    p = lattice1(20, 0.653)
    m = build_lattice_model(20)
    rec = embed_pointset(m, p)
    out, certified = extract_pointset(m, rec)
    assert np.allclose(np.sort(out.points, axis=0),
                       np.sort(p.points, axis=0), atol=1e-12, rtol=0)
    assert certified == pytest.approx(star_discrepancy(p).value, abs=1e-12)
    assert certified <= rec.assignment["f"] + 1e-12


# ------------------------------------------------------ extreme / periodic

def test_extreme_census():
    for n in (1, 2, 3):
        m = build_extreme_model(n)
        pairs_closed = (n + 1) * n // 2
        pairs_open = (n + 2) * (n + 1) // 2
        assert count_labels(m, "eclosed_") == pairs_closed ** 2
        assert count_labels(m, "eopen_") == pairs_open ** 2


def test_extreme_contains_star_slice():
    n = 3
    m = build_extreme_model(n)
    labels = {c.label for c in m.constraints}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            assert f"eclosed_0_{i}_0_{j}" in labels
    for i in range(1, n + 2):
        for j in range(1, n + 2):
            assert f"eopen_0_{i}_0_{j}" in labels


def test_extreme_reference_solution():
    f = extreme_discrepancy(EXTREME2_OPT).value
    assert f == pytest.approx(GOLDEN, abs=1e-9)
    m = build_extreme_model(2)
    rec = embed_pointset(m, EXTREME2_OPT, f=f + 1e-6)
    assert check_solution(m, rec, tol=1e-9).ok


def test_extreme_model_monotone_over_star():
    p = random_set(5, 2, seed=21)
    star_m = build_assignment_2d(5, extras=())
    ext_m = build_extreme_model(5)
    star_rec = embed_pointset(star_m, p, f=0.0)
    ext_rec = embed_pointset(ext_m, p, f=0.0)
    assert tightest_f(ext_m, ext_rec) >= tightest_f(star_m, star_rec) - 1e-12


def test_periodic_single_point_needs_full_value():
    m = build_periodic_model(1)
    p = PointSet(np.array([[0.4, 0.7]]))
    assert check_solution(m, embed_pointset(m, p, f=1.0), tol=1e-9).ok
    assert not check_solution(m, embed_pointset(m, p, f=0.9), tol=1e-9).ok
    assert tightest_f(m, embed_pointset(m, p, f=0.0)) == pytest.approx(1.0)


def test_periodic_census_extends_extreme():
    n = 2
    ext = build_extreme_model(n)
    per = build_periodic_model(n)
    assert {c.label for c in ext.constraints} <= {c.label
                                                  for c in per.constraints}
    wrap = [c for c in per.constraints if c.label.startswith(
        ("pxw_", "pyw_", "pdw_"))]
    assert len(wrap) == len(per.constraints) - len(ext.constraints)
    assert count_labels(per, "pdw_closed_") == (n * (n - 1) // 2) ** 2
    assert count_labels(per, "pdw_open_") == ((n + 1) * n // 2) ** 2


def test_periodic_feasible_record_is_extreme_feasible():
    p = random_set(4, 2, seed=8)
    per = build_periodic_model(4)
    ext = build_extreme_model(4)
    f = periodic_discrepancy(p).value
    rec = embed_pointset(per, p, f=f + 1e-9)
    assert check_solution(per, rec, tol=1e-9).ok
    ext_rec = embed_pointset(ext, p, f=f + 1e-9)
    assert check_solution(ext, ext_rec, tol=1e-9).ok
    assert tightest_f(per, rec) >= tightest_f(ext, ext_rec) - 1e-12


def test_corner4_center_point():
    m = build_corner4_model(1)
    center = PointSet(np.array([[0.5, 0.5]]))
    assert check_solution(m, embed_pointset(m, center, f=0.75 + 1e-9),
                          tol=1e-9).ok
    assert not check_solution(m, embed_pointset(m, center, f=0.74),
                              tol=1e-9).ok
    assert tightest_f(m, embed_pointset(m, center, f=0.0)) == pytest.approx(
        0.75)


def test_corner4_monotone_over_star():
    p = random_set(6, 2, seed=13)
    m = build_corner4_model(6)
    rec = embed_pointset(m, p, f=0.0)
    assert tightest_f(m, rec) >= star_discrepancy(p).value - 1e-12
    assert tightest_f(m, rec) == pytest.approx(
        corner4_discrepancy(p).value, abs=1e-12)


def test_assignment_model_tightest_f_equals_star():
    for seed in range(4):
        p = random_set(5, 2, seed=40 + seed)
        m = build_assignment_2d(5, extras=())
        rec = embed_pointset(m, p, f=0.0)
        assert tightest_f(m, rec) == pytest.approx(
            star_discrepancy(p).value, abs=1e-12)


# ------------------------------------------------------------- LP format

def test_serialize_minimal():
    m = ModelIR("tiny", [Variable("f", "continuous", 0.0, 1.0)],
                [_con("c0", [(1.0, "f")], ">=", 0.25)], "f",
                {"family": "tiny"})
    text = serialize_lp(m)
    lines = text.splitlines()
    assert lines[:4] == ["Minimize", " obj: f", "Subject To",
                         " c0: f >= 0.25"]
    assert "f >= 0.25" in text


def test_serialize_deterministic():
    a = serialize_lp(build_assignment_2d(3))
    b = serialize_lp(build_assignment_2d(3))
    assert a == b


def test_serialize_parse_roundtrip():
    m = build_assignment_2d(2, extras=())
    text = serialize_lp(m)
    parsed = parse_lp(text)
    assert len(parsed.constraints) == len(m.constraints)
    assert len(parsed.bilinear_constraints) == len(m.bilinear_constraints)
    assert len(parsed.variables) == len(m.variables)
    assert serialize_lp(parsed) == text


def test_roundtrip_all_families():
    models = [
        build_classical_2d(3, extras=("lb", "ysum")),
        build_classical_2d(4, extras=("shift",)),
        build_assignment_2d(3, extras=("anchor", "box_bounds")),
        build_assignment_3d(2, extras=("anchor",)),
        build_lattice_model(3),
        build_lattice_model(3, double=True),
        build_extreme_model(2),
        build_periodic_model(2),
        build_corner4_model(2),
    ]
    for m in models:
        text = serialize_lp(m)
        parsed = parse_lp(text)
        assert serialize_lp(parsed) == text, m.name


# ------------------------------------------------------------- solutions

def test_solution_parsers():
    s1 = solution_from_json('{"f": 0.25, "x_1": 0.5}')
    assert s1.assignment == {"f": 0.25, "x_1": 0.5}
    s2 = solution_from_text("f 0.25\nx_1 0.5\n# comment\n")
    assert s2.assignment == {"f": 0.25, "x_1": 0.5}
    with pytest.raises(ValueError):
        solution_from_text("f\n")


def test_check_missing_variable():
    m = build_assignment_2d(2, extras=())
    with pytest.raises(IncompleteSolutionError):
        check_solution(m, SolutionRecord({"f": 0.5}))


def test_check_flipped_binary_reports_unit_violation():
    p = random_set(3, 2, seed=2)
    m = build_assignment_2d(3, extras=())
    rec = embed_pointset(m, p)
    broken = dict(rec.assignment)
    flipped = next(k for k, v in broken.items()
                   if k.startswith("a_") and v == 1.0)
    broken[flipped] = 0.0
    report = check_solution(m, SolutionRecord(broken), tol=1e-6)
    assert not report.ok
    assert any(v == pytest.approx(1.0) for lbl, v in report.violations
               if lbl.startswith(("row_", "col_")))


def test_extract_assignment_identity():
    xs = np.array([0.2, 0.5, 0.8])
    m = build_assignment_2d(3, extras=())
    assignment = {"f": 1.0}
    for i in (1, 2, 3):
        assignment[f"x_{i}"] = xs[i - 1]
        assignment[f"y_{i}"] = xs[i - 1]
        for j in (1, 2, 3):
            assignment[f"a_{i}_{j}"] = float(i == j)
    pset, certified = extract_pointset(m, SolutionRecord(assignment))
    assert np.allclose(pset.points, np.column_stack([xs, xs]))
    assert certified <= 1.0


def test_extract_rejects_bad_assignment():
    m = build_assignment_2d(2, extras=())
    assignment = {"f": 1.0, "x_1": 0.3, "x_2": 0.7, "y_1": 0.3, "y_2": 0.7,
                  "a_1_1": 1.0, "a_1_2": 1.0, "a_2_1": 0.0, "a_2_2": 0.0}
    with pytest.raises(ExtractionError):
        extract_pointset(m, SolutionRecord(assignment))


def test_extract_certified_never_exceeds_model_f():
    for seed in range(4):
        p = random_set(6, 2, seed=60 + seed)
        m = build_assignment_2d(6, extras=())
        rec = embed_pointset(m, p)  # f = exact star value
        out, certified = extract_pointset(m, rec)
        assert certified <= rec.assignment["f"] + 1e-12

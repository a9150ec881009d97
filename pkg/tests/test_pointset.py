import numpy as np
import pytest

from disclab.pointset import (
    DomainError,
    GOLDEN_RATIO,
    ParseError,
    PointSet,
    fibonacci_set,
    grid_of,
    lattice1,
    lattice2,
    random_set,
    read_points,
    reflect,
    reflections,
    sobol2d,
    write_points,
)

PHI_FRAC = GOLDEN_RATIO - 1.0


def test_pointset_validation():
    with pytest.raises(DomainError):
        PointSet(np.array([[1.5, 0.2]]))
    with pytest.raises(ValueError):
        PointSet(np.empty((0, 2)))
    p = PointSet(np.array([[0.25, 0.75]]))
    assert p.n == 1 and p.dim == 2
    with pytest.raises(ValueError):
        p.points[0, 0] = 0.9  # frozen array


def test_fibonacci_small():
    assert list(fibonacci_set(1)) == [(0.0, 0.0)]
    p2 = fibonacci_set(2)
    assert p2.points[0].tolist() == [0.0, 0.0]
    assert p2.points[1, 0] == 0.5
    assert p2.points[1, 1] == pytest.approx(PHI_FRAC, abs=1e-15)
    p3 = fibonacci_set(3)
    assert p3.points[2, 0] == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert p3.points[2, 1] == pytest.approx(2.0 * GOLDEN_RATIO - 3.0, abs=1e-15)
    with pytest.raises(ValueError):
        fibonacci_set(0)


def test_fibonacci_no_drift():
    # direct per-index product, not incremental accumulation
    p = fibonacci_set(5000)
    i = 4999
    assert p.points[i, 1] == (i * GOLDEN_RATIO) % 1.0


def test_lattice1():
    assert np.all(lattice1(4, 0.0).points[:, 1] == 0.0)
    assert lattice1(4, 0.25).points[:, 1].tolist() == [0.0, 0.25, 0.5, 0.75]
    p = lattice1(20, 0.653)
    assert p.points[1].tolist() == [0.05, 0.653]
    with pytest.raises(ValueError):
        lattice1(4, 1.0)
    with pytest.raises(ValueError):
        lattice1(0, 0.5)


def test_lattice1_matches_fibonacci():
    fib = fibonacci_set(50)
    lat = lattice1(50, PHI_FRAC)
    assert np.allclose(fib.points, lat.points, atol=1e-12, rtol=0)


def test_lattice2():
    assert np.all(lattice2(3, 0.0, 0.0).points == 0.0)
    p = lattice2(20, 0.052, 0.737)
    assert p.points[1].tolist() == [0.052, 0.737]
    assert lattice2(2, 0.5, 0.5).points.tolist() == [[0.0, 0.0], [0.5, 0.5]]
    with pytest.raises(ValueError):
        lattice2(3, -0.1, 0.5)


def test_sobol2d():
    assert sobol2d(1).points.tolist() == [[0.0, 0.0]]
    assert sobol2d(2).points[1].tolist() == [0.5, 0.5]
    pts = {tuple(p) for p in sobol2d(4).points}
    assert (0.75, 0.25) in pts and (0.25, 0.75) in pts
    # one-dimensional projections of 2^k prefixes are equidistant
    p8 = sobol2d(8).points
    for j in (0, 1):
        assert sorted(p8[:, j]) == [k / 8 for k in range(8)]


def test_random_set():
    a = random_set(5, 2, seed=7)
    b = random_set(5, 2, seed=7)
    assert np.array_equal(a.points, b.points)
    assert random_set(1, 3, seed=0).points.shape == (1, 3)
    x = np.sort(random_set(100, 2, seed=1).points[:, 0])
    assert np.all(np.diff(x) > 0)


def test_grid_of():
    g = grid_of(PointSet(np.array([[0.5, 0.5]])))
    assert g.gamma[0].tolist() == [0.5]
    assert g.gamma_bar[0].tolist() == [0.5, 1.0]

    g2 = grid_of(fibonacci_set(2))
    assert g2.gamma[0].tolist() == [0.0, 0.5]
    assert g2.gamma_bar[0].tolist() == [0.0, 0.5, 1.0]

    dup = PointSet(np.array([[0.3, 0.2], [0.3, 0.8]]))
    assert grid_of(dup).gamma[0].tolist() == [0.3]


def test_grid_membership():
    p = random_set(17, 2, seed=3)
    g = grid_of(p)
    for j in range(2):
        assert len(g.gamma_bar[j]) <= p.n + 1
        assert set(p.points[:, j]) <= set(g.gamma[j])


def test_reflections():
    center = PointSet(np.array([[0.5, 0.5]]))
    for r in reflections(center):
        assert r.points.tolist() == [[0.5, 0.5]]

    p = PointSet(np.array([[0.2, 0.7]]))
    p2, p3, p4 = reflections(p)
    assert p2.points.tolist() == [[0.8, 0.7]]
    assert p3.points == pytest.approx(np.array([[0.8, 0.3]]), abs=1e-15)
    assert p4.points == pytest.approx(np.array([[0.2, 0.3]]), abs=1e-15)

    with pytest.raises(ValueError):
        reflections(random_set(3, 3, seed=0))


def test_reflections_involution():
    p = random_set(20, 2, seed=11)
    for cid in (2, 3, 4):
        twice = reflect(reflect(p, cid), cid)
        assert np.max(np.abs(twice.points - p.points)) <= 1e-16


def test_csv_roundtrip(tmp_path):
    p = fibonacci_set(3)
    path = tmp_path / "fib3.csv"
    write_points(p, path)
    q = read_points(path)
    assert np.array_equal(p.points, q.points)


def test_csv_roundtrip_precision(tmp_path):
    p = random_set(40, 3, seed=5)
    path = tmp_path / "r.csv"
    write_points(p, path)
    q = read_points(path)
    assert np.array_equal(p.points, q.points)
    assert q.dim == 3


def test_csv_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.5,0.2\n")
    with pytest.raises(DomainError, match="line 1"):
        read_points(bad)

    ragged = tmp_path / "ragged.csv"
    ragged.write_text("0.1,0.2\n0.3,0.4,0.5\n")
    with pytest.raises(ParseError, match="line 2"):
        read_points(ragged)

    comments = tmp_path / "ok.csv"
    comments.write_text("# a comment\nx,y\n0.5,0.5\n")
    assert read_points(comments).points.tolist() == [[0.5, 0.5]]

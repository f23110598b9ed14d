import math

import pytest

import tetra

I = tetra.IDENTITY


def test_single_bubble_energy():
    assert tetra.e0([4 * math.pi, 0, 0], I) == pytest.approx(8 * math.pi, rel=1e-14)
    g = tetra.e0_gradient([math.pi, 0, 0], I)
    assert g[0] == pytest.approx(1.5, rel=1e-14)
    assert g[1] is None and g[2] is None


def test_geometry():
    geo = tetra.solve([1.0, 0.7, 0.3])
    assert geo["kind"] == "triple"
    assert geo["perimeter"] == pytest.approx(tetra.perimeter([1.0, 0.7, 0.3]))
    assert all(geo["present"])
    sym = tetra.solve([1.0, 1.0, 1.0])
    assert max(abs(k) for k in sym["curvatures"][3:]) < 1e-10
    assert tetra.e0([1, 1, 1]) == tetra.perimeter([1, 1, 1])


def test_minimize_forty():
    r = tetra.minimize([40, 0, 0], I, seed=1)
    assert r["signature"].startswith("T0")
    assert len(r["bubbles"]) == 5
    for b in r["bubbles"]:
        assert b[0] == pytest.approx(8.0, rel=1e-9)
    f5 = 2 * math.sqrt(200 * math.pi) + 1600 / (20 * math.pi)
    assert r["energy"] == pytest.approx(f5, rel=1e-12)
    assert max(r["kkt_spread"]) < 1e-6


def test_oracle_matches_minimize():
    r = tetra.minimize([1, 1, 1], None, count_cap=2, seed=2)
    o = tetra.oracle([1, 1, 1], 0.25, None, max_bubbles=2)
    assert o["energy"] == pytest.approx(r["energy"], rel=1e-10)
    assert tetra.signature(r["bubbles"]) == "T1 D12:0 D13:0 D23:0 S1:0 S2:0 S3:0"


def test_bounds_and_coexistence():
    assert tetra.mass_upper_bound(I)[0] == pytest.approx(8 * math.pi)
    assert math.isinf(tetra.mass_upper_bound(None)[0])
    p = tetra.coexistence_params(1, 1, 1)
    checks = {c["name"]: c["holds"] for c in p["checks"]}
    assert checks["M1/m1+ > N1"]
    with pytest.raises(tetra.DomainError):
        tetra.coexistence_params(0, 1, 1)


def test_greens_function():
    x, y = 0.23, -0.11
    assert tetra.greens(x, y) == tetra.greens(-x, -y)
    assert tetra.regular_part(0.0, 0.0) == pytest.approx(tetra.kronecker_regular_at_zero(), abs=1e-14)
    with pytest.raises(tetra.SingularityError):
        tetra.greens(0.0, 0.0)


def test_placement_and_eta():
    bubbles = [[1, 0, 0], [1, 0, 0]]
    pl = tetra.optimize_placement(bubbles, 3, I)
    assert pl["min_distance"] >= 1 / 6
    assert pl["energy"] <= pl["initial_energy"]
    e = tetra.E_eta([[1.3, 0, 0]], [[0.0, 0.0]], 1e-2)
    assert e["total"] == pytest.approx(tetra.perimeter([1.3, 0, 0]), rel=1e-14)


def test_input_errors():
    with pytest.raises(ValueError):
        tetra.e0([-1, 0, 0])
    with pytest.raises(ValueError):
        tetra.e0([1, 1, 1], [[1, 2, 0], [0, 1, 0], [0, 0, 1]])

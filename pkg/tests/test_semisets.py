import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lojasiewicz.polynomials import PolyMap, variables
from lojasiewicz.semisets import (BasicSet, DistanceConfig, InfeasibleError, SemialgebraicSet, approx_distance,
                                  brocker_cap, complexity, graph_presentation, membership, sample_near)

x, y = variables(2)
(t,) = variables(1)


def test_complexity_examples():
    c = complexity(SemialgebraicSet.basic(2, ineqs=[x], eqs=[y]))
    assert (c.r, c.kappa) == (1, 1)
    c = complexity(SemialgebraicSet.basic(2, eqs=[x**3 - y]))
    assert (c.r, c.kappa) == (0, 3)
    S = SemialgebraicSet(2, (BasicSet(2, ineqs=(x**2, y**2)), BasicSet(2, ineqs=(x**4 + y,))))
    c = complexity(S)
    assert (c.r, c.kappa) == (2, 4)
    assert c.dim == 2
    assert complexity(S, dim_hint=1).dim == 1
    with pytest.raises(ValueError):
        complexity(S, dim_hint=3)


def test_brocker_cap():
    assert [brocker_cap(n) for n in (1, 2, 4)] == [1, 3, 10]


def test_membership_examples():
    S = SemialgebraicSet.basic(2, ineqs=[x], eqs=[y])
    assert membership(S, [0, 0], 0)
    assert not membership(S, [-1, 0], 1e-9)
    assert membership(SemialgebraicSet.basic(2, eqs=[y - x**2]), [2, 4], 1e-9)
    with pytest.raises(ValueError):
        membership(S, [0, 0, 0])


def test_graph_presentation_examples():
    G = graph_presentation(PolyMap([t**2]), SemialgebraicSet.whole_space(1))
    c = complexity(G)
    assert (G.num_vars, c.r, c.kappa) == (2, 0, 2)
    G = graph_presentation(PolyMap([x, y]), SemialgebraicSet.basic(2, ineqs=[x]))
    c = complexity(G)
    assert (G.num_vars, c.r, c.kappa) == (4, 1, 1)
    assert membership(G, [1, 2, 1, 2])
    G = graph_presentation(PolyMap([t**3]), SemialgebraicSet.basic(1, ineqs=[t]))
    c = complexity(G)
    assert (c.r, c.kappa) == (1, 3)


def test_distance_to_line():
    d = approx_distance(SemialgebraicSet.basic(2, eqs=[y]), [0, 1])
    assert d.value == pytest.approx(1, abs=1e-6)


def test_distance_to_cubic_matches_sweep(oracle):
    d = approx_distance(SemialgebraicSet.basic(2, eqs=[y - x**3]), [0.1, 0])
    assert d.value == pytest.approx(oracle["cubic_distance"], rel=0.05)
    assert d.value == pytest.approx(1.0e-3, rel=0.05)


def test_distance_to_half_line():
    assert approx_distance(SemialgebraicSet.basic(1, ineqs=[t]), [-2.0]).value == pytest.approx(2, abs=1e-9)


def test_member_has_distance_zero():
    S = SemialgebraicSet.basic(2, eqs=[y - x**2])
    assert approx_distance(S, [0.5, 0.25]).value == 0


def test_infeasible_set_raises():
    S = SemialgebraicSet.basic(1, eqs=[t**2 + 1])
    with pytest.raises(InfeasibleError) as info:
        approx_distance(S, [0.0], DistanceConfig(starts=4, samples=8))
    assert info.value.best_violation > 0


def test_reported_minimizer_is_feasible():
    S = SemialgebraicSet.basic(2, ineqs=[1 - x**2 - y**2], eqs=[y - x**2])
    cfg = DistanceConfig()
    res = approx_distance(S, [2.0, -1.0], cfg)
    assert membership(S, res.point, cfg.restore_tol)
    assert res.value == pytest.approx(np.linalg.norm(res.point - [2.0, -1.0]), abs=1e-15)


def test_sample_near_examples():
    free = sample_near(SemialgebraicSet.whole_space(2), [0, 0], 1.0, 20, seed=1)
    assert len(free.points) == 20 and np.all(np.linalg.norm(free.points, axis=1) <= 1)
    line = sample_near(SemialgebraicSet.basic(2, eqs=[y]), [0, 0], 1.0, 20, seed=1)
    assert np.all(np.abs(line.points[:, 1]) <= 1e-9) and np.all(np.abs(line.points[:, 0]) <= 1)
    par = sample_near(SemialgebraicSet.basic(2, eqs=[y - x**2]), [0, 0], 0.5, 20, seed=1)
    assert len(par.points) == 20
    assert np.all(np.abs(par.points[:, 1] - par.points[:, 0] ** 2) <= 1e-8)
    assert np.all(np.linalg.norm(par.points, axis=1) <= 0.5)


def test_sample_near_partial_never_fabricates():
    S = SemialgebraicSet.basic(1, eqs=[t**2 + 1])
    res = sample_near(S, [0.0], 1.0, 5, seed=0, max_attempts=10)
    assert len(res.points) == 0 and res.partial


def test_sample_near_deterministic():
    S = SemialgebraicSet.basic(2, eqs=[y - x**3])
    a = sample_near(S, [0, 0], 1.0, 10, seed=3).points
    b = sample_near(S, [0, 0], 1.0, 10, seed=3).points
    assert np.array_equal(a, b)


def test_set_json_round_trip():
    S = SemialgebraicSet(2, (BasicSet(2, ineqs=(x,), eqs=(y - x**2,)), BasicSet(2, ineqs=(1 - x * y,))))
    assert SemialgebraicSet.from_json(S.to_json()) == S


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=25, deadline=None)
def test_distance_triangle_property(a, b, c, d):
    S = SemialgebraicSet.basic(2, eqs=[y - x**2])
    cfg = DistanceConfig(starts=8, samples=16)
    p, q = np.array([a, b]), np.array([c, d])
    dp, dq = approx_distance(S, p, cfg).value, approx_distance(S, q, cfg).value
    assert abs(dp - dq) <= np.linalg.norm(p - q) + 2e-6

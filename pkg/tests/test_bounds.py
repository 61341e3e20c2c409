from fractions import Fraction
import itertools

import pytest

from lojasiewicz.bounds import (BoundInputError, BoundReport, Direction, FormulaId, b_product,
                                global_separation_bound, infinity_polynomial_map_bound, infinity_regular_bound,
                                infinity_semialgebraic_map_bound, isolated_separation_bound, ks_bounds,
                                local_map_bound, local_separation_bound, reference_complex_bounds,
                                regular_local_bound, separation_bound)


@pytest.mark.parametrize("args, value", [((2, 0, 2), 18), ((1, 0, 1), 1), ((3, 2, 3), 151875)])
def test_local_separation(args, value):
    assert local_separation_bound(*args) == value


def test_local_separation_rejects_zero_degree():
    with pytest.raises(BoundInputError):
        local_separation_bound(2, 0, 0)


@pytest.mark.parametrize("args, value", [((1, 0, 1), 1), ((2, 0, 2), 5), ((2, 2, 2), 41)])
def test_isolated_separation(args, value):
    assert isolated_separation_bound(*args) == value


def test_separation_report():
    rep = separation_bound(2, 0, 2, isolated=True)
    assert rep.formula_id is FormulaId.LOCAL_SEP_ISOLATED and rep.value == 5 and rep.direction is Direction.UPPER


def test_local_map_examples():
    assert local_map_bound(1, 0, 0, 0, 2).value == 2
    # ((2d-1)^(N+r) + 1) / 2 with N + r = 1 is (3 + 1) / 2
    assert local_map_bound(1, 0, 0, 0, 2, isolated=True).value == 2
    rep = local_map_bound(1, 1, 1, 1, 3)
    assert rep.value == 675 and rep.inputs["r"] == 2 and rep.inputs["d"] == 3
    with pytest.raises(BoundInputError):
        local_map_bound(1, 0, 0, 0, 0)


@pytest.mark.parametrize("args, value", [((2, 2, "REAL"), 18), ((3, 2, "COMPLEX"), 8), ((1, 5, "COMPLEX"), 5)])
def test_regular_local(args, value):
    assert regular_local_bound(*args).value == value


def test_regular_local_rejects_zero_degree():
    with pytest.raises(BoundInputError):
        regular_local_bound(2, 0)


@pytest.mark.parametrize("args, p, dd", [((2, 0, 2), 18, 2), ((1, 2, 2), 162, 2), ((2, 0, 1), 3, 1)])
def test_global_separation(args, p, dd):
    rep = global_separation_bound(*args)
    assert rep.value == p and rep.denominator_degree == dd


@pytest.mark.parametrize("args, value", [((1, 0, 2), -2), ((2, 0, 2), -18), ((2, 2, 3), -20250)])
def test_infinity_semialgebraic(args, value):
    rep = infinity_semialgebraic_map_bound(*args)
    assert rep.value == value and rep.direction is Direction.LOWER


def test_infinity_semialgebraic_needs_d_at_least_two():
    with pytest.raises(BoundInputError, match="d must be >= 2"):
        infinity_semialgebraic_map_bound(1, 0, 1)


@pytest.mark.parametrize("args, value", [((1, 0, 2, 2), -2), ((2, 0, 3, 2), -45), ((2, 2, 2, 2), -1458)])
def test_infinity_polynomial(args, value):
    rep = infinity_polynomial_map_bound(*args)
    assert rep.value == value and rep.denominator_degree == args[3]


def test_infinity_polynomial_preconditions():
    with pytest.raises(BoundInputError):
        infinity_polynomial_map_bound(1, 0, 2, 1)
    with pytest.raises(BoundInputError):
        infinity_polynomial_map_bound(1, 0, 2, 3)


def test_infinity_polynomial_is_exact_rational():
    assert infinity_polynomial_map_bound(1, 0, 3, 3).value == Fraction(-9, 2)


@pytest.mark.parametrize("args, value", [((2, 2), -18), ((1, 1), -1), ((3, 2), -162)])
def test_infinity_regular(args, value):
    assert infinity_regular_bound(*args).value == value


def test_b_product():
    assert b_product([3, 2], 2) == 6
    assert b_product([3, 2, 2], 2) == 6
    assert b_product([7], 1) == 7
    with pytest.raises(BoundInputError):
        b_product([2, 3], 2)


def test_reference_bounds():
    rep = reference_complex_bounds("KOLLAR", [2, 2], N=2)
    assert rep.value == -2 and rep.reference_only
    assert reference_complex_bounds("JELONEK", [2, 2], k=1, D=3, mult_sum=0).value == -4
    assert reference_complex_bounds("CHADZYNSKI", [2, 2], mult_sum=4).value == 2
    assert reference_complex_bounds("CKT", [2, 2], N=2, mult_sum=1).value == -1
    with pytest.raises(BoundInputError, match="mult_sum"):
        reference_complex_bounds("CKT", [2, 2], N=2)
    with pytest.raises(BoundInputError, match="N = m = 2"):
        reference_complex_bounds("CHADZYNSKI", [2, 2, 1], mult_sum=1)


def test_ks_bounds():
    rep = ks_bounds(2, 2, "LOCAL")
    assert rep.value == 18 and rep.direction is Direction.UPPER
    rep = ks_bounds(2, 2, "INFTY_COMPACT")
    assert rep.value == -18 and rep.direction is Direction.LOWER
    rep = ks_bounds(1, 3, "GLOBAL")
    assert rep.value == 3 and rep.denominator_degree == 2


def test_values_are_exact_and_repeatable():
    a = infinity_polynomial_map_bound(3, 4, 5, 3)
    b = infinity_polynomial_map_bound(3, 4, 5, 3)
    assert isinstance(a.value, Fraction) and a == b
    assert local_separation_bound(5, 5, 6) == 6 * 33**9  # far past 64-bit range


def test_report_json_round_trip():
    rep = infinity_polynomial_map_bound(1, 0, 3, 3)
    d = rep.to_json()
    assert d["value"] == "-9/2"
    assert BoundReport.from_json(d) == rep


GRID = list(itertools.product(range(1, 6), range(1, 6), range(1, 7)))


def test_monotone_and_signed():
    for N, r, d in GRID:
        up = [local_separation_bound(N, r, d), isolated_separation_bound(N, r, d), ks_bounds(N, d).value]
        assert all(v >= 1 for v in up)
        assert local_separation_bound(N + 1, r, d) >= up[0]
        assert local_separation_bound(N, r + 1, d) >= up[0]
        assert local_separation_bound(N, r, d + 1) >= up[0]
        assert isolated_separation_bound(N, r, d + 1) >= up[1]
        assert infinity_regular_bound(N, d).value <= 0
        assert infinity_regular_bound(N, d + 1).value <= infinity_regular_bound(N, d).value
        if d >= 2:
            v = infinity_semialgebraic_map_bound(N, r, d).value
            assert v <= 0
            assert infinity_semialgebraic_map_bound(N + 1, r, d).value <= v
            assert infinity_semialgebraic_map_bound(N, r + 1, d).value <= v
            assert infinity_semialgebraic_map_bound(N, r, d + 1).value <= v
            for D in range(2, d + 1):
                w = infinity_polynomial_map_bound(N, r, d, D).value
                assert w <= 0
                assert infinity_polynomial_map_bound(N, r, d + 1, D).value <= w
                if D < d:
                    assert infinity_polynomial_map_bound(N, r, d, D + 1).value <= w


def test_consistency_chain():
    for N, _, d in GRID:
        assert local_map_bound(N, 0, 0, d, d).value == ks_bounds(N, d, "LOCAL").value
        assert infinity_regular_bound(N, d).value == ks_bounds(N, d, "INFTY_COMPACT").value

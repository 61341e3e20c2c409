"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py`` (the lines are repeated in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import io
import itertools
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from instances import instance, random_poly  # noqa: E402
from lojasiewicz.bounds import (b_product, infinity_polynomial_map_bound, infinity_regular_bound,  # noqa: E402
                                isolated_separation_bound, local_map_bound, local_separation_bound,
                                reference_complex_bounds, regular_local_bound)
from lojasiewicz.cli import dumps, run  # noqa: E402
from lojasiewicz.estimator import (EstimationError, estimate_infinity_exponent, estimate_local_map_exponent,  # noqa: E402
                                   estimate_separation_exponent, verify_bound)
from lojasiewicz.lifting import algebraize, algebraize_pair, distance_transfer_check, joint_lift, lift_point  # noqa: E402
from lojasiewicz.polynomials import PolyMap, Polynomial, variables  # noqa: E402
from lojasiewicz.projection import (AtInfinity, TriangularLinearMap, degree_check, norm_sandwich_estimate,  # noqa: E402
                                    reduction_experiment, sample_generic)
from lojasiewicz.semisets import BasicSet, SemialgebraicSet, membership, sample_near  # noqa: E402

ORACLE = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())
RESULTS: dict[int, str] = {}

(t,) = variables(1)
x, y = variables(2)
R1 = SemialgebraicSet.whole_space(1)
R2 = SemialgebraicSet.whole_space(2)


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_1_bound_exactness():
    t0 = time.perf_counter()
    checks = [
        (local_separation_bound(2, 0, 2), 18),
        (local_separation_bound(3, 2, 3), 151875),
        (isolated_separation_bound(2, 0, 2), 5),
        (isolated_separation_bound(2, 2, 2), 41),
        (regular_local_bound(3, 2, "COMPLEX").value, 8),
        (infinity_regular_bound(2, 2).value, -18),
        (b_product([3, 2, 2], 2), 6),
        (reference_complex_bounds("KOLLAR", [2, 2], N=2).value, -2),
        (reference_complex_bounds("CHADZYNSKI", [2, 2], N=2, mult_sum=4).value, 2),
    ]
    dt = time.perf_counter() - t0
    exact = all(isinstance(v, (int, Fraction)) and v == want for v, want in checks)
    bad = [(str(v), want) for v, want in checks if v != want]
    report(1, exact and dt < 1.0, f"{len(checks)} formulas exact in {dt * 1e3:.1f} ms {bad or ''}")


def test_criterion_2_fixture_recovery():
    runs = []

    def timed(f):
        t0 = time.perf_counter()
        est = f()
        runs.append(time.perf_counter() - t0)
        return est.value

    v1 = timed(lambda: estimate_local_map_exponent(PolyMap([t**2]), R1, [0.0]))
    v2 = timed(lambda: estimate_local_map_exponent(PolyMap([x, y**3]), R2, [0.0, 0.0]))
    v3 = timed(lambda: estimate_separation_exponent(SemialgebraicSet.basic(2, eqs=[y]),
                                                   SemialgebraicSet.basic(2, eqs=[y - x**3]), [0.0, 0.0]))
    v4 = timed(lambda: estimate_infinity_exponent(PolyMap([x, 1 - x * y]), R2))
    ok = (abs(v1 - 2) <= 0.1
          and abs(v2 - 3) <= 0.15 and abs(v2 - ORACLE["xy3"]["slope"]) <= 0.15
          and abs(v3 - 3) <= 0.15 and abs(v3 - ORACLE["cubic_separation"]["slope"]) <= 0.15
          and abs(v4 + 1) <= 0.1 and abs(v4 - ORACLE["hyperbola"]["slope"]) <= 0.1
          and max(runs) < 60)
    report(2, ok, f"eta(x^2)={v1:.4f} eta(x,y^3)={v2:.4f} sep={v3:.4f} nu(hyperbola)={v4:.4f} "
                  f"slowest {max(runs):.1f} s")


def _sweep_case(seed):
    F, X, N, r, dF, kappa = instance(seed)
    est = estimate_local_map_exponent(F, X, [0.0] * N)
    local = verify_bound(est, local_map_bound(N, r, r, kappa, max(dF, kappa)))
    inf = None
    try:
        e_inf = estimate_infinity_exponent(F, X)
        if not any("unbounded" in w for w in e_inf.warnings):
            D = max(2, kappa)
            inf = verify_bound(e_inf, infinity_polynomial_map_bound(N, 2 * r, max(dF, D), D))
    except EstimationError:
        pass  # X bounded at these scales
    return local, inf


@pytest.mark.slow
def test_criterion_3_bound_consistency():
    fails, n_local, n_inf = [], 0, 0
    for seed in range(1, 21):
        local, inf = _sweep_case(seed)
        n_local += 1
        if not local.passed:
            fails.append(("local", seed, local.message))
        if inf is not None:
            n_inf += 1
            if not inf.passed:
                fails.append(("infinity", seed, inf.message))
    # a FAIL must reproduce from its seed
    for kind, seed, _ in fails:
        local, inf = _sweep_case(seed)
        assert not (local if kind == "local" else inf).passed
    report(3, not fails, f"{n_local} local and {n_inf} at-infinity verdicts, failures {fails}")


def test_criterion_4_reduction():
    t0 = time.perf_counter()
    F = PolyMap([t**2, t**3, t**5])
    rep = reduction_experiment(F, R1, 1, trials=10, dim_hint=1, seed=0)
    generic_ok = abs(rep.baseline.value - 2) <= 0.1 and all(abs(tr.estimate.value - 2) <= 0.1 for tr in rep.trials)
    deg = reduction_experiment(F, R1, 1, dim_hint=1, maps=[np.array([[0.0, 0.0, 1.0]])]).trials[0]
    degenerate_ok = abs(deg.estimate.value - 5) <= 0.15 and deg.inequality_holds and not deg.equal
    G = PolyMap([t, t**2])
    inf = reduction_experiment(G, R1, 1, trials=10, locality=AtInfinity(1e3), dim_hint=1, seed=0)
    vals = [tr.estimate.value for tr in inf.trials]
    inf_ok = abs(inf.baseline.value - 1) <= 0.1 and all(abs(v - 1) <= 0.1 for v in vals)
    dt = time.perf_counter() - t0
    report(4, generic_ok and degenerate_ok and inf_ok and dt < 300,
           f"local baseline {rep.baseline.value:.4f}, trials "
           f"[{min(tr.estimate.value for tr in rep.trials):.4f}, {max(tr.estimate.value for tr in rep.trials):.4f}]; "
           f"degenerate {deg.estimate.value:.4f}; infinity baseline {inf.baseline.value:.4f}, "
           f"trials [{min(vals):.4f}, {max(vals):.4f}] against target 1; {dt:.0f} s")


def _sorted_map(rng):
    n = int(rng.integers(1, 4))
    m = int(rng.integers(1, 5))
    degs = sorted(rng.integers(1, 6, size=m).tolist(), reverse=True)
    return PolyMap([random_poly(rng, n, d) for d in degs])


def test_criterion_5_degree_preservation():
    rng = np.random.default_rng(5)
    bad = []
    for i in range(100):
        F = _sorted_map(rng)
        k = int(rng.integers(1, len(F) + 1))
        chk = degree_check(F, sample_generic(len(F), k, seed=i))
        if not (chk.sorted_input and chk.preserved):
            bad.append(i)
    fixture = degree_check(PolyMap([t**2 - 1, t**2]), TriangularLinearMap(2, 1, np.array([[-1.0]])))
    report(5, not bad and fixture.dropped == (0,),
           f"100 maps, mismatches {bad}; cancellation fixture flags component {list(fixture.dropped)}")


def _random_basic(rng):
    n = int(rng.integers(1, 4))
    ineqs = [random_poly(rng, n, int(rng.integers(1, 4)), constant=rng.uniform(0.1, 1))
             for _ in range(int(rng.integers(0, 4)))]
    return BasicSet(n, tuple(ineqs), ())


def _members(X, rng, count):
    pts = []
    for _ in range(200):
        cand = rng.uniform(-1.5, 1.5, size=(count, X.num_vars))
        pts += [p for p in cand if membership(X, p, 0.0)]
        if len(pts) >= count:
            return pts[:count]
    more = sample_near(X, np.zeros(X.num_vars), 1.0, count - len(pts), seed=int(rng.integers(2**31))).points
    return (pts + list(more))[:count]


@pytest.mark.slow
def test_criterion_6_lifting():
    rng = np.random.default_rng(6)
    sets = [_random_basic(rng) for _ in range(100)]
    worst_lift = worst_joint = 0.0
    worst_margin = np.inf
    caps_ok = True
    for i, X in enumerate(sets):
        L = algebraize(X)
        kappa = max((g.degree for g in X.ineqs), default=0)
        # with no inequality nothing is lifted and the cap is kappa itself
        caps_ok &= L.degree_cap == (max(kappa, 2) if X.ineqs else kappa)
        pts = _members(X, rng, 100)
        for p in pts:
            worst_lift = max(worst_lift, float(np.max(np.abs(L.residuals(p, lift_point(L, p))), initial=0.0)))
        # joint lift with the next set of the same dimension
        partner = next((Y for Y in sets[i + 1:] + sets[:i] if Y.num_vars == X.num_vars), X)
        A, B = algebraize_pair(X, partner)
        qs = _members(partner, rng, 10)
        for p, q in zip(pts, qs):
            yv = joint_lift(A, B, p, q)
            res = np.concatenate([A.residuals(p, yv), B.residuals(q, yv)])
            worst_joint = max(worst_joint, float(np.max(np.abs(res), initial=0.0)))
        # distance transfer from a point outside X, when there is one
        if X.ineqs:
            out = next((p for p in rng.uniform(-3, 3, size=(500, X.num_vars)) if not membership(X, p, 1e-6)), None)
            if out is not None:
                worst_margin = min(worst_margin, distance_transfer_check(L, out, trials=2, seed=i).margin)
    ok = worst_lift <= 1e-9 and worst_joint <= 1e-9 and worst_margin >= -1e-6 and caps_ok
    report(6, ok, f"lift residual {worst_lift:.2e}, joint residual {worst_joint:.2e}, "
                  f"worst transfer margin {worst_margin:.2e}, degree caps {'exact' if caps_ok else 'WRONG'}")


def test_criterion_7_norm_sandwich():
    F = PolyMap([t**2, t**3])
    consts = [tuple(norm_sandwich_estimate(F, sample_generic(2, 1, s), R1, [0.0], 0.01, seed=s)) for s in range(10)]
    c1 = min(c[0] for c in consts)
    c2 = max(c[1] for c in consts)
    ident = tuple(norm_sandwich_estimate(F, np.eye(2), R1, [0.0], 0.01))
    report(7, c1 >= 0.5 and c2 <= 2 and ident == (1.0, 1.0),
           f"generic C1 >= {c1:.4f}, C2 <= {c2:.4f}; identity {ident}")


def _cli_result(argv):
    buf = io.StringIO()
    assert run(argv + ["--json"], stdout=buf) == 0
    return dumps(json.loads(buf.getvalue())["result"]).encode()


def test_criterion_8_determinism(tmp_path):
    cusp = tmp_path / "cusp.json"
    cusp.write_text(json.dumps(PolyMap([x, y**3]).to_json()))
    f235 = tmp_path / "f235.json"
    f235.write_text(json.dumps(PolyMap([t**2, t**3, t**5]).to_json()))
    runs = [
        ["bound", "--formula", "local-sep", "--N", "3", "--r", "2", "--d", "3"],
        ["estimate", "--map", str(cusp), "--at", "0", "--seed", "7"],
        ["reduce", "--map", str(f235), "--k", "1", "--trials", "3", "--dim-hint", "1", "--seed", "7",
         "--threads", "2"],
    ]
    same = [_cli_result(a) == _cli_result(a) for a in runs]
    est = [estimate_infinity_exponent(PolyMap([x, 1 - x * y]), R2).to_json() for _ in range(2)]
    same.append(dumps(est[0]) == dumps(est[1]))
    report(8, all(same), f"{sum(same)} of {len(same)} repeated runs byte-identical")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    import tempfile
    for fn in tests:
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            pass
    sys.exit(0 if all("PASS" in v for v in RESULTS.values()) else 1)

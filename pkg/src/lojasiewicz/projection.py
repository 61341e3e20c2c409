"""Generic linear reduction of overdetermined polynomial maps.

A map ``F: R^N -> R^m`` restricted to a set of dimension ``n <= k < m`` can be
composed with a triangular map ``L: R^m -> R^k``,
``L_i(y) = y_i + sum_{j>k} alpha[i, j-k] y_j``. For generic ``alpha`` the
composition keeps the zero set near the point of interest, the component
degrees and the Łojasiewicz exponent. "Generic" is realized here by Gaussian
sampling: every check below is an experiment on sampled maps, and failures are
reported with the seed that produced them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from .estimator import (EstimateKind, ExponentEstimate, SamplingConfig, _onto, estimate_infinity_exponent,
                        estimate_local_map_exponent)
from .polynomials import ZERO_DEGREE, PolyMap, compose_linear
from .semisets import DistanceConfig, SemialgebraicSet, as_set, complexity, membership, sample_near

__all__ = [
    "TriangularLinearMap",
    "Local",
    "AtInfinity",
    "PreconditionError",
    "DegenerateSampleError",
    "sample_generic",
    "reduce_map",
    "DegreeCheck",
    "degree_check",
    "ZeroPreservationVerdict",
    "zero_preservation_check",
    "SandwichConstants",
    "norm_sandwich_estimate",
    "StabilityVerdict",
    "perturbation_stability_check",
    "TrialRecord",
    "ReductionReport",
    "reduction_experiment",
]


class PreconditionError(ValueError):
    pass


class DegenerateSampleError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class TriangularLinearMap:
    m: int
    k: int
    alpha: np.ndarray  # k x (m - k)

    def __post_init__(self):
        if not 1 <= self.k <= self.m:
            raise ValueError(f"need 1 <= k <= m, got k={self.k}, m={self.m}")
        a = np.asarray(self.alpha, dtype=float).reshape(self.k, self.m - self.k)
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def matrix(self) -> np.ndarray:
        M = np.hstack([np.eye(self.k), self.alpha])
        assert np.array_equal(M[:, : self.k], np.eye(self.k))
        return M

    def __call__(self, y) -> np.ndarray:
        return self.matrix @ np.asarray(y, dtype=float)

    def __eq__(self, other) -> bool:
        return (isinstance(other, TriangularLinearMap) and (self.m, self.k) == (other.m, other.k)
                and np.array_equal(self.alpha, other.alpha))

    def __hash__(self):
        return hash((self.m, self.k, self.alpha.tobytes()))

    def to_json(self) -> dict:
        return {"m": self.m, "k": self.k, "alpha": self.alpha.tolist()}

    @classmethod
    def from_json(cls, d: dict) -> "TriangularLinearMap":
        return cls(d["m"], d["k"], np.array(d["alpha"], dtype=float).reshape(d["k"], d["m"] - d["k"]))


@dataclass(frozen=True)
class Local:
    center: tuple[float, ...]
    radius: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.ravel(self.center)))
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    def to_json(self) -> dict:
        return {"kind": "local", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class AtInfinity:
    radius: float = 1e3  # largest scanned shell

    def __post_init__(self):
        if not self.radius > 1:
            raise ValueError("radius must exceed 1")

    def to_json(self) -> dict:
        return {"kind": "infinity", "radius": self.radius}


def sample_generic(m: int, k: int, seed=0) -> TriangularLinearMap:
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= m, got k={k}, m={m}")
    rng = np.random.default_rng(seed)
    return TriangularLinearMap(m, k, rng.standard_normal((k, m - k)))


def _matrix(L) -> np.ndarray:
    if isinstance(L, TriangularLinearMap):
        return L.matrix
    return np.atleast_2d(np.asarray(L, dtype=float))


def reduce_map(F: PolyMap, L) -> PolyMap:
    """``L o F``; ``L`` is a triangular map or any ``k x m`` matrix."""
    M = _matrix(L)
    if M.shape[1] != len(F):
        raise ValueError(f"L acts on R^{M.shape[1]} but F has {len(F)} components")
    return compose_linear(F, M)


@dataclass(frozen=True)
class DegreeCheck:
    expected: tuple  # deg f_j, j <= k
    actual: tuple  # deg (L o F)_j
    sorted_input: bool  # degrees of F nonincreasing and positive

    @property
    def dropped(self) -> tuple[int, ...]:
        return tuple(j for j, (e, a) in enumerate(zip(self.expected, self.actual)) if e != a)

    @property
    def preserved(self) -> bool:
        return not self.dropped

    def to_json(self) -> dict:
        enc = lambda d: None if d is ZERO_DEGREE else d  # noqa: E731
        return {"expected": [enc(d) for d in self.expected], "actual": [enc(d) for d in self.actual],
                "sorted_input": self.sorted_input, "dropped": list(self.dropped)}


def degree_check(F: PolyMap, L, G: PolyMap | None = None) -> DegreeCheck:
    """Compare ``deg (L o F)_j`` with ``deg f_j``; a mismatch flags cancellation of leading terms."""
    G = reduce_map(F, L) if G is None else G
    degs = F.degrees()
    ok = all(d is not ZERO_DEGREE and d > 0 for d in degs) and all(
        degs[i] >= degs[i + 1] for i in range(len(degs) - 1))
    return DegreeCheck(tuple(degs[: len(G)]), tuple(G.degrees()), ok)


# zero sets


@dataclass(frozen=True)
class ZeroPreservationVerdict:
    passed: bool
    witness: np.ndarray | None  # x with |L o F(x)| <= tol < sqrt(tol) < |F(x)|
    checked: int  # points of X ∩ (L o F)^-1(0) examined
    inconclusive: bool
    message: str

    def to_json(self) -> dict:
        return {"verdict": "PASS" if self.passed else "FAIL", "statistical": True,
                "witness": None if self.witness is None else self.witness.tolist(), "checked": self.checked,
                "inconclusive": self.inconclusive, "message": self.message}


def zero_preservation_check(F: PolyMap, L, X, locality, samples: int = 64, seed=0, tol: float = 1e-8,
                            cfg: DistanceConfig | None = None) -> ZeroPreservationVerdict:
    """Search ``X ∩ (L o F)^-1(0)`` for points where ``F`` does not vanish.

    A PASS only means no witness turned up at this sampling density.
    """
    X = as_set(X)
    cfg = cfg or DistanceConfig(restore_tol=1e-12, max_restore_iter=200)
    G = reduce_map(F, L)
    W = X.intersect(SemialgebraicSet.basic(X.num_vars, eqs=G.components))
    n = X.num_vars
    if isinstance(locality, Local):
        regions = [(np.array(locality.center), locality.radius)]
    elif isinstance(locality, AtInfinity):
        # a ball at the origin, then shells reaching out to the given radius
        regions = [(np.zeros(n), r) for r in np.geomspace(1.0, locality.radius, 6)]
    else:
        raise TypeError("locality must be Local or AtInfinity")
    rng = np.random.default_rng(seed)
    checked = 0
    for center, radius in regions:
        res = sample_near(W, center, radius, samples, seed=int(rng.integers(2**31)), cfg=cfg,
                          max_attempts=4 * samples)
        for x in res.points:
            checked += 1
            if G.norm(x) <= tol and F.norm(x) > math.sqrt(tol):
                return ZeroPreservationVerdict(False, x, checked, False,
                                               f"|L o F| = {G.norm(x):.3g} but |F| = {F.norm(x):.3g}")
    if checked == 0:
        return ZeroPreservationVerdict(True, None, 0, True, "no point of X ∩ (L o F)^-1(0) found in the region")
    return ZeroPreservationVerdict(True, None, checked, False,
                                   f"no witness among {checked} sampled zeros of L o F (statistical)")


# norm comparison


@dataclass(frozen=True)
class SandwichConstants:
    c1: float
    c2: float
    count: int

    def __iter__(self):
        return iter((self.c1, self.c2))

    def to_json(self) -> dict:
        return {"C1": self.c1, "C2": self.c2, "count": self.count}


def _multiscale_points(X: SemialgebraicSet, a: np.ndarray, radius: float, samples: int, rng, cfg) -> list:
    n = len(a)
    d = rng.standard_normal((samples, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = radius * np.exp(rng.uniform(math.log(1e-3), 0.0, samples))
    out = []
    for x in a + d * r[:, None]:
        s = _onto(X, x, cfg)
        if s is not None and np.linalg.norm(s - a) <= radius:
            out.append(s)
    return out


def norm_sandwich_estimate(F: PolyMap, L, X, a, radius: float, samples: int = 256, seed=0,
                           cfg: DistanceConfig | None = None) -> SandwichConstants:
    """Empirical ``C1 = min |L(F(x))| / |F(x)|`` and ``C2 = max`` of the same ratio near ``a``."""
    if samples < 2:
        raise ValueError("samples must be at least 2")
    X = as_set(X)
    a = np.asarray(a, dtype=float)
    M = _matrix(L)
    cfg = cfg or DistanceConfig(restore_tol=1e-12, max_restore_iter=200)
    rng = np.random.default_rng(seed)
    ratios = []
    for x in _multiscale_points(X, a, radius, samples, rng, cfg):
        v = F(x)
        nv = np.linalg.norm(v)
        if nv == 0:
            continue
        ratios.append(np.linalg.norm(M @ v) / nv)
    if not ratios:
        raise DegenerateSampleError("F vanished at every sampled point")
    return SandwichConstants(float(min(ratios)), float(max(ratios)), len(ratios))


# perturbations


@dataclass(frozen=True)
class StabilityVerdict:
    passed: bool
    skipped: bool
    order: float  # estimated order of vanishing of F - G at a
    exponent_F: float | None
    exponent_G: float | None
    ratio_bounds: tuple[float, float] | None
    message: str

    def to_json(self) -> dict:
        return {"verdict": "SKIPPED" if self.skipped else ("PASS" if self.passed else "FAIL"),
                "order": self.order if math.isfinite(self.order) else None, "exponent_F": self.exponent_F,
                "exponent_G": self.exponent_G,
                "ratio_bounds": None if self.ratio_bounds is None else list(self.ratio_bounds),
                "message": self.message}


def _vanishing_order(H: PolyMap, X, a, edges, samples, rng, cfg) -> float:
    """Slope of ``log max |H|`` against ``log r`` over shells around ``a``; ``inf`` if ``H`` vanishes."""
    if all(c.is_zero() for c in H.components):
        return math.inf
    lx, ly = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        pts = _multiscale_points(X, a, hi, samples, rng, cfg)
        vals = [H.norm(x) for x in pts if np.linalg.norm(x - a) >= lo]
        m = max(vals, default=0.0)
        if m > 0:
            lx.append(math.log(lo))
            ly.append(math.log(m))
    if len(lx) < 3:
        return math.inf
    return float(linregress(lx, ly).slope)


def perturbation_stability_check(F: PolyMap, G: PolyMap, X, a, cfg: SamplingConfig | None = None,
                                 samples: int = 64) -> StabilityVerdict:
    """Check that a high-order perturbation ``G`` of ``F`` keeps the exponent at ``a``.

    The order of ``F - G`` must exceed the estimated exponent of ``F`` by more
    than the fit tolerance; otherwise the check is skipped with a diagnosis.
    """
    cfg = cfg or SamplingConfig()
    X = as_set(X)
    a = np.asarray(a, dtype=float)
    if len(F) != len(G) or F.num_vars != G.num_vars:
        raise ValueError("F and G must have the same shape")
    rng = np.random.default_rng([cfg.seed, 5])
    dc = cfg.distance
    edges = cfg.edges(EstimateKind.LOCAL)
    H = PolyMap([f - g for f, g in zip(F.components, G.components)], num_vars=F.num_vars)
    order = _vanishing_order(H, X, a, edges, samples, rng, dc)
    eF = estimate_local_map_exponent(F, X, a, cfg=cfg)
    if not order > eF.value + cfg.fit_tol:
        return StabilityVerdict(False, True, order, eF.value, None, None,
                                f"precondition fails: ord(F - G) = {order:.3g} does not exceed "
                                f"the exponent {eF.value:.3g} of F")
    eG = estimate_local_map_exponent(G, X, a, cfg=cfg)
    ratios = []
    for x in _multiscale_points(X, a, edges[-1], 8 * samples, rng, dc):
        nf = F.norm(x)
        if nf > 0:
            ratios.append(G.norm(x) / nf)
    bounds = (float(min(ratios)), float(max(ratios))) if ratios else None
    tol = max(cfg.fit_tol, 2 * max(eF.fit_stderr, eG.fit_stderr))
    agree = abs(eF.value - eG.value) <= tol
    sandwich = bounds is not None and bounds[0] > 0 and math.isfinite(bounds[1])
    msg = f"exponents {eF.value:.4g} and {eG.value:.4g}; |G|/|F| in {bounds}"
    return StabilityVerdict(agree and sandwich, False, order, eF.value, eG.value, bounds, msg)


# experiments


@dataclass(frozen=True)
class TrialRecord:
    seed: int | None  # None for a user-supplied map
    matrix: np.ndarray
    estimate: ExponentEstimate
    zero_check: ZeroPreservationVerdict
    degrees: DegreeCheck
    sandwich: SandwichConstants | None
    inequality_holds: bool
    equal: bool

    def to_json(self) -> dict:
        return {"seed": self.seed, "matrix": self.matrix.tolist(), "estimate": self.estimate.to_json(),
                "zero_check": self.zero_check.to_json(), "degrees": self.degrees.to_json(),
                "sandwich": None if self.sandwich is None else self.sandwich.to_json(),
                "inequality_holds": self.inequality_holds, "equal": self.equal}


@dataclass(frozen=True)
class ReductionReport:
    description: str
    k: int
    locality: dict
    baseline: ExponentEstimate
    trials: tuple[TrialRecord, ...]
    tolerance: float  # largest per-trial tolerance, max(fit_tol, 2 * stderr)

    @property
    def inequality_holds(self) -> bool:
        return all(t.inequality_holds for t in self.trials)

    @property
    def failed_seeds(self) -> list:
        return [t.seed for t in self.trials if not t.equal]

    @property
    def equality_holds(self) -> bool:
        return all(t.equal for t in self.trials)

    @property
    def passed(self) -> bool:
        return self.inequality_holds and self.equality_holds

    def to_json(self) -> dict:
        return {"map": self.description, "k": self.k, "locality": self.locality,
                "baseline": self.baseline.to_json(), "tolerance": self.tolerance,
                "trials": [t.to_json() for t in self.trials],
                "inequality_holds": self.inequality_holds, "equality_holds": self.equality_holds,
                "failed_seeds": self.failed_seeds, "verdict": "PASS" if self.passed else "FAIL"}


def reduction_experiment(F: PolyMap, X, k: int, trials: int = 10, locality=None,
                         cfg: SamplingConfig | None = None, dim_hint: int | None = None, seed=0,
                         maps=None, threads: int = 1) -> ReductionReport:
    """Compare the exponent of ``F|X`` with that of ``(L o F)|X`` for sampled or given ``L``.

    Trial ``i`` samples ``L`` with seed ``seed + i``. Passing ``maps`` replaces
    the sampled maps by the given ``k x m`` matrices.
    """
    cfg = cfg or SamplingConfig()
    X = as_set(X)
    m = len(F)
    n = complexity(X, dim_hint).dim
    if not n <= k <= m:
        raise PreconditionError(f"need n <= k <= m, got n={n}, k={k}, m={m}")
    locality = locality if locality is not None else Local(np.zeros(X.num_vars))
    at_infinity = isinstance(locality, AtInfinity)
    if at_infinity:
        estimate = lambda G: estimate_infinity_exponent(G, X, cfg)  # noqa: E731
    else:
        a = np.array(locality.center)
        if not membership(X, a, 1e-9):
            raise ValueError("the base point is not in X")
        estimate = lambda G: estimate_local_map_exponent(G, X, a, cfg=cfg)  # noqa: E731
    baseline = estimate(F)

    if maps is None:
        jobs = [(seed + i, sample_generic(m, k, seed + i).matrix) for i in range(trials)]
    else:
        jobs = [(None, _matrix(M)) for M in maps]

    def run(job):
        s, M = job
        if M.shape != (k, m):
            raise ValueError(f"map of shape {M.shape}, expected {(k, m)}")
        G = reduce_map(F, M)
        est = estimate(G)
        zc = zero_preservation_check(F, M, X, locality, seed=0 if s is None else s)
        deg = degree_check(F, M, G)
        sw = None
        if not at_infinity:
            try:
                sw = norm_sandwich_estimate(F, M, X, locality.center, locality.radius, seed=0 if s is None else s)
            except DegenerateSampleError:
                pass
        return s, M, est, zc, deg, sw

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(j) for j in jobs]

    records = []
    tols = [cfg.fit_tol]
    for s, M, est, zc, deg, sw in results:
        tol = max(cfg.fit_tol, 2 * max(baseline.fit_stderr, est.fit_stderr))
        tols.append(tol)
        if at_infinity:
            ineq = est.value <= baseline.value + tol
        else:
            ineq = est.value >= baseline.value - tol
        records.append(TrialRecord(s, M, est, zc, deg, sw, ineq, abs(est.value - baseline.value) <= tol))
    desc = "; ".join(str(c) for c in F.components)
    return ReductionReport(desc, k, locality.to_json(), baseline, tuple(records), max(tols))

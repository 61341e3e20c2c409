"""Numerical Łojasiewicz exponents from shell minima.

The exponent ``eta`` in ``|F(x)| >= C dist(x, Z)^eta`` is estimated by
splitting distances into geometric shells ``[s, b*s]``, finding the minimum of
``|F|`` on each shell and fitting a least-squares line through
``log(min)`` versus ``log(s)``. The exponent at infinity uses shells of ``|x|``
instead, and the separation exponent uses ``dist(x, X) + dist(x, Y)`` over
shells of ``dist(x, X ∩ Y)``.

Shell minima come from two sources: a batch of random shell points (restored
onto the domain set), and SLSQP refinements of the best of them in scaled
coordinates ``x = z + rho * u``, where ``z`` is a point of the zero set and
``u`` ranges over the unit shell. Every recorded value is re-measured at the
final point; distances to non-trivial zero sets go through the oracle.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import linregress

from .bounds import BoundReport, Direction as BoundDirection
from .polynomials import PolyMap, Polynomial
from .semisets import (BasicSet, DistanceConfig, InfeasibleError, SemialgebraicSet, approx_distance, as_set,
                       membership, restore, sample_near)

__all__ = [
    "SamplingConfig",
    "EstimateKind",
    "ShellRecord",
    "ExponentEstimate",
    "EstimationError",
    "zero_set",
    "estimate_local_map_exponent",
    "estimate_separation_exponent",
    "estimate_infinity_exponent",
    "GlobalSeparationResult",
    "estimate_global_separation",
    "Verdict",
    "verify_bound",
]

logger = logging.getLogger(__name__)

_TINY = 1e-300


class EstimationError(RuntimeError):
    pass


class EstimateKind(str, enum.Enum):
    LOCAL = "LOCAL"
    INFINITY = "INFINITY"
    SEPARATION_LOCAL = "SEPARATION_LOCAL"
    SEPARATION_GLOBAL = "SEPARATION_GLOBAL"


ESTIMATOR_DISTANCE = DistanceConfig(starts=4, samples=0, restore_tol=1e-14, max_restore_iter=200)


@dataclass(frozen=True)
class SamplingConfig:
    samples_per_shell: int = 256
    shell_base: float = 2.0
    shell_count: int = 12
    min_scale: float | None = None  # 1e-4 locally, 1 at infinity
    seed: int = 0
    distance: DistanceConfig = ESTIMATOR_DISTANCE
    fit_tol: float = 0.1
    refine: int = 4  # SLSQP refinements per shell and anchor

    def __post_init__(self):
        if self.shell_count < 4:
            raise ValueError("shell_count must be at least 4")
        if not self.shell_base > 1:
            raise ValueError("shell_base must exceed 1")
        if self.samples_per_shell < 1:
            raise ValueError("samples_per_shell must be positive")

    def scale_floor(self, kind: EstimateKind) -> float:
        if self.min_scale is not None:
            return self.min_scale
        return 1.0 if kind is EstimateKind.INFINITY else 1e-4

    def edges(self, kind: EstimateKind) -> np.ndarray:
        return self.scale_floor(kind) * self.shell_base ** np.arange(self.shell_count + 1)

    def to_json(self) -> dict:
        d = {k: getattr(self, k) for k in ("samples_per_shell", "shell_base", "shell_count", "min_scale", "seed",
                                            "fit_tol", "refine")}
        dc = self.distance
        d["distance"] = {"starts": dc.starts, "restore_tol": dc.restore_tol,
                         "penalty_schedule": list(dc.penalty_schedule), "penalty_max": dc.penalty_max,
                         "samples": dc.samples, "box": dc.box, "seed": dc.seed,
                         "max_restore_iter": dc.max_restore_iter}
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SamplingConfig":
        d = dict(d)
        dist = d.pop("distance", None)
        if dist is not None:
            dist = dict(dist)
            dist["penalty_schedule"] = tuple(dist.get("penalty_schedule", DistanceConfig.penalty_schedule))
            d["distance"] = DistanceConfig(**dist)
        return cls(**d)


@dataclass(frozen=True)
class ShellRecord:
    scale: float  # lower edge of the shell
    min_value: float  # inf when no usable point landed in the shell
    sample_count: int

    @property
    def used(self) -> bool:
        return math.isfinite(self.min_value) and self.min_value > 0


@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    direction: EstimateKind
    shell_records: tuple[ShellRecord, ...]
    fit_stderr: float
    admissible_constant: float
    warnings: tuple[str, ...] = ()
    intercept: float = 0.0

    @property
    def used_shells(self) -> int:
        return sum(r.used for r in self.shell_records)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "direction": self.direction.value,
            "fit_stderr": self.fit_stderr,
            "intercept": self.intercept,
            "admissible_constant": self.admissible_constant,
            "shell_records": [[r.scale, r.min_value if math.isfinite(r.min_value) else None, r.sample_count]
                              for r in self.shell_records],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ExponentEstimate":
        recs = tuple(ShellRecord(s, math.inf if v is None else v, n) for s, v, n in d["shell_records"])
        return cls(d["value"], EstimateKind(d["direction"]), recs, d["fit_stderr"], d["admissible_constant"],
                   tuple(d.get("warnings", ())), d.get("intercept", 0.0))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["scale", "min_value", "samples"])
        for r in self.shell_records:
            w.writerow([repr(r.scale), repr(r.min_value) if math.isfinite(r.min_value) else "", r.sample_count])
        return buf.getvalue()


# geometry helpers


def zero_set(F: PolyMap, X) -> SemialgebraicSet:
    """``X ∩ F^-1(0)`` as a conjunction of presentations."""
    X = as_set(X)
    return X.intersect(SemialgebraicSet.basic(X.num_vars, eqs=F.components))


@dataclass
class _Anchor:
    z: np.ndarray
    basis: np.ndarray  # orthonormal columns spanning the directions x - z may take


def _normal_basis(Z: SemialgebraicSet, z: np.ndarray, tol: float) -> np.ndarray:
    n = Z.num_vars
    piece = min(Z.pieces, key=lambda p: p.violation(z))
    rows = [h._gradient for h in piece.eqs] + [g._gradient for g in piece.ineqs if abs(g(z)) <= 1e-8]
    if not rows:
        return np.eye(n)
    J = np.array([[d(z) for d in grad] for grad in rows])
    u, s, vt = np.linalg.svd(J)
    if not s.size or s[0] == 0:
        return np.eye(n)
    rank = int(np.sum(s > 1e-8 * s[0]))
    if rank == 0:
        return np.eye(n)
    return vt[:rank].T


class _ZeroGeometry:
    """Distance to a zero set near ``a``: exact for an isolated point or affine set, oracle otherwise."""

    def __init__(self, Z: SemialgebraicSet, a: np.ndarray, outer: float, inner: float, cfg: SamplingConfig,
                 rng: np.random.Generator):
        self.Z, self.a, self.cfg = Z, a, cfg
        self.warnings: list[str] = []
        n = Z.num_vars
        self.affine = len(Z.pieces) == 1 and Z.pieces[0].is_affine()
        probe = sample_near(Z, a, 2 * outer, 32, seed=int(rng.integers(2**31)),
                            cfg=replace(cfg.distance, restore_tol=1e-9, max_restore_iter=400), max_attempts=64)
        # cluster the probe; a few tight clusters mean a finite zero set near a
        pts = [a.copy()]
        for p in probe.points:
            if min(np.linalg.norm(p - q) for q in pts) > 1e-3 * inner:
                pts.append(p)
        self.isolated = len(pts) == 1
        self.finite = len(pts) <= 8 and len(probe.points) >= 8 and not self.affine
        self.points = np.array(pts) if self.finite else a[None, :].copy()
        if self.isolated or self.finite:
            self.anchors = [_Anchor(a.copy(), np.eye(n))]
            return
        pool = sample_near(Z, a, outer, 12, seed=int(rng.integers(2**31)), cfg=cfg.distance)
        pts = [a.copy()] + list(pool.points)
        anchors = []
        for z in pts:
            B = _normal_basis(Z, z, cfg.distance.restore_tol)
            anchors.append(_Anchor(z, B))
        # the anchor at a may be singular; there every direction is allowed
        anchors[0] = _Anchor(a.copy(), np.eye(n))
        self.anchors = anchors

    @classmethod
    def point(cls, a: np.ndarray, cfg: SamplingConfig) -> "_ZeroGeometry":
        """Geometry of the single point ``a``; distances are Euclidean norms."""
        geo = cls.__new__(cls)
        geo.Z, geo.a, geo.cfg, geo.warnings = SemialgebraicSet.point(a), a, cfg, []
        geo.affine = geo.isolated = geo.finite = True
        geo.points = a[None, :].copy()
        geo.anchors = [_Anchor(a.copy(), np.eye(len(a)))]
        return geo

    @property
    def exact(self) -> bool:
        return self.isolated or self.finite or self.affine

    def distance(self, x: np.ndarray, warm: Sequence[np.ndarray] = ()) -> float:
        if self.isolated or self.finite:
            return float(np.min(np.linalg.norm(self.points - x, axis=1)))
        return approx_distance(self.Z, x, self.cfg.distance, warm_starts=warm).value

    def distances(self, pts: np.ndarray) -> np.ndarray:
        if self.isolated or self.finite:
            return np.min(np.linalg.norm(pts[:, None, :] - self.points[None], axis=2), axis=1)
        return np.array([self.distance(p) for p in pts])


def _shell_points(rng, count: int, dim: int, inner: float) -> np.ndarray:
    """Uniform points of the unit shell ``inner <= |u| <= 1`` in R^dim."""
    d = rng.standard_normal((count, dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    rad = (inner**dim + (1 - inner**dim) * rng.random(count)) ** (1.0 / dim)
    return d * rad[:, None]


class _Constraints:
    """Polynomial constraints on affine images ``A w + c`` of the SLSQP variables, rescaled to O(1)."""

    def __init__(self):
        self.items: list[tuple[Polynomial, np.ndarray, np.ndarray, str]] = []

    def add(self, piece: BasicSet, A: np.ndarray, c: np.ndarray):
        for g in piece.ineqs:
            self.items.append((g, A, c, "ineq"))
        for h in piece.eqs:
            self.items.append((h, A, c, "eq"))

    def build(self, w0: np.ndarray, extra_ineq: Callable | None = None):
        scales = []
        for p, A, c, _ in self.items:
            x0 = A @ w0 + c
            gnorm = np.linalg.norm(np.array([d(x0) for d in p._gradient]) @ A)
            scales.append(max(gnorm, abs(p(x0)), 1e-300))
        out = []
        for kind in ("ineq", "eq"):
            sel = [(it, s) for it, s in zip(self.items, scales) if it[3] == kind]
            if kind == "ineq" and extra_ineq is not None:
                sel_fun, sel_jac = extra_ineq
            else:
                sel_fun = sel_jac = None
            if not sel and sel_fun is None:
                continue

            def fun(w, sel=sel, f0=sel_fun):
                vals = [p(A @ w + c) / s for (p, A, c, _), s in sel]
                if f0 is not None:
                    vals = list(f0(w)) + vals
                return np.array(vals)

            def jac(w, sel=sel, j0=sel_jac):
                rows = [np.array([d(A @ w + c) for d in p._gradient]) @ A / s for (p, A, c, _), s in sel]
                if j0 is not None:
                    rows = list(j0(w)) + rows
                return np.array(rows).reshape(-1, len(w))

            out.append({"type": kind, "fun": fun, "jac": jac})
        return out


def _slsqp(obj, w0, constraints):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = minimize(obj, w0, jac=True, method="SLSQP", constraints=constraints,
                       options={"maxiter": 300, "ftol": 1e-14})
    return res.x if np.all(np.isfinite(res.x)) else w0


def _shell_ineq(dim_u: int, offset: int, inner: float):
    def f(w):
        u = w[offset:offset + dim_u]
        q = u @ u
        return [q - inner**2, 1.0 - q]

    def j(w):
        r1 = np.zeros_like(w)
        u = w[offset:offset + dim_u]
        r1[offset:offset + dim_u] = 2 * u
        return [r1, -r1]

    return f, j


def _best_piece(S: SemialgebraicSet, x: np.ndarray) -> int:
    return int(np.argmin([p.violation(x) for p in S.pieces]))


def _onto(S: SemialgebraicSet, x: np.ndarray, cfg: DistanceConfig):
    """Restore ``x`` onto the closest-looking piece of ``S``; ``None`` when that fails."""
    if any(p.violation(x) <= cfg.restore_tol for p in S.pieces):
        return x
    best = None
    for p in S.pieces:
        s, v = restore(p, x, cfg.max_restore_iter)
        if v <= cfg.restore_tol and (best is None or np.linalg.norm(s - x) < np.linalg.norm(best - x)):
            best = s
    return best


def _fit(records: Sequence[ShellRecord], points: list[tuple[float, float]], kind: EstimateKind,
         warn: list[str]) -> ExponentEstimate:
    used = [r for r in records if r.used]
    if len(used) < 3:
        raise EstimationError(f"only {len(used)} shells produced usable minima; need at least 3")
    lx = np.log([r.scale for r in used])
    ly = np.log([r.min_value for r in used])
    lr = linregress(lx, ly)
    value = float(lr.slope)
    stderr = float(lr.stderr) if np.isfinite(lr.stderr) else 0.0
    if len(used) < len(records):
        warn.append(f"{len(records) - len(used)} of {len(records)} shells empty or zero-valued")
    pos = [(d, v) for d, v in points if d > 0 and v > 0]
    const = min((v / d**value for d, v in pos), default=0.0) if pos else 0.0
    return ExponentEstimate(value, kind, tuple(records), stderr, float(const), tuple(warn), float(lr.intercept))


def _bin(edges: np.ndarray, points: list[tuple], hints: dict | None = None) -> list[ShellRecord]:
    """Shell minima; ``hints`` maps a point index to the shell it was optimized for."""
    K = len(edges) - 1
    mins = [math.inf] * K
    counts = [0] * K
    hints = hints or {}
    for i, (d, v) in enumerate(points):
        k = int(np.searchsorted(edges, d, side="right")) - 1
        h = hints.get(i)
        # optimizer output sits on a shell edge up to rounding; keep it in its own shell
        if h is not None and edges[h] * (1 - 1e-6) <= d <= edges[h + 1] * (1 + 1e-6):
            k = h
        if 0 <= k < K and v > 0:
            counts[k] += 1
            mins[k] = min(mins[k], v)
    return [ShellRecord(float(edges[k]), mins[k], counts[k]) for k in range(K)]


def _rng(cfg: SamplingConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, salt])


# local exponent of a map


def _log_norm_objective(F: PolyMap, A: np.ndarray, c: np.ndarray):
    def obj(w):
        x = A @ w + c
        v = F(x)
        s = v @ v + _TINY
        g = 2.0 * (v @ F.jacobian(x)) @ A / s
        return math.log(s), g
    return obj


def _normalized(F: PolyMap) -> tuple[PolyMap, float]:
    """``F / c`` with ``c`` its largest coefficient, so the search is blind to an overall scale."""
    c = max((abs(v) for f in F for v in f.as_dict().values()), default=0.0)
    if c == 0.0 or c == 1.0:
        return F, 1.0
    return PolyMap([f * (1.0 / c) for f in F], F.num_vars), c


def _map_shell_search(F: PolyMap, X: SemialgebraicSet, geo: _ZeroGeometry, edges: np.ndarray, descending: bool,
                      cfg: SamplingConfig, rng: np.random.Generator, warn: list[str]):
    """Collect ``(distance, |F|)`` pairs covering every shell."""
    points: list[tuple[float, float]] = []
    hints: dict[int, int] = {}
    zeros = 0
    b = cfg.shell_base
    inner = 1.0 / b
    dc = cfg.distance
    K = len(edges) - 1
    order = range(K - 1, -1, -1) if descending else range(K)
    per_anchor = max(cfg.samples_per_shell // len(geo.anchors), 8)
    prev: dict[int, np.ndarray] = {}
    for k in order:
        rho = edges[k + 1]
        for ai, anchor in enumerate(geo.anchors):
            z, B = anchor.z, anchor.basis
            dim = B.shape[1]
            U = _shell_points(rng, per_anchor, dim, inner)
            cand = z + rho * U @ B.T
            vals = np.linalg.norm(F.eval_many(cand), axis=1)
            feas = X.violation_many(cand) <= dc.restore_tol
            if not np.all(feas):
                for i in np.flatnonzero(~feas):
                    s = _onto(X, cand[i], dc)
                    if s is None:
                        vals[i] = math.inf
                    else:
                        cand[i] = s
                        vals[i] = F.norm(s)
            ok = np.isfinite(vals)
            if geo.exact:
                dists = geo.distances(cand[ok])
                for d, v in zip(dists, vals[ok]):
                    if v == 0:
                        zeros += 1
                    points.append((float(d), float(v)))
            # refine the best candidates, plus the best point of the previous shell rescaled
            idx = [i for i in np.argsort(vals) if np.isfinite(vals[i])][: cfg.refine]
            starts = [np.clip(np.linalg.lstsq(B, (cand[i] - z) / rho, rcond=None)[0], -1, 1) for i in idx]
            if ai in prev:
                # direction of the previous shell's best point at several radii of this shell
                w_prev, rho_prev = prev[ai]
                u = w_prev / max(np.linalg.norm(w_prev), 1e-300)
                starts.extend(r * u for r in (inner * (1 + 1e-3), 0.5 * (1 + inner), 1 - 1e-3))
                # the same point in this shell's coordinates, when it is inside the shell
                same = w_prev * (rho_prev / rho)
                if inner <= np.linalg.norm(same) <= 1:
                    starts.append(same)
            best_w, best_v = None, math.inf
            for w0 in starts:
                if np.linalg.norm(w0) < inner:
                    w0 = w0 / max(np.linalg.norm(w0), 1e-12) * (0.5 * (1 + inner))
                A, c = rho * B, z
                cons = _Constraints()
                x0 = A @ w0 + c
                cons.add(X.pieces[_best_piece(X, x0)], A, c)
                obj = _log_norm_objective(F, A, c)
                w = _slsqp(obj, w0, cons.build(w0, _shell_ineq(dim, 0, inner)))
                # SLSQP can leave a narrow valley; never return worse than a feasible start
                n0 = np.linalg.norm(w0)
                if (inner <= n0 <= 1 and X.violation(A @ w0 + c) <= dc.restore_tol
                        and obj(w0)[0] < obj(w)[0]):
                    w = w0
                x = _onto(X, A @ w + c, dc)
                if x is None:
                    continue
                v = F.norm(x)
                d = geo.distance(x, warm=[z])
                if v == 0:
                    zeros += 1
                hints[len(points)] = k
                points.append((d, v))
                if v < best_v:
                    best_v, best_w = v, w
            if best_w is not None:
                prev[ai] = (best_w, rho)
    if zeros:
        warn.append(f"{zeros} sampled points had |F| = 0 and were excluded")
    return points, hints


def estimate_local_map_exponent(F: PolyMap, X, a, Z=None, cfg: SamplingConfig | None = None) -> ExponentEstimate:
    """Estimate the local exponent of ``F|X`` at ``a``.

    ``Z`` is the zero set ``X ∩ F^-1(0)``; when omitted it is presented as the
    conjunction of ``X`` with the component equations.
    """
    cfg = cfg or SamplingConfig()
    X = as_set(X)
    a = np.asarray(a, dtype=float)
    if F.num_vars != X.num_vars or a.shape != (X.num_vars,):
        raise ValueError("dimension mismatch between map, set and point")
    if not membership(X, a, 1e-9):
        raise ValueError("the base point is not in X")
    kind = EstimateKind.LOCAL
    Z = zero_set(F, X) if Z is None else as_set(Z)
    edges = cfg.edges(kind)
    rng = _rng(cfg, 1)
    warn: list[str] = []
    if not membership(Z, a, 1e-9):
        # a is not a zero: |F| is bounded below and dist(x, Z) is about constant near a
        warn.append("base point is not in the zero set")
    geo = _ZeroGeometry(Z, a, edges[-1], edges[0], cfg, rng)
    G, c = _normalized(F)
    points, hints = _map_shell_search(G, X, geo, edges, True, cfg, rng, warn)
    points = [(d, c * v) for d, v in points]
    records = _bin(edges, points, hints)
    if not any(r.sample_count for r in records):
        warn.append("no point of X \\ F^-1(0) found near the base point; exponent 0 by convention")
        return ExponentEstimate(0.0, kind, tuple(records), 0.0, 0.0, tuple(warn))
    return _fit(records, points, kind, warn)


def estimate_infinity_exponent(F: PolyMap, X, cfg: SamplingConfig | None = None) -> ExponentEstimate:
    """Estimate the exponent at infinity: slope of ``min |F|`` over shells of ``|x|``."""
    cfg = cfg or SamplingConfig()
    X = as_set(X)
    if F.num_vars != X.num_vars:
        raise ValueError("dimension mismatch between map and set")
    kind = EstimateKind.INFINITY
    edges = cfg.edges(kind)
    rng = _rng(cfg, 2)
    warn: list[str] = []
    # shells must lie beyond a compact zero set; shift them out past the farthest zero found
    zeros = sample_near(zero_set(F, X), np.zeros(X.num_vars), edges[-1], 32, seed=int(rng.integers(2**31)),
                        cfg=replace(cfg.distance, restore_tol=1e-9), max_attempts=64).points
    if len(zeros):
        far = float(np.max(np.linalg.norm(zeros, axis=1)))
        if far > edges[-2]:
            warn.append(f"zeros of F found at |x| = {far:.3g}; the zero set may be unbounded")
        elif far * cfg.shell_base > edges[0]:
            edges = edges * (far * cfg.shell_base / edges[0])
            warn.append(f"shells start at {edges[0]:.3g}, past the zeros of F")
    geo = _ZeroGeometry.point(np.zeros(X.num_vars), cfg)
    G, c = _normalized(F)
    points, hints = _map_shell_search(G, X, geo, edges, False, cfg, rng, warn)
    points = [(d, c * v) for d, v in points]
    records = _bin(edges, points, hints)
    if not any(r.sample_count for r in records):
        raise EstimationError("no points of X in the outer shells; X looks bounded at these scales")
    return _fit(records, points, kind, warn)


# separation


def _separation_search(X, Y, geo: _ZeroGeometry, edges, cfg: SamplingConfig, rng, warn):
    points: list[tuple[float, float]] = []
    hints: dict[int, int] = {}
    b = cfg.shell_base
    inner = 1.0 / b
    dc = cfg.distance
    K = len(edges) - 1
    n = X.num_vars
    per_anchor = max(cfg.samples_per_shell // len(geo.anchors), 8)
    prev: dict[int, np.ndarray] = {}
    for k in range(K - 1, -1, -1):
        rho = edges[k + 1]
        for ai, anchor in enumerate(geo.anchors):
            z, B = anchor.z, anchor.basis
            dim = B.shape[1]
            U = _shell_points(rng, per_anchor, dim, inner)
            cand = z + rho * U @ B.T
            proxies = []
            for x in cand:
                p, q = _onto(X, x, dc), _onto(Y, x, dc)
                if p is None or q is None:
                    proxies.append((math.inf, x, p, q))
                else:
                    proxies.append((np.linalg.norm(x - p) + np.linalg.norm(x - q), x, p, q))
            proxies.sort(key=lambda t: t[0])
            starts = []
            for val, x, p, q in proxies[: cfg.refine]:
                if not math.isfinite(val):
                    continue
                u = np.linalg.lstsq(B, (x - z) / rho, rcond=None)[0]
                starts.append(np.concatenate([u, (p - x) / rho, (q - x) / rho]))
            if ai in prev:
                starts.append(prev[ai])
            best_w, best_v = None, math.inf
            for w0 in starts:
                # x = z + rho B u,  p = x + rho vp,  q = x + rho vq
                D = dim + 2 * n
                Ax = np.zeros((n, D))
                Ax[:, :dim] = rho * B
                Ap = Ax.copy()
                Ap[:, dim:dim + n] = rho * np.eye(n)
                Aq = Ax.copy()
                Aq[:, dim + n:] = rho * np.eye(n)

                def obj(w):
                    vp, vq = w[dim:dim + n], w[dim + n:]
                    s = vp @ vp + vq @ vq + _TINY
                    g = np.zeros_like(w)
                    g[dim:dim + n] = 2 * vp / s
                    g[dim + n:] = 2 * vq / s
                    return math.log(s), g

                cons = _Constraints()
                cons.add(X.pieces[_best_piece(X, Ap @ w0 + z)], Ap, z)
                cons.add(Y.pieces[_best_piece(Y, Aq @ w0 + z)], Aq, z)
                w = _slsqp(obj, w0, cons.build(w0, _shell_ineq(dim, 0, inner)))
                # the objective is unbounded below when X and Y share a sheet; stay in the shell
                if not inner * (1 - 1e-6) <= np.linalg.norm(w[:dim]) <= 1 + 1e-6:
                    w = w0
                x = Ax @ w + z
                try:
                    dX = approx_distance(X, x, dc, warm_starts=[Ap @ w + z]).value
                    dY = approx_distance(Y, x, dc, warm_starts=[Aq @ w + z]).value
                except InfeasibleError:
                    continue
                d = geo.distance(x, warm=[z])
                hints[len(points)] = k
                points.append((d, dX + dY))
                if dX + dY < best_v:
                    best_v, best_w = dX + dY, w
            if best_w is not None:
                prev[ai] = best_w
    return points, hints


def estimate_separation_exponent(X, Y, a, cfg: SamplingConfig | None = None, intersection=None) -> ExponentEstimate:
    """Estimate the exponent ``p`` in ``dist(x,X) + dist(x,Y) >= C dist(x, X∩Y)^p`` near ``a``."""
    cfg = cfg or SamplingConfig()
    X, Y = as_set(X), as_set(Y)
    a = np.asarray(a, dtype=float)
    if X.num_vars != Y.num_vars or a.shape != (X.num_vars,):
        raise ValueError("dimension mismatch between sets and point")
    if not (membership(X, a, 1e-9) and membership(Y, a, 1e-9)):
        raise ValueError("the base point must lie in X ∩ Y")
    kind = EstimateKind.SEPARATION_LOCAL
    Z = X.intersect(Y) if intersection is None else as_set(intersection)
    edges = cfg.edges(kind)
    rng = _rng(cfg, 3)
    warn: list[str] = []
    geo = _ZeroGeometry(Z, a, edges[-1], edges[0], cfg, rng)
    points, hints = _separation_search(X, Y, geo, edges, cfg, rng, warn)
    zeros = sum(1 for d, v in points if v == 0 and d > 0)
    if zeros:
        warn.append(f"{zeros} points with dist(x,X) + dist(x,Y) = 0 off the intersection were excluded")
    records = _bin(edges, points, hints)
    return _fit(records, points, kind, warn)


@dataclass(frozen=True)
class GlobalSeparationResult:
    constant: float  # inf over samples of the ratio; may underflow/overflow, see log_constant
    log_constant: float
    witness: np.ndarray
    samples: int
    counterexample: bool
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"constant": self.constant, "log_constant": self.log_constant, "witness": self.witness.tolist(),
                "samples": self.samples, "counterexample": self.counterexample, "warnings": list(self.warnings)}


def estimate_global_separation(X, Y, d: int, p, cfg: SamplingConfig | None = None, center=None,
                               samples: int = 96) -> GlobalSeparationResult:
    """Smallest sampled ratio ``(dist(x,X) + dist(x,Y)) / (dist(x,X∩Y) / (1 + |x|^d))^p``.

    Points are drawn on log-spaced radii from the local scale floor up to the
    outer shells of the at-infinity scale, plus points near ``X ∩ Y``. An empty
    intersection (no feasible point found) is given distance 1.
    """
    cfg = cfg or SamplingConfig()
    X, Y = as_set(X), as_set(Y)
    n = X.num_vars
    p = float(p)
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)
    rng = _rng(cfg, 4)
    Z = X.intersect(Y)
    dc = cfg.distance
    lo = cfg.scale_floor(EstimateKind.LOCAL)
    hi = cfg.shell_base ** cfg.shell_count
    radii = np.exp(rng.uniform(math.log(lo), math.log(hi), samples))
    dirs = rng.standard_normal((samples, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = list(center + radii[:, None] * dirs)
    near = sample_near(Z, center, 1.0, 8, seed=int(rng.integers(2**31)), cfg=dc, max_attempts=32)
    for z in near.points:
        for r in np.logspace(math.log10(lo), 0, 4):
            v = rng.standard_normal(n)
            pts.append(z + r * v / np.linalg.norm(v))
    warn: list[str] = []
    empty = False
    best = (math.inf, None)
    used = 0
    top = max([q.degree for S in (X, Y) for pc in S.pieces for q in pc.ineqs + pc.eqs] + [1])
    for x in pts:
        # residuals of far points carry rounding of order |x|^deg; scale the acceptance test with it
        dx = replace(dc, restore_tol=max(dc.restore_tol, 1e-13 * (1 + np.linalg.norm(x)) ** top))
        lhs = approx_distance(X, x, dx).value + approx_distance(Y, x, dx).value
        try:
            dz = approx_distance(Z, x, dx).value
        except InfeasibleError:
            dz, empty = 1.0, True
        if dz == 0:
            continue
        used += 1
        if lhs == 0:
            best = (-math.inf, x)
            break
        lr = math.log(lhs) - p * (math.log(dz) - math.log1p(np.linalg.norm(x) ** d))
        if lr < best[0]:
            best = (lr, x)
    if empty:
        warn.append("no point of X ∩ Y found; treated as empty with dist = 1")
    lc, wit = best
    if wit is None:
        raise EstimationError("every sample was on X ∩ Y")
    const = math.exp(lc) if lc < 700 else math.inf
    return GlobalSeparationResult(const, lc, np.asarray(wit), used, const <= 1e-300 or lc == -math.inf, tuple(warn))


@dataclass(frozen=True)
class Verdict:
    passed: bool
    estimate: float
    bound: float
    slack: float  # how far inside the bound the estimate is
    tolerance: float
    message: str

    def to_json(self) -> dict:
        return {"verdict": "PASS" if self.passed else "FAIL", "estimate": self.estimate, "bound": self.bound,
                "slack": self.slack, "tolerance": self.tolerance, "message": self.message}


_COMPATIBLE = {
    BoundDirection.UPPER: {EstimateKind.LOCAL, EstimateKind.SEPARATION_LOCAL, EstimateKind.SEPARATION_GLOBAL},
    BoundDirection.LOWER: {EstimateKind.INFINITY},
}


def verify_bound(est: ExponentEstimate, bound: BoundReport, fit_tol: float = 0.1) -> Verdict:
    """PASS when the estimate sits on the right side of the bound, within ``fit_tol``."""
    if est.direction not in _COMPATIBLE[bound.direction]:
        raise ValueError(f"a {est.direction.value} estimate cannot be checked against a "
                         f"{bound.direction.value} bound ({bound.formula_id.value})")
    b = float(bound.value)
    if bound.direction is BoundDirection.UPPER:
        slack = b - est.value
    else:
        slack = est.value - b
    passed = slack >= -fit_tol
    msg = (f"{est.direction.value} estimate {est.value:.4g} vs {bound.direction.value} bound "
           f"{bound.value} ({bound.formula_id.value}): slack {slack:.4g}")
    return Verdict(passed, est.value, b, slack, fit_tol, msg)

"""Closed semialgebraic sets given by explicit presentations.

A :class:`BasicSet` is ``{g_1 >= 0, ..., g_r >= 0, h_1 = ... = h_l = 0}``; a
:class:`SemialgebraicSet` is a finite union of basic sets. Besides membership
and presentation complexity, this module provides a numerical distance oracle
(multi-start penalty descent followed by Gauss-Newton restoration) and a
sampler of points of a set near a given center.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .polynomials import ZERO_DEGREE, PolyMap, Polynomial, _Compiled

__all__ = [
    "BasicSet",
    "SemialgebraicSet",
    "PresentationComplexity",
    "DistanceConfig",
    "DistanceResult",
    "SampleResult",
    "InfeasibleError",
    "as_set",
    "complexity",
    "brocker_cap",
    "membership",
    "graph_presentation",
    "restore",
    "approx_distance",
    "sample_near",
]

logger = logging.getLogger(__name__)


class InfeasibleError(RuntimeError):
    """No point of the set was found by any start or sample."""

    def __init__(self, message: str, best_violation: float):
        super().__init__(f"{message} (best violation {best_violation:.3e})")
        self.best_violation = best_violation


def _check_dim(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"point of shape {x.shape} does not live in R^{n}")
    return x


@dataclass(frozen=True)
class BasicSet:
    num_vars: int
    ineqs: tuple[Polynomial, ...] = ()
    eqs: tuple[Polynomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ineqs", tuple(self.ineqs))
        object.__setattr__(self, "eqs", tuple(self.eqs))
        for p in self.ineqs + self.eqs:
            if p.num_vars != self.num_vars:
                raise ValueError(f"constraint in {p.num_vars} variables inside a set in R^{self.num_vars}")

    @cached_property
    def _g(self) -> _Compiled:
        return _Compiled(self.ineqs, self.num_vars)

    @cached_property
    def _h(self) -> _Compiled:
        return _Compiled(self.eqs, self.num_vars)

    @property
    def unconstrained(self) -> bool:
        return not self.ineqs and not self.eqs

    def is_affine(self) -> bool:
        """Only equations, all of degree at most one."""
        return not self.ineqs and all(h.is_zero() or h.degree <= 1 for h in self.eqs)

    def residuals(self, x: np.ndarray) -> np.ndarray:
        """``(min(g_i, 0), h_j)``: zero exactly on the set."""
        return np.concatenate([np.minimum(self._g.values(x), 0.0), self._h.values(x)])

    def violation(self, x: np.ndarray) -> float:
        r = self.residuals(x)
        return float(np.max(np.abs(r))) if r.size else 0.0

    def violation_many(self, pts: np.ndarray) -> np.ndarray:
        r = np.concatenate(
            [np.minimum(self._g.values_many(pts), 0.0), self._h.values_many(pts)], axis=1
        )
        return np.max(np.abs(r), axis=1) if r.shape[1] else np.zeros(pts.shape[0])

    def constraint_jacobian(self, x: np.ndarray) -> np.ndarray:
        """Rows for violated inequalities and all equations, matching :meth:`residuals`."""
        gv = self._g.values(x)
        jg = self._g.jacobian(x) * (gv < 0)[:, None]
        return np.vstack([jg, self._h.jacobian(x)])

    def to_json(self) -> dict:
        return {"ineqs": [g.to_json() for g in self.ineqs], "eqs": [h.to_json() for h in self.eqs]}


@dataclass(frozen=True)
class SemialgebraicSet:
    num_vars: int
    pieces: tuple[BasicSet, ...]

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("a semialgebraic set needs at least one piece")
        for p in pieces:
            if p.num_vars != self.num_vars:
                raise ValueError("pieces live in different ambient spaces")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def basic(cls, num_vars: int, ineqs: Iterable[Polynomial] = (), eqs: Iterable[Polynomial] = ()):
        return cls(num_vars, (BasicSet(num_vars, tuple(ineqs), tuple(eqs)),))

    @classmethod
    def whole_space(cls, num_vars: int):
        return cls.basic(num_vars)

    @classmethod
    def point(cls, a: Sequence[float]):
        """``{a}`` presented by the affine equations ``x_i - a_i = 0``."""
        n = len(a)
        eqs = [Polynomial.variable(i, n) - float(a[i]) for i in range(n)]
        return cls.basic(n, eqs=eqs)

    def intersect(self, other: "SemialgebraicSet") -> "SemialgebraicSet":
        """Conjunction of the two presentations, piece by piece."""
        other = as_set(other)
        if other.num_vars != self.num_vars:
            raise ValueError("ambient dimension mismatch")
        pieces = [
            BasicSet(self.num_vars, p.ineqs + q.ineqs, p.eqs + q.eqs) for p in self.pieces for q in other.pieces
        ]
        return SemialgebraicSet(self.num_vars, tuple(pieces))

    def violation(self, x) -> float:
        x = _check_dim(x, self.num_vars)
        return min(p.violation(x) for p in self.pieces)

    def violation_many(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.min(np.stack([p.violation_many(pts) for p in self.pieces]), axis=0)

    def to_json(self) -> dict:
        return {"vars": self.num_vars, "pieces": [p.to_json() for p in self.pieces]}

    @classmethod
    def from_json(cls, data) -> "SemialgebraicSet":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = int(data["vars"])
            pieces = []
            for pc in data["pieces"]:
                ineqs = tuple(Polynomial.from_json(g) for g in pc.get("ineqs", []))
                eqs = tuple(Polynomial.from_json(h) for h in pc.get("eqs", []))
                pieces.append(BasicSet(n, ineqs, eqs))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed set JSON: {exc}") from exc
        return cls(n, tuple(pieces))


def as_set(S) -> SemialgebraicSet:
    if isinstance(S, SemialgebraicSet):
        return S
    if isinstance(S, BasicSet):
        return SemialgebraicSet(S.num_vars, (S,))
    raise TypeError(f"expected a BasicSet or SemialgebraicSet, got {type(S).__name__}")


@dataclass(frozen=True)
class PresentationComplexity:
    N: int
    r: int
    kappa: int
    dim_hint: int | None = None

    def __post_init__(self):
        if self.dim_hint is not None and not 0 <= self.dim_hint <= self.N:
            raise ValueError(f"dim_hint must lie in [0, {self.N}]")

    @property
    def dim(self) -> int:
        """User-supplied dimension, defaulting to the ambient one."""
        return self.N if self.dim_hint is None else self.dim_hint


def complexity(S, dim_hint: int | None = None) -> PresentationComplexity:
    """Inequality count and degree of this particular presentation.

    These are upper bounds for the minimal invariants over all presentations.
    """
    S = as_set(S)
    r = max(len(p.ineqs) for p in S.pieces)
    degs = [q.degree for p in S.pieces for q in p.ineqs + p.eqs]
    degs = [d for d in degs if d is not ZERO_DEGREE]
    return PresentationComplexity(S.num_vars, r, max(degs, default=0), dim_hint)


def brocker_cap(N: int) -> int:
    """Maximum inequality count a minimal presentation in ``R^N`` ever needs."""
    if N < 1:
        raise ValueError("N must be positive")
    return N * (N + 1) // 2


def membership(S, x, tol: float = 0.0) -> bool:
    S = as_set(S)
    x = _check_dim(x, S.num_vars)
    return any(p.violation(x) <= tol for p in S.pieces)


def graph_presentation(F: PolyMap, X) -> SemialgebraicSet:
    """Presentation of ``graph(F|X)`` in ``R^(N+m)`` with coordinates ``(x, y)``."""
    X = as_set(X)
    if F.num_vars != X.num_vars:
        raise ValueError(f"map on R^{F.num_vars} but set in R^{X.num_vars}")
    n, m = X.num_vars, len(F)
    graph_eqs = tuple(Polynomial.variable(n + j, n + m) - F[j].extend(m) for j in range(m))
    pieces = tuple(
        BasicSet(n + m, tuple(g.extend(m) for g in p.ineqs), tuple(h.extend(m) for h in p.eqs) + graph_eqs)
        for p in X.pieces
    )
    return SemialgebraicSet(n + m, pieces)


# numerical machinery


@dataclass(frozen=True)
class DistanceConfig:
    starts: int = 32
    restore_tol: float = 1e-9
    penalty_schedule: tuple[float, ...] = (1e1, 1e3, 1e5, 1e7)
    penalty_max: float = 1e7
    samples: int = 64
    box: float = 1.0
    seed: int = 0
    max_restore_iter: int = 100

    @property
    def schedule(self) -> tuple[float, ...]:
        return tuple(rho for rho in self.penalty_schedule if rho <= self.penalty_max)


@dataclass(frozen=True)
class DistanceResult:
    value: float
    point: np.ndarray
    piece: int
    route: str  # 'member', 'exact', 'descent' or 'sample'
    support: int  # starts that landed on the best value
    residual: float

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class SampleResult:
    points: np.ndarray
    requested: int
    attempts: int

    @property
    def partial(self) -> bool:
        return len(self.points) < self.requested


def restore(piece: BasicSet, s: np.ndarray, max_iter: int = 100) -> tuple[np.ndarray, float]:
    """Pull ``s`` onto ``piece`` by damped minimum-norm Gauss-Newton steps.

    Runs until the violation stops decreasing, so it ends near machine
    precision on regular points; returns the point and its final violation.
    """
    s = np.array(s, dtype=float)
    viol = piece.violation(s)
    for _ in range(max_iter):
        if viol == 0.0:
            break
        r = piece.residuals(s)
        J = piece.constraint_jacobian(s)
        step = -np.linalg.lstsq(J, r, rcond=None)[0]
        t = 1.0
        for _ in range(40):
            cand = s + t * step
            v = piece.violation(cand)
            if v < viol:
                break
            t *= 0.5
        else:
            break
        s, viol = cand, v
    return s, viol


def _affine_projection(piece: BasicSet, x: np.ndarray):
    A = np.array([[h.as_dict().get(tuple(np.eye(piece.num_vars, dtype=int)[i]), 0.0)
                   for i in range(piece.num_vars)] for h in piece.eqs]).reshape(-1, piece.num_vars)
    b = -np.array([h.as_dict().get((0,) * piece.num_vars, 0.0) for h in piece.eqs])
    if not len(A):
        return x.copy()
    # nearest point of {A s = b}: s = x - A^+ (A x - b)
    s = x - np.linalg.lstsq(A, A @ x - b, rcond=None)[0]
    return s


def _penalty_descent(piece: BasicSet, x: np.ndarray, s0: np.ndarray, schedule) -> np.ndarray:
    s = np.array(s0, dtype=float)
    for rho in schedule:
        def phi(v, rho=rho):
            r = piece.residuals(v)
            J = piece.constraint_jacobian(v)
            d = v - x
            return d @ d + rho * (r @ r), 2.0 * d + 2.0 * rho * (J.T @ r)

        f0 = phi(s)[0]
        if f0 == 0.0:
            continue
        scale = 1.0 / f0

        def scaled(v):
            f, g = phi(v)
            return f * scale, g * scale

        res = minimize(scaled, s, jac=True, method="L-BFGS-B",
                       options={"maxiter": 200, "ftol": 1e-15, "gtol": 1e-12})
        if np.all(np.isfinite(res.x)):
            s = res.x
    return s


def approx_distance(S, x, cfg: DistanceConfig | None = None, warm_starts=()) -> DistanceResult:
    """Upper estimate of ``dist(x, S)`` with the minimizing point.

    Route (a): multi-start penalty descent (penalty weights escalated over
    ``cfg.schedule``), each end point pulled onto the set by :func:`restore`.
    Route (b): scrambled Sobol points in the box around ``x`` spanned by the
    best route-(a) distance, each restored onto the set. Affine pieces are
    projected onto exactly. Every reported point passes membership at
    ``cfg.restore_tol``; the value is its distance to ``x``.
    """
    S = as_set(S)
    x = _check_dim(x, S.num_vars)
    cfg = cfg or DistanceConfig()
    for i, p in enumerate(S.pieces):
        if p.violation(x) <= cfg.restore_tol:
            return DistanceResult(0.0, x.copy(), i, "member", 1, p.violation(x))

    rng = np.random.default_rng(cfg.seed)
    n = S.num_vars
    found: list[tuple[float, int, str, np.ndarray, float]] = []
    best_viol = math.inf

    def consider(i, s, viol, route):
        nonlocal best_viol
        best_viol = min(best_viol, viol)
        if viol <= cfg.restore_tol:
            found.append((float(np.linalg.norm(s - x)), i, route, s, viol))

    warm = [np.asarray(w, dtype=float) for w in warm_starts]
    for i, piece in enumerate(S.pieces):
        if piece.is_affine():
            s = _affine_projection(piece, x)
            consider(i, s, piece.violation(s), "exact")
            continue
        n_rand = max(cfg.starts - 1 - len(warm), 0)
        sigmas = cfg.box * np.logspace(-3, 0, n_rand) if n_rand else []
        starts = [x] + warm + [x + sg * rng.standard_normal(n) for sg in sigmas]
        for s0 in starts:
            s = _penalty_descent(piece, x, s0, cfg.schedule)
            s, viol = restore(piece, s, cfg.max_restore_iter)
            consider(i, s, viol, "descent")

    if cfg.samples > 0:
        half = min(f[0] for f in found) if found else cfg.box
        half = max(half, 1e-300)
        m = max(int(math.ceil(math.log2(cfg.samples))), 0)
        sobol = qmc.Sobol(d=n, scramble=True, seed=int(rng.integers(2**31)))
        pts = x + half * (2.0 * sobol.random_base2(m) - 1.0)
        for i, piece in enumerate(S.pieces):
            if piece.is_affine():
                continue
            for s0 in pts:
                s, viol = restore(piece, s0, cfg.max_restore_iter)
                consider(i, s, viol, "sample")

    if not found:
        raise InfeasibleError("no feasible point found for the distance oracle", best_viol)
    found.sort(key=lambda f: f[0])
    value, piece_idx, route, point, viol = found[0]
    support = sum(1 for f in found if f[0] <= value * (1 + 1e-6) + 1e-300)
    return DistanceResult(value, point, piece_idx, route, support, viol)


def _ball(rng, center, radius, count):
    n = len(center)
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    rad = radius * rng.random(count) ** (1.0 / n)
    return center + d * rad[:, None]


def sample_near(S, center, radius: float, count: int, seed=0, cfg: DistanceConfig | None = None,
                max_attempts: int | None = None) -> SampleResult:
    """Up to ``count`` points of ``S`` within ``radius`` of ``center``.

    Uniform ball points are restored onto a piece chosen at random; points that
    leave the ball or fail membership are discarded, never returned.
    """
    S = as_set(S)
    center = _check_dim(center, S.num_vars)
    cfg = cfg or DistanceConfig()
    rng = np.random.default_rng(seed)
    max_attempts = max_attempts or 8 * count
    if any(p.unconstrained for p in S.pieces):
        return SampleResult(_ball(rng, center, radius, count), count, count)
    kept = []
    attempts = 0
    while len(kept) < count and attempts < max_attempts:
        batch = _ball(rng, center, radius, count)
        choice = rng.integers(len(S.pieces), size=count)
        for s0, i in zip(batch, choice):
            attempts += 1
            s, viol = restore(S.pieces[i], s0, cfg.max_restore_iter)
            if viol <= cfg.restore_tol and np.linalg.norm(s - center) <= radius:
                kept.append(s)
                if len(kept) == count or attempts >= max_attempts:
                    break
    pts = np.array(kept).reshape(-1, S.num_vars)
    if len(pts) < count:
        logger.warning("sample_near: found %d of %d requested points", len(pts), count)
    return SampleResult(pts, count, attempts)

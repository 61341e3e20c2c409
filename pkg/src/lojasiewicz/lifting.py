"""Slack-variable algebraization of basic semialgebraic sets.

Each inequality ``g_j >= 0`` becomes the equation ``g_j(x) - y_j^2 = 0`` in an
extended space, so a basic set is the coordinate projection of an algebraic
set. For a pair ``(X, Y)`` the two sets receive disjoint blocks of slack
variables, which is what lets one slack vector serve a point of ``X`` and a
point of ``Y`` at the same time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polynomials import ZERO_DEGREE, Polynomial, subtract_square_slack
from .semisets import (BasicSet, DistanceConfig, SemialgebraicSet, approx_distance, as_set, membership)

__all__ = [
    "AlgebraicLift",
    "NotInSetError",
    "algebraize",
    "algebraize_pair",
    "lift_point",
    "joint_lift",
    "DistanceTransferReport",
    "distance_transfer_check",
]


class NotInSetError(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraicLift:
    source: BasicSet
    ambient_vars: int
    slack_range: range  # 0-based positions inside the slack vector y
    equations: tuple[Polynomial, ...]

    @property
    def num_slacks(self) -> int:
        return self.ambient_vars - self.source.num_vars

    @property
    def degree_cap(self) -> int:
        degs = [e.degree for e in self.equations if e.degree is not ZERO_DEGREE]
        return max(degs, default=0)

    def as_set(self) -> SemialgebraicSet:
        return SemialgebraicSet.basic(self.ambient_vars, eqs=self.equations)

    def project(self, p) -> np.ndarray:
        return np.asarray(p, dtype=float)[: self.source.num_vars]

    def residuals(self, x, y) -> np.ndarray:
        p = np.concatenate([np.asarray(x, float), np.asarray(y, float)])
        return np.array([e(p) for e in self.equations])

    def to_json(self) -> dict:
        return {
            "ambient_vars": self.ambient_vars,
            "slack_range": [self.slack_range.start, self.slack_range.stop],
            "equations": [e.to_json() for e in self.equations],
            "degree_cap": self.degree_cap,
        }


def _basic(X) -> BasicSet:
    if isinstance(X, BasicSet):
        return X
    S = as_set(X)
    if len(S.pieces) != 1:
        raise ValueError("algebraization works on basic sets; lift a union piece by piece")
    return S.pieces[0]


def _lift(X: BasicSet, offset: int, r_total: int) -> AlgebraicLift:
    lifted = tuple(subtract_square_slack(g, offset + j + 1, r_total) for j, g in enumerate(X.ineqs))
    eqs = tuple(h.extend(r_total) for h in X.eqs)
    return AlgebraicLift(X, X.num_vars + r_total, range(offset, offset + len(X.ineqs)), lifted + eqs)


def algebraize(X) -> AlgebraicLift:
    X = _basic(X)
    return _lift(X, 0, len(X.ineqs))


def algebraize_pair(X, Y) -> tuple[AlgebraicLift, AlgebraicLift]:
    """Lifts ``A`` of ``X`` and ``B`` of ``Y`` in a shared space ``R^N x R^(r1 + r2)``.

    ``A`` owns slacks ``y_1..y_r1`` and ``B`` owns ``y_(r1+1)..y_(r1+r2)``.
    """
    X, Y = _basic(X), _basic(Y)
    if X.num_vars != Y.num_vars:
        raise ValueError(f"X lives in R^{X.num_vars} but Y in R^{Y.num_vars}")
    r1, r2 = len(X.ineqs), len(Y.ineqs)
    return _lift(X, 0, r1 + r2), _lift(Y, r1, r1 + r2)


def lift_point(L: AlgebraicLift, x, tol: float = 1e-9) -> np.ndarray:
    """Slack vector with ``y_j = sqrt(g_j(x))`` on this lift's block and zeros elsewhere."""
    x = np.asarray(x, dtype=float)
    if not membership(L.source, x, tol):
        bad = [j for j, g in enumerate(L.source.ineqs) if g(x) < -tol]
        raise NotInSetError(f"point is not in the source set (violated inequalities {bad})")
    y = np.zeros(L.num_slacks)
    for j, g in zip(L.slack_range, L.source.ineqs):
        y[j] = np.sqrt(max(g(x), 0.0))
    return y


def joint_lift(A: AlgebraicLift, B: AlgebraicLift, x1, x2, tol: float = 1e-9) -> np.ndarray:
    """One slack vector ``y`` with ``(x1, y)`` on ``A`` and ``(x2, y)`` on ``B``."""
    if A.ambient_vars != B.ambient_vars or set(A.slack_range) & set(B.slack_range):
        raise ValueError("A and B must share the ambient space and own disjoint slack blocks")
    return lift_point(A, x1, tol) + lift_point(B, x2, tol)


@dataclass(frozen=True)
class DistanceTransferReport:
    dist_to_set: float  # |x - x1|, the oracle's distance from x to the source set
    nearest: np.ndarray  # x1
    slacks: tuple  # one lifted slack vector per trial (random sign patterns)
    lifted_distances: tuple  # oracle distance from (x, y) to the lift, per trial
    margin: float  # min over trials of dist_to_set - lifted distance

    @property
    def holds(self) -> bool:
        return self.margin >= -1e-6


def distance_transfer_check(A: AlgebraicLift, x, trials: int = 4, seed=0,
                            cfg: DistanceConfig | None = None) -> DistanceTransferReport:
    """Compare ``dist(x, X)`` with ``dist((x, y), A)`` for slack vectors lifting the nearest point.

    Any sign pattern of the slacks lifts ``x1``; each trial draws one.
    """
    x = np.asarray(x, dtype=float)
    cfg = cfg or DistanceConfig(seed=seed)
    if membership(A.source, x, cfg.restore_tol):
        raise ValueError("x lies in the source set; both distances vanish")
    res = approx_distance(A.source, x, cfg)
    x1 = res.point
    y0 = lift_point(A, x1, tol=max(cfg.restore_tol, 1e-9))
    rng = np.random.default_rng(seed)
    lifted_set = A.as_set()
    slacks, dists = [], []
    for t in range(max(trials, 1)):
        signs = np.ones_like(y0) if t == 0 else rng.choice([-1.0, 1.0], size=y0.shape)
        y = signs * y0
        p = np.concatenate([x, y])
        on_lift = np.concatenate([x1, y])
        lres = approx_distance(lifted_set, p, cfg, warm_starts=[on_lift])
        d = lres.value
        # (x1, y) itself is a point of the lift
        if membership(lifted_set, on_lift, cfg.restore_tol):
            d = min(d, float(np.linalg.norm(p - on_lift)))
        slacks.append(y)
        dists.append(d)
    margin = min(res.value - d for d in dists)
    return DistanceTransferReport(res.value, x1, tuple(slacks), tuple(dists), margin)

"""Seeded random instances for the bound consistency sweep."""

import itertools

import numpy as np

from lojasiewicz.polynomials import PolyMap, Polynomial
from lojasiewicz.semisets import SemialgebraicSet


def random_poly(rng, n, deg, constant=None):
    coeffs = {}
    for e in itertools.product(range(deg + 1), repeat=n):
        if sum(e) <= deg and rng.random() < 0.6:
            coeffs[e] = rng.uniform(-1, 1)
    top = [e for e in itertools.product(range(deg + 1), repeat=n) if sum(e) == deg]
    coeffs[top[rng.integers(len(top))]] = rng.uniform(0.5, 1) * rng.choice([-1, 1])
    zero = (0,) * n
    if constant is None:
        coeffs.pop(zero, None)
    else:
        coeffs[zero] = constant
    return Polynomial(n, coeffs)


def instance(seed):
    """(F, X, N, r, deg F, kappa X) with F(0) = 0 and 0 in X; N <= 3, degrees <= 3, r <= 2."""
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 4))
    r = int(rng.integers(0, 3))
    m = int(rng.integers(1, 3))
    F = PolyMap([random_poly(rng, N, int(rng.integers(1, 4))) for _ in range(m)])
    ineqs = [random_poly(rng, N, int(rng.integers(1, 4)), constant=rng.uniform(0, 1)) for _ in range(r)]
    X = SemialgebraicSet.basic(N, ineqs=ineqs)
    kappa = max((g.degree for g in ineqs), default=0)
    return F, X, N, r, F.degree, kappa

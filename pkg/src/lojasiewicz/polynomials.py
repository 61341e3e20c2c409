"""Sparse real multivariate polynomials and polynomial maps.

Terms are kept in graded lexicographic order with zero coefficients dropped,
so two equal polynomials always have identical term tuples and identical JSON.

    >>> x, y = variables(2)
    >>> p = x**3 * y**2 + x
    >>> p([2.0, 1.0])
    10.0
    >>> degree(p)
    5
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from numbers import Real
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "ZERO_DEGREE",
    "Monomial",
    "Polynomial",
    "PolyMap",
    "variables",
    "degree",
    "gradient",
    "compose_linear",
    "subtract_square_slack",
]


class _ZeroDegree:
    """Degree marker for the zero polynomial.

    Deliberately not a number: comparing or adding it to an int raises, so it
    cannot leak into a bound formula.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO_DEGREE"

    def __reduce__(self):
        return (_ZeroDegree, ())


ZERO_DEGREE = _ZeroDegree()


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


@dataclass(frozen=True)
class Monomial:
    coefficient: float
    exponents: tuple[int, ...]

    def __post_init__(self):
        if self.coefficient == 0:
            raise ValueError("monomials with zero coefficient are not stored")
        if any(e < 0 for e in self.exponents):
            raise ValueError("exponents must be nonnegative")

    @property
    def degree(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Polynomial in ``num_vars`` real variables.

    Build one from an ``{exponent_tuple: coefficient}`` mapping, or use
    :func:`variables` together with ``+``, ``-``, ``*`` and ``**``.
    """

    num_vars: int
    terms: tuple[Monomial, ...] = field(default=())

    def __init__(self, num_vars: int, coeffs: Mapping[Sequence[int], float] | None = None):
        if num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        acc: dict[tuple[int, ...], float] = {}
        for exps, c in (coeffs or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != num_vars:
                raise ValueError(f"exponent vector {exps} does not have length {num_vars}")
            acc[exps] = acc.get(exps, 0.0) + float(c)
        terms = tuple(
            Monomial(c, e) for e, c in sorted(acc.items(), key=lambda kv: _grlex_key(kv[0])) if c != 0
        )
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "terms", terms)

    # construction helpers

    @classmethod
    def constant(cls, value: float, num_vars: int) -> "Polynomial":
        return cls(num_vars, {(0,) * num_vars: value})

    @classmethod
    def zero(cls, num_vars: int) -> "Polynomial":
        return cls(num_vars)

    @classmethod
    def variable(cls, index: int, num_vars: int) -> "Polynomial":
        if not 0 <= index < num_vars:
            raise IndexError(f"variable index {index} out of range for {num_vars} variables")
        e = [0] * num_vars
        e[index] = 1
        return cls(num_vars, {tuple(e): 1.0})

    def as_dict(self) -> dict[tuple[int, ...], float]:
        return {t.exponents: t.coefficient for t in self.terms}

    # basic properties

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self):
        if not self.terms:
            return ZERO_DEGREE
        return max(t.degree for t in self.terms)

    def homogeneous_part(self, deg: int) -> "Polynomial":
        return Polynomial(self.num_vars, {t.exponents: t.coefficient for t in self.terms if t.degree == deg})

    def extend(self, extra_vars: int) -> "Polynomial":
        """The same polynomial viewed in ``num_vars + extra_vars`` variables."""
        pad = (0,) * extra_vars
        return Polynomial(self.num_vars + extra_vars, {t.exponents + pad: t.coefficient for t in self.terms})

    # arithmetic

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.num_vars != self.num_vars:
                raise ValueError(f"variable count mismatch: {self.num_vars} vs {other.num_vars}")
            return other
        if isinstance(other, Real):
            return Polynomial.constant(float(other), self.num_vars)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = self.as_dict()
        for t in other.terms:
            acc[t.exponents] = acc.get(t.exponents, 0.0) + t.coefficient
        return Polynomial(self.num_vars, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.num_vars, {t.exponents: -t.coefficient for t in self.terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[tuple[int, ...], float] = {}
        for a in self.terms:
            for b in other.terms:
                e = tuple(i + j for i, j in zip(a.exponents, b.exponents))
                acc[e] = acc.get(e, 0.0) + a.coefficient * b.coefficient
        return Polynomial(self.num_vars, acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Real):
            return NotImplemented
        return self * (1.0 / float(other))

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers are supported")
        result = Polynomial.constant(1.0, self.num_vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.num_vars, self.terms))

    def __repr__(self):
        if not self.terms:
            return f"Polynomial({self.num_vars}, 0)"
        parts = []
        for t in self.terms:
            mono = "*".join(
                f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(t.exponents) if e
            )
            parts.append(f"{t.coefficient:g}" + (f"*{mono}" if mono else ""))
        return f"Polynomial({self.num_vars}, {' + '.join(parts)})"

    # evaluation

    @cached_property
    def _exps(self) -> np.ndarray:
        return np.array([t.exponents for t in self.terms], dtype=np.int64).reshape(-1, self.num_vars)

    @cached_property
    def _coefs(self) -> np.ndarray:
        return np.array([t.coefficient for t in self.terms], dtype=float)

    def _check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.num_vars,):
            raise ValueError(f"point has dimension {x.shape[-1:]} but polynomial has {self.num_vars} variables")
        return x

    def __call__(self, x) -> float:
        x = self._check_point(x)
        if x.ndim != 1:
            raise ValueError("use eval_many for batches of points")
        if not self.terms:
            return 0.0
        return float(np.sum(np.prod(x ** self._exps, axis=1) * self._coefs))

    def eval_many(self, points) -> np.ndarray:
        points = self._check_point(np.atleast_2d(points))
        if not self.terms:
            return np.zeros(points.shape[0])
        monos = np.prod(points[:, None, :] ** self._exps[None, :, :], axis=2)
        return np.sum(monos * self._coefs, axis=1)

    def derivative(self, index: int) -> "Polynomial":
        acc = {}
        for t in self.terms:
            e = t.exponents[index]
            if e:
                ne = list(t.exponents)
                ne[index] -= 1
                acc[tuple(ne)] = t.coefficient * e
        return Polynomial(self.num_vars, acc)

    @cached_property
    def _gradient(self) -> tuple["Polynomial", ...]:
        return tuple(self.derivative(i) for i in range(self.num_vars))

    # serialization

    def to_json(self) -> dict:
        return {"vars": self.num_vars, "terms": [[t.coefficient, list(t.exponents)] for t in self.terms]}

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            n = int(data["vars"])
            terms = data["terms"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: {data!r}") from exc
        acc: dict[tuple[int, ...], float] = {}
        for coef, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"term exponents {exps} do not match vars={n}")
            acc[exps] = acc.get(exps, 0.0) + float(coef)
        return cls(n, acc)


def variables(num_vars: int) -> tuple[Polynomial, ...]:
    """Coordinate functions ``x_0, ..., x_{N-1}``."""
    return tuple(Polynomial.variable(i, num_vars) for i in range(num_vars))


def degree(p: Polynomial):
    """Total degree, or :data:`ZERO_DEGREE` for the zero polynomial."""
    return p.degree


def gradient(p: Polynomial) -> tuple[Polynomial, ...]:
    return p._gradient


class _Compiled:
    """Shared monomial basis for evaluating several polynomials at once."""

    def __init__(self, polys: Sequence[Polynomial], num_vars: int):
        basis: dict[tuple[int, ...], int] = {}
        for p in polys:
            for t in p.terms:
                basis.setdefault(t.exponents, len(basis))
        self.num_vars = num_vars
        self.exps = np.array(list(basis), dtype=np.int64).reshape(-1, num_vars)
        self.coefs = np.zeros((len(polys), len(basis)))
        for i, p in enumerate(polys):
            for t in p.terms:
                self.coefs[i, basis[t.exponents]] = t.coefficient
        # d/dx_i x^e = e_i x^(e - e_i); exponent floored at 0 where e_i = 0 (the factor e_i kills it)
        self.dexps = np.maximum(self.exps[None, :, :] - np.eye(num_vars, dtype=np.int64)[:, None, :], 0)
        self.dfac = self.exps.T.astype(float)

    def values(self, x: np.ndarray) -> np.ndarray:
        if not len(self.exps):
            return np.zeros(self.coefs.shape[0])
        monos = np.prod(x ** self.exps, axis=1)
        return self.coefs @ monos

    def values_many(self, pts: np.ndarray) -> np.ndarray:
        if not len(self.exps):
            return np.zeros((pts.shape[0], self.coefs.shape[0]))
        monos = np.prod(pts[:, None, :] ** self.exps[None, :, :], axis=2)
        return monos @ self.coefs.T

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        if not len(self.exps):
            return np.zeros((self.coefs.shape[0], self.num_vars))
        dmonos = self.dfac * np.prod(x ** self.dexps, axis=2)  # (N, T)
        return self.coefs @ dmonos.T


@dataclass(frozen=True, eq=False)
class PolyMap:
    """Polynomial map ``F = (f_1, ..., f_m): R^N -> R^m``."""

    num_vars: int
    components: tuple[Polynomial, ...]

    def __init__(self, components: Iterable[Polynomial], num_vars: int | None = None):
        comps = tuple(components)
        if not comps:
            raise ValueError("a PolyMap needs at least one component")
        n = comps[0].num_vars if num_vars is None else num_vars
        for c in comps:
            if c.num_vars != n:
                raise ValueError(f"component has {c.num_vars} variables, expected {n}")
        object.__setattr__(self, "num_vars", n)
        object.__setattr__(self, "components", comps)

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.num_vars == other.num_vars and self.components == other.components

    def __hash__(self):
        return hash((self.num_vars, self.components))

    def __repr__(self):
        return f"PolyMap({list(self.components)!r})"

    @property
    def degree(self):
        degs = [c.degree for c in self.components if not c.is_zero()]
        return max(degs) if degs else ZERO_DEGREE

    def degrees(self) -> list:
        return [c.degree for c in self.components]

    @cached_property
    def _compiled(self) -> _Compiled:
        return _Compiled(self.components, self.num_vars)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.num_vars,):
            raise ValueError(f"point has shape {x.shape}, expected ({self.num_vars},)")
        return self._compiled.values(x)

    def eval_many(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.num_vars:
            raise ValueError(f"points have dimension {points.shape[1]}, expected {self.num_vars}")
        return self._compiled.values_many(points)

    def jacobian(self, x) -> np.ndarray:
        """Matrix of partial derivatives, shape ``(m, N)``."""
        return self._compiled.jacobian(np.asarray(x, dtype=float))

    def norm(self, x) -> float:
        return float(np.linalg.norm(self(x)))

    def to_json(self) -> dict:
        return {"vars": self.num_vars, "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, data) -> "PolyMap":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            comps = [Polynomial.from_json(c) for c in data["components"]]
            n = int(data["vars"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed map JSON: {data!r}") from exc
        return cls(comps, num_vars=n)


def compose_linear(F: PolyMap, L) -> PolyMap:
    """Return ``L o F`` for a ``k x m`` matrix ``L``."""
    L = np.atleast_2d(np.asarray(L, dtype=float))
    if L.shape[1] != len(F) or L.shape[0] < 1:
        raise ValueError(f"matrix of shape {L.shape} cannot act on a map with {len(F)} components")
    out = []
    for row in L:
        acc: dict[tuple[int, ...], float] = {}
        for a, f in zip(row, F.components):
            if a == 0:
                continue
            for t in f.terms:
                acc[t.exponents] = acc.get(t.exponents, 0.0) + a * t.coefficient
        out.append(Polynomial(F.num_vars, acc))
    return PolyMap(out, num_vars=F.num_vars)


def subtract_square_slack(g: Polynomial, j: int, r: int) -> Polynomial:
    """``g(x) - y_j**2`` in ``R^(N + r)``; ``j`` is 1-based, as in ``y_1, ..., y_r``."""
    if not 1 <= j <= r:
        raise IndexError(f"slack index {j} outside 1..{r}")
    e = [0] * (g.num_vars + r)
    e[g.num_vars + j - 1] = 2
    return g.extend(r) - Polynomial(g.num_vars + r, {tuple(e): 1.0})

"""Effective exponent bounds, evaluated exactly.

Every function takes integer complexity data (ambient dimension ``N``,
inequality count ``r``, degree ``d`` ...) and returns exact integers or a
:class:`BoundReport` holding a :class:`fractions.Fraction`. Nothing here
touches a float; the numbers grow like ``d (6d-3)^(N+r-1)`` and overflow
fixed-width integers almost immediately.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Sequence

__all__ = [
    "FormulaId",
    "Direction",
    "BoundReport",
    "BoundInputError",
    "local_separation_bound",
    "isolated_separation_bound",
    "separation_bound",
    "local_map_bound",
    "regular_local_bound",
    "global_separation_bound",
    "infinity_semialgebraic_map_bound",
    "infinity_polynomial_map_bound",
    "infinity_regular_bound",
    "b_product",
    "reference_complex_bounds",
    "ks_bounds",
]


class BoundInputError(ValueError):
    pass


class FormulaId(str, enum.Enum):
    LOCAL_SEP = "LOCAL_SEP"
    LOCAL_SEP_ISOLATED = "LOCAL_SEP_ISOLATED"
    LOCAL_MAP = "LOCAL_MAP"
    LOCAL_MAP_ISOLATED = "LOCAL_MAP_ISOLATED"
    REGULAR_LOCAL_REAL = "REGULAR_LOCAL_REAL"
    REGULAR_LOCAL_COMPLEX = "REGULAR_LOCAL_COMPLEX"
    GLOBAL_SEP = "GLOBAL_SEP"
    INFTY_SEMIALG_MAP = "INFTY_SEMIALG_MAP"
    INFTY_POLY_MAP = "INFTY_POLY_MAP"
    INFTY_REGULAR = "INFTY_REGULAR"
    KS_LOCAL = "KS_LOCAL"
    KS_GLOBAL = "KS_GLOBAL"
    KS_INFTY = "KS_INFTY"
    B_PRODUCT = "B_PRODUCT"
    REF_KOLLAR = "REF_KOLLAR"
    REF_CKT = "REF_CKT"
    REF_JELONEK = "REF_JELONEK"
    REF_CHADZYNSKI = "REF_CHADZYNSKI"


class Direction(str, enum.Enum):
    UPPER = "UPPER"  # the true exponent is at most the value
    LOWER = "LOWER"  # the true exponent is at least the value


@dataclass(frozen=True)
class BoundReport:
    formula_id: FormulaId
    inputs: dict
    value: Fraction
    direction: Direction
    denominator_degree: int = 0
    reference_only: bool = False

    def to_json(self) -> dict:
        return {
            "formula_id": self.formula_id.value,
            "inputs": {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in self.inputs.items()},
            "value": str(self.value),
            "direction": self.direction.value,
            "denominator_degree": self.denominator_degree,
            "reference_only": self.reference_only,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BoundReport":
        try:
            return cls(
                FormulaId(data["formula_id"]),
                dict(data.get("inputs", {})),
                Fraction(data["value"]),
                Direction(data["direction"]),
                int(data.get("denominator_degree", 0)),
                bool(data.get("reference_only", False)),
            )
        except (KeyError, ValueError) as exc:
            raise BoundInputError(f"malformed bound JSON: {exc}") from exc


def _int(name, v, minimum):
    if isinstance(v, bool) or not isinstance(v, int):
        raise BoundInputError(f"{name} must be an integer, got {v!r}")
    if v < minimum:
        raise BoundInputError(f"{name} must be >= {minimum}, got {v}")
    return v


def _ks_power(N: int, r: int, d: int) -> int:
    # d (6d - 3)^(N + r - 1)
    return d * (6 * d - 3) ** (N + r - 1)


def local_separation_bound(N: int, r: int, d: int) -> int:
    """Exponent ``d (6d-3)^(N+r-1)`` for local separation of two closed sets."""
    _int("N", N, 1), _int("r", r, 0), _int("d", d, 1)
    return _ks_power(N, r, d)


def isolated_separation_bound(N: int, r: int, d: int) -> int:
    """Exponent ``((2d-1)^(N+r) + 1) / 2`` when the intersection point is isolated."""
    _int("N", N, 1), _int("r", r, 0), _int("d", d, 1)
    q = Fraction((2 * d - 1) ** (N + r) + 1, 2)
    assert q.denominator == 1  # (2d-1)^k is odd
    return int(q)


def separation_bound(N: int, r: int, d: int, isolated: bool = False) -> BoundReport:
    inputs = {"N": N, "r": r, "d": d}
    if isolated:
        return BoundReport(FormulaId.LOCAL_SEP_ISOLATED, inputs,
                           Fraction(isolated_separation_bound(N, r, d)), Direction.UPPER)
    return BoundReport(FormulaId.LOCAL_SEP, inputs, Fraction(local_separation_bound(N, r, d)), Direction.UPPER)


def local_map_bound(N: int, r_X: int, r_graph: int, kappa_X: int, kappa_graph: int,
                    isolated: bool = False) -> BoundReport:
    """Upper bound for the local exponent of a semialgebraic map on a closed set.

    Uses ``r = r_X + r_graph`` and ``d = max(kappa_X, kappa_graph)``.
    """
    for name, v in (("r_X", r_X), ("r_graph", r_graph), ("kappa_X", kappa_X), ("kappa_graph", kappa_graph)):
        _int(name, v, 0)
    r, d = r_X + r_graph, max(kappa_X, kappa_graph)
    if d == 0:
        raise BoundInputError("d = max(kappa_X, kappa_graph) must be >= 1")
    inputs = {"N": N, "r_X": r_X, "r_graph": r_graph, "kappa_X": kappa_X, "kappa_graph": kappa_graph,
              "r": r, "d": d}
    if isolated:
        value = isolated_separation_bound(N, r, d)
        fid = FormulaId.LOCAL_MAP_ISOLATED
    else:
        value = local_separation_bound(N, r, d)
        fid = FormulaId.LOCAL_MAP
    return BoundReport(fid, inputs, Fraction(value), Direction.UPPER)


def regular_local_bound(N: int, d: int, field: str = "REAL") -> BoundReport:
    """Polynomial map restricted to an algebraic set: ``d(6d-3)^(N-1)`` over R, ``d^N`` over C."""
    _int("N", N, 1)
    if d == 0:
        raise BoundInputError("d must be > 0 for regular maps")
    _int("d", d, 1)
    field = field.upper()
    if field == "REAL":
        return BoundReport(FormulaId.REGULAR_LOCAL_REAL, {"N": N, "d": d}, Fraction(_ks_power(N, 0, d)),
                           Direction.UPPER)
    if field == "COMPLEX":
        return BoundReport(FormulaId.REGULAR_LOCAL_COMPLEX, {"N": N, "d": d}, Fraction(d**N), Direction.UPPER)
    raise BoundInputError(f"field must be REAL or COMPLEX, got {field!r}")


def global_separation_bound(N: int, r: int, d: int) -> BoundReport:
    """Exponent on ``dist(x, X∩Y) / (1 + |x|^d)`` in the global separation inequality."""
    p = local_separation_bound(N, r, d)
    return BoundReport(FormulaId.GLOBAL_SEP, {"N": N, "r": r, "d": d}, Fraction(p), Direction.UPPER,
                       denominator_degree=d)


def infinity_semialgebraic_map_bound(N: int, r: int, d: int) -> BoundReport:
    """``(1-d) d (6d-3)^(N+r-1)``, valid for ``d = max(2, kappa(X), kappa(graph F))``."""
    _int("N", N, 1), _int("r", r, 0)
    if not isinstance(d, int) or d < 2:
        raise BoundInputError(f"d must be >= 2 (it is max(2, kappa(X), kappa(graph F))), got {d!r}")
    value = (1 - d) * _ks_power(N, r, d)
    return BoundReport(FormulaId.INFTY_SEMIALG_MAP, {"N": N, "r": r, "d": d}, Fraction(value), Direction.LOWER,
                       denominator_degree=d)


def infinity_polynomial_map_bound(N: int, r: int, d: int, D: int) -> BoundReport:
    """``-(D/2) d (6d-3)^(N+r-1)`` for a polynomial map on a closed semialgebraic set.

    Callers pass ``D = max(2, kappa(X))``, ``d = max(deg F, D)`` and ``r = 2 r(X)``.
    """
    _int("N", N, 1), _int("r", r, 0)
    if not isinstance(D, int) or D < 2:
        raise BoundInputError(f"D = max(2, kappa(X)) must be >= 2, got {D!r}")
    if not isinstance(d, int) or d < D:
        raise BoundInputError(f"d = max(deg F, D) must be >= D = {D}, got {d!r}")
    value = -Fraction(D, 2) * _ks_power(N, r, d)
    return BoundReport(FormulaId.INFTY_POLY_MAP, {"N": N, "r": r, "d": d, "D": D}, value, Direction.LOWER,
                       denominator_degree=D)


def infinity_regular_bound(N: int, d: int) -> BoundReport:
    _int("N", N, 1), _int("d", d, 1)
    return BoundReport(FormulaId.INFTY_REGULAR, {"N": N, "d": d}, Fraction(-_ks_power(N, 0, d)), Direction.LOWER)


def b_product(degrees: Sequence[int], k: int) -> int:
    """``d_1...d_m`` if ``m <= k``, else ``d_1...d_{k-1} d_m``; degrees must be nonincreasing."""
    degrees = list(degrees)
    if not degrees:
        raise BoundInputError("degree list is empty")
    for d in degrees:
        _int("degree", d, 1)
    _int("k", k, 1)
    if any(a < b for a, b in zip(degrees, degrees[1:])):
        raise BoundInputError(f"degrees must be sorted nonincreasing, got {degrees}")
    m = len(degrees)
    if m <= k:
        return prod(degrees)
    return prod(degrees[: k - 1]) * degrees[-1]


def reference_complex_bounds(kind: str, degrees: Sequence[int], N: int | None = None, k: int | None = None,
                             D: int | None = None, mult_sum: int | None = None) -> BoundReport:
    """Known lower bounds at infinity for complex polynomial maps.

    The hypotheses (finite zero set, the variety degree ``D``, multiplicities)
    are taken on trust; reports are marked ``reference_only``.
    """
    kind = kind.upper()
    degrees = list(degrees)

    def need(name, v, why):
        if v is None:
            raise BoundInputError(f"{kind} needs {name}: {why}")
        return v

    if kind == "KOLLAR":
        N = need("N", N, "B(d_1..d_m; N) uses the source dimension")
        value = Fraction(degrees[-1] - b_product(degrees, N))
        fid, inputs = FormulaId.REF_KOLLAR, {"degrees": degrees, "N": N}
    elif kind == "CKT":
        N = need("N", N, "B(d_1..d_m; N) uses the source dimension")
        mu = need("mult_sum", mult_sum, "sum of intersection multiplicities over the finite zero set")
        value = Fraction(degrees[-1] - b_product(degrees, N) + mu)
        fid, inputs = FormulaId.REF_CKT, {"degrees": degrees, "N": N, "mult_sum": mu}
    elif kind == "JELONEK":
        k = need("k", k, "dimension of the variety V")
        D = need("D", D, "degree of the variety V")
        nu = need("mult_sum", mult_sum, "nu = #(F^-1(0) ∩ V) must be finite and supplied")
        value = Fraction(degrees[-1] - D * b_product(degrees, k) + nu)
        fid, inputs = FormulaId.REF_JELONEK, {"degrees": degrees, "k": k, "D": D, "mult_sum": nu}
    elif kind == "CHADZYNSKI":
        if len(degrees) != 2 or (N is not None and N != 2):
            raise BoundInputError("CHADZYNSKI requires N = m = 2")
        mu = need("mult_sum", mult_sum, "sum of multiplicities over the finite zero set")
        b_product(degrees, 2)  # validates ordering
        d1, d2 = degrees
        value = Fraction(d2 - d1 * d2 + mu)
        fid, inputs = FormulaId.REF_CHADZYNSKI, {"degrees": degrees, "N": 2, "mult_sum": mu}
    else:
        raise BoundInputError(f"unknown reference bound {kind!r}")
    return BoundReport(fid, inputs, value, Direction.LOWER, reference_only=True)


def ks_bounds(N: int, d: int, kind: str = "LOCAL") -> BoundReport:
    """The algebraic-case exponent ``d(6d-3)^(N-1)`` in its local, global and at-infinity forms."""
    _int("N", N, 1), _int("d", d, 1)
    p = _ks_power(N, 0, d)
    kind = kind.upper()
    if kind == "LOCAL":
        return BoundReport(FormulaId.KS_LOCAL, {"N": N, "d": d}, Fraction(p), Direction.UPPER)
    if kind == "GLOBAL":
        return BoundReport(FormulaId.KS_GLOBAL, {"N": N, "d": d}, Fraction(p), Direction.UPPER,
                           denominator_degree=2)
    if kind == "INFTY_COMPACT":
        return BoundReport(FormulaId.KS_INFTY, {"N": N, "d": d}, Fraction(-p), Direction.LOWER)
    raise BoundInputError(f"kind must be LOCAL, GLOBAL or INFTY_COMPACT, got {kind!r}")

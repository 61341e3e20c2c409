"""Estimate local exponents and compare them with the bounds they must respect."""

from lojasiewicz.bounds import ks_bounds
from lojasiewicz.estimator import (estimate_infinity_exponent, estimate_local_map_exponent,
                                   estimate_separation_exponent, verify_bound)
from lojasiewicz.polynomials import PolyMap, variables
from lojasiewicz.semisets import SemialgebraicSet

x, y = variables(2)
plane = SemialgebraicSet.whole_space(2)

if __name__ == "__main__":
    est = estimate_local_map_exponent(PolyMap([x, y**3]), plane, [0.0, 0.0])
    print(f"(x, y^3) at 0: {est.value:.4f} +- {est.fit_stderr:.1e}")
    print(est.to_csv(), end="")
    print(verify_bound(est, ks_bounds(2, 3)).message)

    sep = estimate_separation_exponent(SemialgebraicSet.basic(2, eqs=[y]),
                                       SemialgebraicSet.basic(2, eqs=[y - x**3]), [0.0, 0.0])
    print(f"line vs cubic at 0: {sep.value:.4f}")

    # the hyperbola xy = 1 keeps (x, 1 - xy) small far out along the y axis
    inf = estimate_infinity_exponent(PolyMap([x, 1 - x * y]), plane)
    print(f"(x, 1 - xy) at infinity: {inf.value:.4f}")

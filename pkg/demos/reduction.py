"""Reduce an overdetermined map with random triangular projections."""

import numpy as np

from lojasiewicz.polynomials import PolyMap, variables
from lojasiewicz.projection import reduction_experiment
from lojasiewicz.semisets import SemialgebraicSet

(t,) = variables(1)
line = SemialgebraicSet.whole_space(1)
F = PolyMap([t**2, t**3, t**5])

if __name__ == "__main__":
    rep = reduction_experiment(F, line, 1, trials=5, dim_hint=1, seed=7)
    print(f"baseline {rep.baseline.value:.4f}")
    for tr in rep.trials:
        print(f"seed {tr.seed}: alpha {np.round(tr.matrix[0, 1:], 3)}, exponent {tr.estimate.value:.4f}, "
              f"sandwich ({tr.sandwich.c1:.3f}, {tr.sandwich.c2:.3f})")

    # keeping only x^5 is not generic: the exponent jumps to 5
    bad = reduction_experiment(F, line, 1, dim_hint=1, maps=[[[0.0, 0.0, 1.0]]]).trials[0]
    print(f"coordinate projection: {bad.estimate.value:.4f}, one-sided only: {not bad.equal}")

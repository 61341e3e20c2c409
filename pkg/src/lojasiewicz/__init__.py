"""Łojasiewicz exponents of semialgebraic maps and sets: exact bounds and numerical estimates."""

__version__ = "0.1.0"

from .polynomials import Polynomial, PolyMap, compose_linear, variables  # noqa: E402
from .semisets import (BasicSet, DistanceConfig, InfeasibleError, SemialgebraicSet, approx_distance,  # noqa: E402
                       complexity, membership, sample_near)
from .bounds import BoundInputError, BoundReport, Direction, FormulaId  # noqa: E402
from .lifting import algebraize, algebraize_pair, distance_transfer_check, joint_lift, lift_point  # noqa: E402
from .estimator import (EstimateKind, ExponentEstimate, SamplingConfig, estimate_global_separation,  # noqa: E402
                        estimate_infinity_exponent, estimate_local_map_exponent, estimate_separation_exponent,
                        verify_bound)
from .projection import (AtInfinity, Local, TriangularLinearMap, reduce_map, reduction_experiment,  # noqa: E402
                         sample_generic)

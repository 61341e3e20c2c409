"""Command-line front end.

Every command prints a table (or, with ``--json``, the full JSON document) and
can write the JSON document to ``--out``. A document is
``{"manifest": ..., "result": ...}``; the result part depends only on the
inputs, the resolved configuration and the seed, so equal manifests give
byte-identical results. Timing lives in the manifest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (BoundInputError, BoundReport, global_separation_bound, infinity_polynomial_map_bound,
                     infinity_regular_bound, infinity_semialgebraic_map_bound, ks_bounds, local_map_bound,
                     reference_complex_bounds, regular_local_bound, separation_bound, b_product)
from .estimator import (EstimationError, ExponentEstimate, SamplingConfig, estimate_global_separation,
                        estimate_infinity_exponent, estimate_local_map_exponent, estimate_separation_exponent,
                        verify_bound)
from .lifting import algebraize, algebraize_pair
from .polynomials import PolyMap, Polynomial
from .projection import AtInfinity, Local, PreconditionError, reduction_experiment
from .semisets import DistanceConfig, InfeasibleError, SemialgebraicSet, brocker_cap, complexity

logger = logging.getLogger("lojasiewicz")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_ORACLE = 0, 1, 2, 3


class InputError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: dict  # file name -> sha256
    seed: int
    version: str = __version__
    timing: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, "config": self.config, "inputs": self.inputs, "seed": self.seed,
                "version": self.version, "timing": self.timing}


def dumps(obj) -> str:
    """Canonical JSON used for every document this tool writes."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False, default=_default)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _finite(obj):
    """Replace non-finite floats by None so the output stays strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


# input files


class _Inputs:
    def __init__(self):
        self.digests: dict[str, str] = {}

    def read(self, path) -> dict:
        p = Path(path)
        try:
            raw = p.read_bytes()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from exc
        self.digests[str(path)] = hashlib.sha256(raw).hexdigest()
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
        # accept documents written by this tool
        if isinstance(data, dict) and "manifest" in data and "result" in data:
            data = data["result"]
        return data

    def map(self, path) -> PolyMap:
        data = self.read(path)
        try:
            if isinstance(data, dict) and "terms" in data:
                return PolyMap([Polynomial.from_json(data)])
            return PolyMap.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: not a polynomial map ({exc})") from exc

    def set(self, path, n: int | None = None, key: str | None = None) -> SemialgebraicSet:
        if path is None:
            if n is None:
                raise InputError("a set file is required")
            return SemialgebraicSet.whole_space(n)
        data = self.read(path)
        if key is not None:
            if key not in data:
                raise InputError(f"{path}: missing key {key!r}")
            data = data[key]
        try:
            S = SemialgebraicSet.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: not a semialgebraic set ({exc})") from exc
        r = complexity(S).r
        if r > brocker_cap(S.num_vars):
            logger.warning("%s uses %d inequalities per piece, more than the %d any set in R^%d needs",
                           path, r, brocker_cap(S.num_vars), S.num_vars)
        return S


def _point(text: str, n: int) -> np.ndarray:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise InputError(f"bad point {text!r}") from exc
    if len(vals) == 1:
        vals = vals * n
    if len(vals) != n:
        raise InputError(f"point {text!r} has {len(vals)} coordinates, expected {n}")
    return np.array(vals)


def _sampling(args) -> SamplingConfig:
    dist = DistanceConfig(starts=args.starts, restore_tol=args.restore_tol, penalty_max=args.penalty_max,
                          samples=0, seed=args.seed, max_restore_iter=200)
    return SamplingConfig(samples_per_shell=args.samples, shell_base=args.base, shell_count=args.shells,
                          min_scale=args.min_scale, seed=args.seed, distance=dist, fit_tol=args.fit_tol)


# tables


def _table(rows) -> str:
    rows = [[str(c) for c in r] for r in rows]
    w = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w[i]) for i, c in enumerate(r)).rstrip() for r in rows)


def _estimate_table(est: ExponentEstimate) -> str:
    head = [["scale", "min_value", "samples"]]
    body = [[f"{r.scale:.6g}", f"{r.min_value:.6g}" if math.isfinite(r.min_value) else "-", r.sample_count]
            for r in est.shell_records]
    lines = [f"{est.direction.value} exponent {est.value:.6g} (stderr {est.fit_stderr:.3g}, "
             f"C {est.admissible_constant:.3g})", _table(head + body)]
    lines += [f"warning: {w}" for w in est.warnings]
    return "\n".join(lines)


# commands; each returns (result dict, table text, verdict passed or None)


_FORMULAS = {
    "local-sep": lambda a: separation_bound(a.N, a.r, a.d),
    "local-sep-isolated": lambda a: separation_bound(a.N, a.r, a.d, isolated=True),
    "local-map": lambda a: local_map_bound(a.N, a.r_x, a.r_graph, a.kappa_x, a.kappa_graph),
    "local-map-isolated": lambda a: local_map_bound(a.N, a.r_x, a.r_graph, a.kappa_x, a.kappa_graph, True),
    "real-regular": lambda a: regular_local_bound(a.N, a.d, "REAL"),
    "complex-regular": lambda a: regular_local_bound(a.N, a.d, "COMPLEX"),
    "global-sep": lambda a: global_separation_bound(a.N, a.r, a.d),
    "infty-semialg": lambda a: infinity_semialgebraic_map_bound(a.N, a.r, a.d),
    "infty-poly": lambda a: infinity_polynomial_map_bound(a.N, a.r, a.d, a.D),
    "infty-regular": lambda a: infinity_regular_bound(a.N, a.d),
    "ks-local": lambda a: ks_bounds(a.N, a.d, "LOCAL"),
    "ks-global": lambda a: ks_bounds(a.N, a.d, "GLOBAL"),
    "ks-infty": lambda a: ks_bounds(a.N, a.d, "INFTY_COMPACT"),
    "kollar": lambda a: reference_complex_bounds("KOLLAR", a.degrees, N=a.N),
    "ckt": lambda a: reference_complex_bounds("CKT", a.degrees, N=a.N, mult_sum=a.mult_sum),
    "jelonek": lambda a: reference_complex_bounds("JELONEK", a.degrees, k=a.k, D=a.D, mult_sum=a.mult_sum),
    "chadzynski": lambda a: reference_complex_bounds("CHADZYNSKI", a.degrees, N=a.N, mult_sum=a.mult_sum),
}

_NEEDS = {"N": "--N", "r": "--r", "d": "--d", "D": "--D", "k": "--k", "degrees": "--degrees",
          "r_x": "--r-x", "r_graph": "--r-graph", "kappa_x": "--kappa-x", "kappa_graph": "--kappa-graph"}


def cmd_bound(args, inputs: _Inputs):
    if args.formula == "b-product":
        if args.degrees is None or args.k is None:
            raise BoundInputError("b-product needs --degrees and --k")
        value = b_product(args.degrees, args.k)
        result = {"formula_id": "B_PRODUCT", "inputs": {"degrees": args.degrees, "k": args.k}, "value": str(value),
                  "direction": None, "denominator_degree": 0, "reference_only": False}
        return result, f"B_PRODUCT = {value}", None
    try:
        rep: BoundReport = _FORMULAS[args.formula](args)
    except TypeError as exc:
        # a required flag was left at None
        missing = [flag for name, flag in _NEEDS.items() if getattr(args, name, None) is None]
        raise BoundInputError(f"{args.formula}: missing input among {', '.join(missing)} ({exc})") from exc
    d = rep.to_json()
    rows = [["formula", "value", "direction", "denominator_degree"],
            [d["formula_id"], d["value"], d["direction"], d["denominator_degree"]]]
    text = _table(rows)
    if rep.reference_only:
        text += "\nnote: reference bound, hypotheses not checked"
    return d, text, None


def cmd_estimate(args, inputs: _Inputs):
    F = inputs.map(args.map)
    X = inputs.set(args.set, F.num_vars)
    cfg = _sampling(args)
    if args.infinity:
        est = estimate_infinity_exponent(F, X, cfg)
    else:
        est = estimate_local_map_exponent(F, X, _point(args.at, F.num_vars), cfg=cfg)
    if args.csv:
        Path(args.csv).write_bytes(est.to_csv().encode())
    return est.to_json(), _estimate_table(est), None


def cmd_separate(args, inputs: _Inputs):
    X = inputs.set(args.set_x)
    Y = inputs.set(args.set_y)
    cfg = _sampling(args)
    if args.glob:
        if args.d is None or args.p is None:
            raise InputError("--global needs --d and --p")
        res = estimate_global_separation(X, Y, args.d, args.p, cfg)
        text = (f"inf ratio {res.constant:.6g} (log {res.log_constant:.6g}) over {res.samples} samples"
                + ("; counterexample" if res.counterexample else ""))
        return res.to_json(), text, not res.counterexample
    est = estimate_separation_exponent(X, Y, _point(args.at, X.num_vars), cfg)
    if args.csv:
        Path(args.csv).write_bytes(est.to_csv().encode())
    return est.to_json(), _estimate_table(est), None


def cmd_lift(args, inputs: _Inputs):
    if args.sets:
        X = inputs.set(args.sets, key="X")
        Y = inputs.set(args.sets, key="Y")
        out = []
        for i, P in enumerate(X.pieces):
            for j, Q in enumerate(Y.pieces):
                A, B = algebraize_pair(P, Q)
                out.append({"pieces": [i, j], "A": A.to_json(), "B": B.to_json()})
        rows = [["pieces", "ambient", "slacks A", "slacks B", "degree cap"]]
        rows += [[f"{o['pieces'][0]},{o['pieces'][1]}", o["A"]["ambient_vars"], o["A"]["slack_range"],
                  o["B"]["slack_range"], max(o["A"]["degree_cap"], o["B"]["degree_cap"])] for o in out]
        return {"pairs": out}, _table(rows), None
    if args.set is None:
        raise InputError("lift needs --sets (a pair) or --set")
    X = inputs.set(args.set)
    out = [algebraize(P).to_json() for P in X.pieces]
    rows = [["piece", "ambient", "slacks", "degree cap"]]
    rows += [[i, o["ambient_vars"], o["slack_range"], o["degree_cap"]] for i, o in enumerate(out)]
    return {"lifts": out}, _table(rows), None


def _locality(text: str, n: int):
    kind, _, rest = text.partition(":")
    try:
        if kind == "local":
            *coords, r = rest.split(",") if rest else ["0", "0.1"]
            return Local(_point(",".join(coords) or "0", n), float(r))
        if kind == "infinity":
            return AtInfinity(float(rest) if rest else 1e3)
    except ValueError as exc:
        raise InputError(f"bad locality {text!r}: {exc}") from exc
    raise InputError(f"locality must be local:a,r or infinity:R, got {text!r}")


def cmd_reduce(args, inputs: _Inputs):
    F = inputs.map(args.map)
    X = inputs.set(args.set, F.num_vars)
    loc = _locality(args.locality, F.num_vars)
    maps = None
    if args.matrix:
        maps = [np.array(inputs.read(args.matrix), dtype=float)]
    rep = reduction_experiment(F, X, args.k, args.trials, loc, _sampling(args), dim_hint=args.dim_hint,
                               seed=args.seed, maps=maps, threads=args.threads)
    rows = [["trial seed", "exponent", "zero check", "degrees", "C1", "C2", "one-sided", "equal"]]
    for t in rep.trials:
        rows.append([t.seed if t.seed is not None else "given", f"{t.estimate.value:.4g}",
                     "PASS" if t.zero_check.passed else "FAIL",
                     "kept" if t.degrees.preserved else ("dropped" if t.degrees.sorted_input else "n/a"),
                     f"{t.sandwich.c1:.3g}" if t.sandwich else "-", f"{t.sandwich.c2:.3g}" if t.sandwich else "-",
                     t.inequality_holds, t.equal])
    text = (f"baseline exponent {rep.baseline.value:.4g}, tolerance {rep.tolerance:.3g}\n" + _table(rows)
            + f"\nverdict {'PASS' if rep.passed else 'FAIL'}")
    return rep.to_json(), text, rep.passed


def cmd_verify(args, inputs: _Inputs):
    try:
        est = ExponentEstimate.from_json(inputs.read(args.estimate))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.estimate}: not an exponent estimate ({exc})") from exc
    bound = BoundReport.from_json(inputs.read(args.bound))
    v = verify_bound(est, bound, args.fit_tol)
    return v.to_json(), ("PASS" if v.passed else "FAIL") + f": {v.message}", v.passed


# parser


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write the JSON document here")
    common.add_argument("--threads", type=int, default=1, help="worker cap for independent trials")
    common.add_argument("--strict", action="store_true", help="exit 1 on a FAIL verdict")
    common.add_argument("--json", action="store_true", help="print JSON instead of a table")

    sampling = argparse.ArgumentParser(add_help=False)
    sampling.add_argument("--samples", type=int, default=256, help="random points per shell")
    sampling.add_argument("--shells", type=int, default=12)
    sampling.add_argument("--base", type=float, default=2.0, help="ratio between shell edges")
    sampling.add_argument("--min-scale", type=float, default=None)
    sampling.add_argument("--fit-tol", type=float, default=0.1)
    sampling.add_argument("--starts", type=int, default=4, help="distance oracle starts")
    sampling.add_argument("--restore-tol", type=float, default=1e-14)
    sampling.add_argument("--penalty-max", type=float, default=1e7)

    p = argparse.ArgumentParser(prog="lojasiewicz", description="Łojasiewicz exponents: bounds and estimates")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", parents=[common], help="evaluate an exponent formula exactly")
    b.add_argument("--formula", required=True, choices=sorted(list(_FORMULAS) + ["b-product"]))
    for name in ("N", "r", "d", "D", "k"):
        b.add_argument(f"--{name}", type=int)
    b.add_argument("--degrees", type=_ints)
    b.add_argument("--mult-sum", type=int)
    b.add_argument("--r-x", type=int)
    b.add_argument("--r-graph", type=int)
    b.add_argument("--kappa-x", type=int)
    b.add_argument("--kappa-graph", type=int)
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("estimate", parents=[common, sampling], help="estimate a map's exponent")
    e.add_argument("--map", required=True)
    e.add_argument("--set", help="domain set; the whole space when omitted")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--at", help="base point, comma-separated; one value is repeated")
    g.add_argument("--infinity", action="store_true")
    e.add_argument("--csv", help="write shell data as CSV")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("separate", parents=[common, sampling], help="estimate a separation exponent")
    s.add_argument("--set-x", required=True)
    s.add_argument("--set-y", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--at")
    g.add_argument("--global", dest="glob", action="store_true")
    s.add_argument("--d", type=int, help="denominator degree for --global")
    s.add_argument("--p", type=float, help="exponent to test with --global")
    s.add_argument("--csv")
    s.set_defaults(func=cmd_separate)

    lf = sub.add_parser("lift", parents=[common], help="slack-variable algebraization")
    lf.add_argument("--sets", help='pair file {"X": set, "Y": set}')
    lf.add_argument("--set")
    lf.set_defaults(func=cmd_lift)

    r = sub.add_parser("reduce", parents=[common, sampling], help="generic linear reduction experiment")
    r.add_argument("--map", required=True)
    r.add_argument("--set")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--trials", type=int, default=10)
    r.add_argument("--locality", default="local:0,0.1", help="local:a,r or infinity:R")
    r.add_argument("--dim-hint", type=int)
    r.add_argument("--matrix", help="JSON k x m matrix to use instead of sampled maps")
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", parents=[common], help="compare an estimate with a bound")
    v.add_argument("--estimate", required=True)
    v.add_argument("--bound", required=True)
    v.add_argument("--fit-tol", type=float, default=0.1)
    v.set_defaults(func=cmd_verify)
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    inputs = _Inputs()
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "verbose", "json", "out")}
    if hasattr(args, "samples"):
        config["sampling"] = _sampling(args).to_json()
    t0 = time.perf_counter()
    try:
        result, text, passed = args.func(args, inputs)
    except (InputError, BoundInputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InfeasibleError as exc:
        print(f"error: distance oracle failed: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (ValueError, EstimationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    manifest = RunManifest(args.command, config, inputs.digests, args.seed,
                           timing={"seconds": round(time.perf_counter() - t0, 6)})
    doc = {"manifest": manifest.to_json(), "result": _finite(result)}
    if args.out:
        Path(args.out).write_text(dumps(doc) + "\n")
    print(dumps(doc) if args.json else text, file=stdout)
    if args.strict and passed is False:
        return EXIT_FAIL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

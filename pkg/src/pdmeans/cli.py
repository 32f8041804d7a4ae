"""Command-line entry points.

Two subcommands::

    pdmeans compute MEAN INPUT.json [options]   # one mean from a matrix file
    pdmeans verify [options]                    # the inequality suite

The matrix file format is a JSON document

    {"dim": d, "matrices": [[[...], ...], ...], "weights": [...], "t": 0.5}

with ``weights`` and ``t`` optional. All numeric output is printed with 17
significant digits so reports are byte-stable across identical runs.

Exit codes: 0 success; 1 verification failures; 2 invalid input or
configuration; 3 solver did not converge.
"""

import argparse
import json
import sys

import numpy as np

from .config import DEFAULT_TOL
from .errors import NoConvergence, PdmeansError, UnknownCheck, ValidationError
from .means2 import geo_mean2, spectral_bounds
from .meansn import (
    IterationTrace,
    WeightVector,
    chaotic_geometric_mean,
    karcher_mean,
    lawson_lim_geometric,
    power_mean,
    weighted_arithmetic,
    weighted_harmonic,
)
from .matfun import validate_spd
from .verify import SuiteConfig, run_suite

MEANS = ("arith", "harm", "geo2", "power", "karcher", "lawson_lim", "chaotic")


def _format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    value = float(x)
    if value != value or value in (float("inf"), float("-inf")):
        return "null"
    out = format(value, ".17g")
    # Keep floats recognizable as floats when round-tripping.
    if out.lstrip("-").isdigit():
        out += ".0"
    return out


def dumps_17g(obj, indent: int = 0) -> str:
    """Serialize to JSON with every number at 17 significant digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f'{inner}"{key}": {dumps_17g(value, indent + 1)}'
            for key, value in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, np.integer, np.floating)) for v in seq)
        if flat:
            return "[" + ", ".join(_format_number(v) for v in seq) + "]"
        items = [f"{inner}{dumps_17g(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _format_number(obj)


def _parse_range(text: str) -> tuple:
    lo, _, hi = text.partition("..")
    if not hi:
        hi = lo
    return int(lo), int(hi)


def _load_matrix_file(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        doc = json.load(handle)
    dim = int(doc["dim"])
    raw_list = doc["matrices"]
    operands = []
    for idx, raw in enumerate(raw_list):
        arr = np.asarray(raw, dtype=np.float64)
        if arr.shape != (dim, dim):
            raise ValidationError(f"matrix {idx}: shape {arr.shape} is not ({dim}, {dim})")
        try:
            operands.append(validate_spd(arr))
        except ValidationError as exc:
            raise ValidationError(f"matrix {idx}: {exc}") from exc
    weights = doc.get("weights")
    if weights is not None:
        weights = WeightVector.of(np.asarray(weights, dtype=np.float64))
        if weights.n != len(operands):
            raise ValidationError(
                f"{weights.n} weights for {len(operands)} matrices"
            )
    t = doc.get("t")
    return operands, weights, (None if t is None else float(t))


def _compute(args) -> int:
    tol = DEFAULT_TOL
    if args.tol_fixed_point is not None:
        tol = tol.with_overrides(fixed_point_tol=args.tol_fixed_point)
    operands, weights, file_t = _load_matrix_file(args.input)
    t = args.t if args.t is not None else file_t
    if weights is None:
        weights = WeightVector.uniform(len(operands))
    trace = IterationTrace(0, 0.0, True)
    name = args.mean
    if name == "arith":
        result = weighted_arithmetic(weights, operands, tol)
    elif name == "harm":
        result = weighted_harmonic(weights, operands, tol)
    elif name == "chaotic":
        result = chaotic_geometric_mean(weights, operands, tol)
    elif name == "geo2":
        if len(operands) != 2:
            raise ValidationError("geo2 needs exactly two matrices")
        result = geo_mean2(operands[0], operands[1], 0.5 if t is None else t, tol)
    elif name == "power":
        if t is None:
            raise ValidationError("power mean needs --t (or a t field in the file)")
        result, trace = power_mean(weights, operands, t, tol)
    elif name == "karcher":
        result, trace = karcher_mean(weights, operands, tol)
    else:
        result, trace = lawson_lim_geometric(operands, 0.5 if t is None else t, tol)
    bounds = spectral_bounds(operands)
    doc = {
        "mean": name,
        "dim": result.dim,
        "result": [list(row) for row in result.entries],
        "iterations": trace.iterations,
        "final_residual": trace.final_residual,
        "converged": trace.converged,
        "bounds": {"m": bounds.m, "M": bounds.M},
    }
    text = dumps_17g(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    print(text)
    return 0


def _verify(args) -> int:
    tol = DEFAULT_TOL
    if args.tol_fixed_point is not None:
        tol = tol.with_overrides(fixed_point_tol=args.tol_fixed_point)
    if args.tol_margin is not None:
        tol = tol.with_overrides(margin_tol=args.tol_margin)
    try:
        config = SuiteConfig(
            checks=tuple(c.strip() for c in args.checks.split(",") if c.strip()),
            count=args.count,
            dims=_parse_range(args.dims),
            n_operands=_parse_range(args.n_operands),
            bounds=(args.m, args.M),
            t_grid=tuple(float(v) for v in args.t_grid.split(",")),
            seed=args.seed,
            tol=tol,
        )
        config.selected_checks()
    except (ValueError, UnknownCheck) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = run_suite(config)
    header = f"{'check':<16} {'pass':>6} {'fail':>6} {'inconcl':>8} {'worst_margin':>14}"
    print(header)
    print("-" * len(header))
    for agg in report.results:
        worst = "-" if agg.worst_margin is None else f"{agg.worst_margin:.3e}"
        flag = "" if agg.ok else "  <-- FAIL"
        print(
            f"{agg.check_id:<16} {agg.passes:>6} {agg.failures:>6} "
            f"{agg.inconclusive:>8} {worst:>14}{flag}"
        )
    print(f"wall clock: {report.wall_clock_s:.1f} s")
    text = dumps_17g(report.to_dict())
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(text + "\n")
    print(f"report written to {args.out}")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdmeans",
        description="Means of positive definite matrices and their inequality suite.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("compute", help="compute one mean from a matrix file")
    pc.add_argument("mean", choices=MEANS)
    pc.add_argument("input", help="path to a matrix JSON file")
    pc.add_argument("--t", type=float, default=None, help="order parameter")
    pc.add_argument("--out", default=None, help="also write the result here")
    pc.add_argument("--tol-fixed-point", type=float, default=None)

    pv = sub.add_parser("verify", help="run the inequality verification suite")
    pv.add_argument("--checks", default="all", help='comma list of check ids or "all"')
    pv.add_argument("--count", type=int, default=200, help="instances per check")
    pv.add_argument("--dims", default="2..6", help="dimension range LO..HI")
    pv.add_argument("--n-operands", default="2..4", help="operand count range LO..HI")
    pv.add_argument("--m", type=float, default=0.5, help="lower spectral bound")
    pv.add_argument("--M", type=float, default=4.0, help="upper spectral bound")
    pv.add_argument("--t-grid", default="0.25,0.5,0.75", help="comma list of orders")
    pv.add_argument("--seed", type=int, default=1)
    pv.add_argument("--out", default="suite_report.json", help="report path")
    pv.add_argument("--tol-fixed-point", type=float, default=None)
    pv.add_argument("--tol-margin", type=float, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "compute":
            return _compute(args)
        return _verify(args)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (PdmeansError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

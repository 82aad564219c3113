"""Command line interface.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import math
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import capacity as cap
from . import core, headmode, layers
from .errors import DomainError
from .io import InputError, dumps, read_matrix, write_matrix

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive real, got {text}")
    return v


@contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def cmd_retrieve(args) -> int:
    patterns = read_matrix(args.patterns, args.header)
    queries = read_matrix(args.queries, args.header)
    if queries.shape[1] != patterns.shape[1]:
        raise InputError(f"queries have {queries.shape[1]} features, patterns have {patterns.shape[1]}")
    if args.normalize == "input":
        patterns = layers.pattern_normalize(patterns)
        queries = layers.pattern_normalize(queries)
    X = core.PatternMatrix.from_rows(patterns)
    cfg = core.IterationConfig(args.max_updates, args.tol, record_energy=True)
    regime = core.classify_regime(X, args.beta).to_dict()
    with _output(args.out) as out:
        for s, q in enumerate(queries):
            res = core.iterate(X, q, args.beta, cfg)
            record = {
                "query_index": s,
                "updates_used": res.updates_used,
                "converged": res.converged,
                "energy_trace": res.energy_trace,
                "fixed_point": res.fixed_point,
                "softmax": res.final_softmax,
                "nearest_pattern": int(np.argmax(res.final_softmax)),
                "regime": regime,
            }
            out.write(dumps(record) + "\n")
    return EXIT_OK


def cmd_capacity(args) -> int:
    if args.method == "dimension":
        if args.c is None:
            raise UsageError("--c is required for --method dimension")
        a, b = cap.dimension_coefficients(args.beta, args.K, args.c, args.p)
        record = {"a": a, "b": b}
        try:
            d_real = cap.capacity_dimension(args.beta, args.K, args.c, args.p)
            record["solution"] = "lambert"
        except cap.InfeasibleError:
            # the exact equation has no root; fall back to the closed form
            d_real = cap.capacity_dimension_closed_form(args.beta, args.K, args.c, args.p)
            record["solution"] = "closed_form"
        record.update(d_real=d_real, d_ceil=math.ceil(d_real))
    else:
        if args.d is None:
            raise UsageError("--d is required for this method")
        params = cap.CapacityParams(args.beta, args.K, args.d, args.p)
        if args.method == "exact":
            record = cap.capacity_base_c(params).to_dict()
        else:
            record = cap.capacity_result_from_c(params, cap.capacity_base_c_lower(params)).to_dict()
    print(dumps(record))
    return EXIT_OK


def _attention_files(target: Path) -> List[Path]:
    if target.is_dir():
        files = sorted(target.glob("*.csv"))
        if not files:
            raise InputError(f"{target}: no .csv files")
        return files
    if target.is_file():
        return [target]
    raise InputError(f"{target}: no such file or directory")


def cmd_analyze_heads(args) -> int:
    reports = {}
    for f in _attention_files(Path(args.attention)):
        rows = read_matrix(f)
        reports[f.stem] = headmode.analyze_head(rows, mass=args.mass, beta=args.beta).to_dict()
    with _output(args.out) as out:
        out.write(dumps(reports) + "\n")
    return EXIT_OK


def cmd_gaussian_head(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    params = layers.gaussian_head_init(args.n, args.init, args.seed)
    params = layers.GaussianHeadParams(params.mu, params.sigma * args.sigma_scale)
    A = layers.gaussian_head_attention(params, args.n)
    with _output(args.out) as out:
        write_matrix(out, A)
    return EXIT_OK


def cmd_energy(args) -> int:
    X = core.PatternMatrix.from_rows(read_matrix(args.patterns, args.header))
    queries = read_matrix(args.query, args.header)
    if queries.shape[1] != X.d:
        raise InputError(f"query has {queries.shape[1]} features, patterns have {X.d}")
    for s, q in enumerate(queries):
        record = {"query_index": s, "energy": core.energy(X, q, args.beta)}
        if args.mixture:
            log_mix = core.log_gaussian_mixture_form(X, q, args.beta)
            record["log_mixture"] = log_mix
            record["mixture"] = math.exp(log_mix) if log_mix < 709 else math.inf
            # exp(-E) / mixture^(1/beta); constant across queries
            record["ratio"] = math.exp(-record["energy"] - log_mix / args.beta)
        print(dumps(record))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modern-hopfield", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("retrieve", help="iterate queries to fixed points, JSONL out")
    p.add_argument("--patterns", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--beta", type=_positive, required=True)
    p.add_argument("--max-updates", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--normalize", choices=["input", "none"], default="none")
    p.add_argument("--header", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("capacity", help="storage capacity formulas")
    p.add_argument("--beta", type=_positive, required=True)
    p.add_argument("--K", type=_positive, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--method", choices=["exact", "lower", "dimension"], default="exact")
    p.add_argument("--c", type=_positive)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("analyze-heads", help="operating classes of attention heads")
    p.add_argument("--attention", required=True, help="CSV file or directory of CSV files, one per head")
    p.add_argument("--mass", type=float, default=0.90)
    p.add_argument("--beta", type=_positive, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze_heads)

    p = sub.add_parser("gaussian-head", help="write a Gaussian averaging head as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--init", choices=["supports", "random"], default="supports")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma-scale", type=_positive, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gaussian_head)

    p = sub.add_parser("energy", help="energy (and mixture form) of query rows")
    p.add_argument("--patterns", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--beta", type=_positive, required=True)
    p.add_argument("--mixture", action="store_true")
    p.add_argument("--header", action="store_true")
    p.set_defaults(func=cmd_energy)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (UsageError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

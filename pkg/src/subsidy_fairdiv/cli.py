"""Command-line front end: allocate, verify, oracle, gen, and bench.

Exit codes: 0 success, 1 a checked guarantee failed (would indicate an
implementation bug for `allocate`, or bad subsidies for `verify`),
2 input or validation error, 3 oracle enumeration cap exceeded.

Output is byte-deterministic for identical inputs and flags.  The
environment variable ``SUBSIDY_FAIRDIV_THREADS`` caps internal
parallelism; the current implementation is single-threaded, so any cap
is honoured trivially.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .graph import to_dot
from .model import (
    CHORES,
    KINDS,
    ModelError,
    compute_subsidies,
    format_decimal,
    parse_allocation,
    parse_instance,
    serialize_instance,
    wprop_share,
)
from .oracle import (
    DEFAULT_CAP,
    DISTRIBUTIONS,
    EnumerationCapExceeded,
    UNIFORM,
    brute_force_rounding,
    gen_random_instance,
)
from .rounding import BASELINE, TREE, run_pipeline

EXIT_OK = 0
EXIT_GUARANTEE = 1
EXIT_INPUT = 2
EXIT_CAP = 3


def thread_cap() -> int:
    """Parallelism cap from SUBSIDY_FAIRDIV_THREADS (at least 1)."""
    raw = os.environ.get("SUBSIDY_FAIRDIV_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _rational(value: Fraction, digits: int | None) -> str:
    if digits is None:
        return str(value)
    return f"{value} ({format_decimal(value, digits)})"


def cmd_allocate(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.input))
    method = BASELINE if args.baseline else TREE
    result = run_pipeline(inst, method=method)
    cert = result.certificate
    doc: dict[str, object] = {
        "kind": inst.kind,
        "n": inst.n,
        "m": inst.m,
        "method": method,
        "owner": list(result.allocation.owner),
        "subsidies": [str(s) for s in result.subsidies.amounts],
        "total_subsidy": str(result.subsidies.total),
        "global_bound": str(cert.global_bound),
        "bound_holds": cert.holds,
    }
    if cert.strong_bound is not None:
        doc["strong_bound"] = str(cert.strong_bound)
    if args.decimal is not None:
        doc["total_subsidy_decimal"] = format_decimal(result.subsidies.total, args.decimal)
        doc["subsidies_decimal"] = [
            format_decimal(s, args.decimal) for s in result.subsidies.amounts
        ]
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    if args.certificate:
        _write(args.certificate, cert.to_json())
    if args.emit_graph:
        _write(
            args.emit_graph,
            to_dot(result.graph, inst.agent_names, inst.item_names),
        )
    print(
        f"total subsidy {_rational(result.subsidies.total, args.decimal)} "
        f"<= bound {_rational(cert.global_bound, args.decimal)}: "
        f"{'ok' if cert.holds else 'VIOLATED'}"
    )
    return EXIT_OK if cert.holds else EXIT_GUARANTEE


def cmd_verify(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.input))
    allocation, claimed = parse_allocation(_read(args.allocation))
    if allocation.m != inst.m:
        raise ModelError(
            f"allocation covers {allocation.m} items, instance has {inst.m}"
        )
    if any(not 0 <= o < inst.n for o in allocation.owner):
        raise ModelError("allocation names an agent outside the instance")
    if claimed is not None and len(claimed.amounts) != inst.n:
        raise ModelError(
            f"subsidy vector has {len(claimed.amounts)} entries for n={inst.n}"
        )
    minimum = compute_subsidies(inst, allocation)
    subsidies = claimed if claimed is not None else minimum
    violations = 0
    for i in inst.agents():
        share = wprop_share(inst, i)
        load = allocation.bundle_cost(inst, i)
        if inst.kind == CHORES:
            slack = share + subsidies.amounts[i] - load
        else:
            slack = load + subsidies.amounts[i] - share
        status = "ok" if slack >= 0 else "VIOLATED"
        if slack < 0:
            violations += 1
        print(
            f"agent {i}: share={_rational(share, args.decimal)} "
            f"bundle={_rational(load, args.decimal)} "
            f"subsidy={_rational(subsidies.amounts[i], args.decimal)} "
            f"slack={_rational(slack, args.decimal)} {status}"
        )
    print(f"total subsidy {_rational(subsidies.total, args.decimal)}")
    if violations:
        print(f"{violations} agent(s) below their share")
        return EXIT_GUARANTEE
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.input))
    result = run_pipeline(inst)
    try:
        _, optimum = brute_force_rounding(
            result.ido_instance, result.fractional, cap=args.cap
        )
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    pipeline_total = result.subsidies.total
    gap = pipeline_total - optimum.total
    print(f"optimum subsidy {_rational(optimum.total, args.decimal)}")
    print(f"pipeline subsidy {_rational(pipeline_total, args.decimal)}")
    print(f"gap {_rational(gap, args.decimal)}")
    print(f"certificate bound {_rational(result.certificate.global_bound, args.decimal)}")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    inst = gen_random_instance(
        n=args.agents,
        m=args.items,
        kind=args.kind,
        seed=args.seed,
        dist=args.dist,
        denominator=args.denominator,
        force_ido=args.ido,
    )
    text = serialize_instance(inst)
    if args.out:
        _write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    rows = ["n,total_subsidy,bound"]
    for index in range(args.count):
        rng_seed = args.seed + index
        n = 2 + (rng_seed % (args.max_agents - 1)) if args.max_agents > 2 else 2
        inst = gen_random_instance(
            n=n,
            m=max(n, args.items),
            kind=args.kind,
            seed=rng_seed,
            dist=args.dist,
        )
        result = run_pipeline(inst)
        rows.append(
            f"{n},{result.subsidies.total},{result.certificate.global_bound}"
        )
    text = "\n".join(rows) + "\n"
    if args.out:
        _write(args.out, text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subsidy-fairdiv",
        description=(
            "Weighted proportional allocation of chores and goods with "
            "subsidies, exact rational arithmetic, and certified bounds."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("allocate", help="run the full pipeline on an instance file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", help="write the allocation document here")
    p.add_argument("--certificate", help="write the bound certificate here")
    p.add_argument("--emit-graph", help="write the item-sharing forest as DOT")
    p.add_argument(
        "--baseline",
        action="store_true",
        help="use per-item threshold rounding (bound (n-1)/2) instead",
    )
    p.add_argument("--decimal", type=int, help="also render rationals with this many digits")
    p.set_defaults(func=cmd_allocate)

    p = sub.add_parser("verify", help="check an allocation file against an instance")
    p.add_argument("--input", required=True)
    p.add_argument("--allocation", required=True)
    p.add_argument("--decimal", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force optimum and gap to the pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--decimal", type=int)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="write a deterministic random instance")
    p.add_argument("--agents", type=int, required=True)
    p.add_argument("--items", type=int, required=True)
    p.add_argument("--kind", choices=KINDS, default="chores")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", choices=DISTRIBUTIONS, default=UNIFORM)
    p.add_argument("--denominator", type=int, default=10)
    p.add_argument("--ido", action="store_true", help="sort rows so the instance is IDO")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="CSV of (n, total subsidy, bound) over random runs")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-agents", type=int, default=10)
    p.add_argument("--items", type=int, default=12)
    p.add_argument("--kind", choices=KINDS, default="chores")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dist", choices=DISTRIBUTIONS, default=UNIFORM)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

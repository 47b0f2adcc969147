"""Command line interface.

Exit codes: 0 success, 1 a consistency or verification failure, 2 bad usage
or a capacity problem (unreadable checkpoint, cap exceeded, ...).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import compactrep as cr
from . import oracle, search
from .errors import ConsistencyError, SmoothPellError
from .pellsolve import get_case, unit_data
from .smoothness import trial_factor_smooth

CHECKPOINT_ENV = "SMOOTHPELL_CHECKPOINT_DIR"
POLY_C = {"x2-1": -1, "x2+1": 1, "x2+2": 2, "x2-2": -2, "x2+4": 4, "x2-4": -4, "x2+4odd": 4, "x2-4odd": -4}


def _bound(text: str) -> int:
    b = int(text)
    if b < 3:
        raise argparse.ArgumentTypeError("bound must be at least 3")
    return b


def _big(text: str) -> int:
    return int(float(text)) if "e" in text.lower() else int(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _format_results(res: search.ResultSet, fmt: str) -> str:
    if fmt == "csv":
        return search.to_csv(res)
    if fmt == "json":
        return search.to_json(res)
    return search.summary_text(search.summarize(res))


def cmd_run(args) -> int:
    ckpt = args.checkpoint
    if ckpt is None and os.environ.get(CHECKPOINT_ENV):
        ckpt = os.path.join(os.environ[CHECKPOINT_ENV], f"{args.case}-B{args.bound}.ckpt.json")
    config = search.SearchConfig(
        args.case, args.bound, args.ceiling, args.workers, ckpt, args.checkpoint_every, stop_after=args.stop_after
    )
    res = search.run(config)
    _emit(_format_results(res, args.format), args.out)
    if not res.complete:
        print(f"stopped at subset {res.cursor} of {res.total_subsets}; rerun to resume", file=sys.stderr)
    return 0


def _pipeline_finds(case: str, bound: int, x: int, ceiling: int) -> tuple[bool, int]:
    sub, xx = case, x
    if case in search.COMPOSITES:
        if x % 2:
            sub = case + "odd"
        else:
            sub, xx = search.COMPOSITES[case][0][0], x // 2
    fac = trial_factor_smooth(abs(get_case(sub).f(xx)), bound) or {}
    d = 1
    for p, e in fac.items():
        if e % 2:
            d *= p
    out = search.process_d(search.SearchConfig(sub, bound, ceiling), d)
    return xx in [r.x for r in out.records], d


def cmd_verify(args) -> int:
    c = POLY_C[args.case]
    ok = True
    for x in args.x:
        fx = x * x + c
        fac = trial_factor_smooth(fx, args.bound) if fx >= 2 else None
        line = f"x={x} f(x)={fx} "
        if fac is None:
            line += f"NOT {args.bound}-smooth"
            ok = False
        else:
            line += "= " + "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in fac.items())
            if args.pipeline:
                found, d = _pipeline_finds(args.case, args.bound, x, args.ceiling)
                line += f"  [d={d}: {'found' if found else 'MISSED'} by pipeline]"
                ok &= found
        print(line)
    return 0 if ok else 1


def cmd_oracle(args) -> int:
    if args.results:
        res = search.load_results(args.results)
        rep = oracle.cross_validate(res.xs(), args.case, args.bound, args.x_limit)
        print(rep.to_json() if args.format == "json" else rep.to_text())
        return 0 if rep.ok else 1
    xs = oracle.brute_force(args.case, args.bound, args.x_limit)
    if args.format == "json":
        print(json.dumps(xs))
    else:
        print("\n".join(map(str, xs)))
    return 0


def cmd_report(args) -> int:
    res = search.load_results(args.results)
    if args.format == "json":
        _emit(json.dumps(search.summarize(res), indent=2, default=str), args.out)
    else:
        _emit(_format_results(res, args.format), args.out)
    return 0


def cmd_dump_compact(args) -> int:
    ud = unit_data(args.d, args.ceiling)
    text = cr.dumps(ud.eta)
    if args.format == "json":
        text = json.dumps(
            {"d": args.d, "regulator": str(ud.reg.value), "norm": ud.norm, "terms": [list(map(str, t)) for t in ud.eta.terms]},
            indent=2,
        )
    _emit(text, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smoothpell", description="Find all x with x^2 + c smooth.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, cases=search.ALL_CASES):
        p.add_argument("--case", required=True, choices=cases)
        p.add_argument("--bound", required=True, type=_bound, help="primes must be < bound")

    p = sub.add_parser("run", help="search all squarefree d")
    common(p)
    p.add_argument("--ceiling", type=_big, default=search.infra.DEFAULT_CEILING)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--checkpoint-every", type=int, default=1024)
    p.add_argument("--stop-after", type=int, default=None, help=argparse.SUPPRESS)
    p.add_argument("--format", choices=("csv", "json", "text"), default="csv")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="trial-divide f(x) and optionally rerun the pipeline for its d")
    common(p)
    p.add_argument("--x", required=True, nargs="+", type=int, action="extend")
    p.add_argument("--pipeline", action="store_true")
    p.add_argument("--ceiling", type=_big, default=10**30)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force sieve, or cross-validate a result file")
    common(p, tuple(oracle.POLYNOMIALS))
    p.add_argument("--x-limit", type=_big, default=10**7)
    p.add_argument("--results", default=None)
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("report", help="summarize a result file")
    p.add_argument("results")
    p.add_argument("--format", choices=("csv", "json", "text"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("dump-compact", help="compact representation of the fundamental unit")
    p.add_argument("d", type=_big)
    p.add_argument("--ceiling", type=_big, default=10**30)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_dump_compact)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return 1
    except (SmoothPellError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

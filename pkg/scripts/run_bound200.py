"""Bound-200 runs for the five large cases, with checkpoints and a ceiling."""

import argparse
import os
import time

from smoothpell import search

CASES = [("x2+1", 200), ("x2+4odd", 200), ("x2-4odd", 100), ("x2+2", 200), ("x2-2", 200)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ceiling", type=float, default=1e12)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--case", action="append", help="restrict to these cases")
    args = ap.parse_args()
    os.makedirs(args.outdir, exist_ok=True)
    for case, B in CASES:
        if args.case and case not in args.case:
            continue
        stem = os.path.join(args.outdir, f"{case}-B{B}")
        cfg = search.SearchConfig(
            case, B, ceiling=int(args.ceiling), workers=args.workers, checkpoint=stem + ".ckpt.json"
        )
        t0 = time.time()
        res = search.run(cfg)
        with open(stem + ".csv", "w") as fh:
            fh.write(search.to_csv(res))
        print(f"{case} B={B}: {res.count} solutions, ledger {res.ledger}, {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()

"""Compare pipeline output against the brute-force sieve for small bounds."""

import argparse

from smoothpell import oracle, search


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bounds", type=int, nargs="+", default=[10, 42, 50])
    ap.add_argument("--x-limit", type=float, default=1e7)
    args = ap.parse_args()
    bad = 0
    for case in oracle.POLYNOMIALS:
        for B in args.bounds:
            res = search.run(search.SearchConfig(case, B))
            rep = oracle.cross_validate(res, case, B, int(args.x_limit))
            print(rep.to_text())
            bad += rep.mismatches
    print(f"total mismatches: {bad}")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()

"""Find every x with x^2 - 1 having all prime factors below 42 (default)."""

import argparse

from smoothpell import search


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    res = search.run(search.SearchConfig("x2-1", args.bound, workers=args.workers))
    odd = [x for x in res.xs() if x % 2 and x >= 3]
    print(f"{len(odd)} odd x >= 3 over {res.total_subsets} subsets")
    print("largest:", sorted(odd)[-3:])
    print("largest d with a solution:", max(r.d for r in res.records))


if __name__ == "__main__":
    main()

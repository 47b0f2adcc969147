"""Find every x with x^2 + 1 having all prime factors below 100 (default)."""

import argparse

from smoothpell import search


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--bound", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    res = search.run(search.SearchConfig("x2+1", args.bound, workers=args.workers))
    print(search.summary_text(search.summarize(res)))


if __name__ == "__main__":
    main()

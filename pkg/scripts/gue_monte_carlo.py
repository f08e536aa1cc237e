#!/usr/bin/env python3
"""Compare GUE word traces with semicircular family moments for a given covariance."""
from __future__ import annotations

import argparse
import json

from freechaos.randmat import mc_compare
from freechaos.wigner import words_up_to


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--covariance", default="[[2,1],[1,2]]", help="JSON matrix")
    ap.add_argument("--max-len", type=int, default=4)
    ap.add_argument("-N", type=int, default=512)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    C = json.loads(args.covariance)
    words = list(words_up_to(len(C), args.max_len))
    rows = mc_compare(C, words, args.N, args.reps, args.seed, args.threads)
    for r in rows:
        tag = "ok " if r.passed else "BAD"
        print(f"{tag} {''.join(map(str, r.word)):>8}  pred={r.prediction:9.5f}  "
              f"est={r.estimate:9.5f}  se={r.stderr:.5f}")
    print(f"{sum(r.passed for r in rows)}/{len(rows)} within 3 se + 10/N^2")


if __name__ == "__main__":
    main()

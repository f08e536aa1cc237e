#!/usr/bin/env python3
"""Print M(F_n) and dyadic slopes for Hermite-rank-q functionals of fractional Gaussian noise."""
from __future__ import annotations

import argparse

from freechaos.breuer_major import MAX_EXACT_N, bm_rate_experiment


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", default="0.5:2,0.3:3,0.6:3,0.8:3", help="comma list of H:q")
    ap.add_argument("--min-log2", type=int, default=5)
    ap.add_argument("--max-log2", type=int, default=MAX_EXACT_N.bit_length() - 1)
    args = ap.parse_args()
    ns = [2**k for k in range(args.min_log2, args.max_log2 + 1)]
    for case in args.cases.split(","):
        H, q = case.split(":")
        res = bm_rate_experiment(float(H), int(q), ns)
        print(f"H={res.H} q={res.q} theoretical={res.theoretical:+.4f} "
              f"last={res.last_slope:+.4f} aitken={res.aitken_slope:+.4f}")
        for r in res.rows:
            slope = "" if r.slope is None else f"{r.slope:+.4f}"
            print(f"  n={r.n:5d}  M={r.m_of_f:.6e}  {slope}")


if __name__ == "__main__":
    main()

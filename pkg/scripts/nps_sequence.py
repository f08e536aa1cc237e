#!/usr/bin/env python3
"""Show a second-chaos pair converging to a correlated semicircular pair."""
from __future__ import annotations

import argparse

from freechaos.nps import nps_sequence


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-c", type=float, default=0.5, help="target correlation")
    ap.add_argument("--max-log4", type=int, default=6)
    args = ap.parse_args()
    ks = [4**j for j in range(1, args.max_log4 + 1)]
    for s in nps_sequence(ks, args.c):
        print(f"k={s.k:6d}  M(F)={s.m_of_f:.6f}  max moment error={s.max_moment_error:.3e}")


if __name__ == "__main__":
    main()

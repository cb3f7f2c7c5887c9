"""Bound states for several (N, p): heights, Dirichlet energies, Pohozaev and decay checks."""
import argparse
import time

from katlas.cache import solve_cached
from katlas.nonlinearity import PowerNonlinearity

CASES = [(1, 4.0), (2, 4.0), (3, 4.0), (3, 3.0), (4, 3.0), (5, 2.5), (5, 2.2), (6, 2.2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=2)
    args = ap.parse_args()
    print(f"{'N':>2} {'p':>4} {'k':>2} {'zeta0':>14} {'D':>18} {'|S-D/N|/D':>10} {'decay':>7} {'sec':>5}")
    for N, p in CASES:
        nl = PowerNonlinearity.single(1.0, p)
        for k in range(1 if N == 1 else args.k_max):
            t0 = time.perf_counter()
            bs = solve_cached(nl, N, k)
            rel = abs(bs.pohozaev_residual) / bs.D
            print(f"{N:2d} {p:4.1f} {k:2d} {bs.zeta0:14.8g} {bs.D:18.12g} {rel:10.1e} {bs.decay_rate:7.4f} "
                  f"{time.perf_counter() - t0:5.2f}")


if __name__ == "__main__":
    main()

"""Grid and tolerance refinement of D for one bound state, solved without the cache."""
import argparse

from katlas.groundstate import ShootingConfig, find_bound_state
from katlas.nonlinearity import PowerNonlinearity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--p", type=float, default=4.0)
    ap.add_argument("--k", type=int, default=0)
    args = ap.parse_args()
    nl = PowerNonlinearity.single(1.0, args.p)
    ref = None
    for ppl, tol in [(50, 1e-8), (100, 1e-9), (200, 1e-10), (400, 1e-11)]:
        bs = find_bound_state(nl, args.N, args.k, ShootingConfig(points_per_length=ppl, integrator_rel_tol=tol))
        diff = "" if ref is None else f"{abs(bs.D - ref) / ref:.2e}"
        print(f"points/length={ppl:4d} rtol={tol:.0e} zeta0={bs.zeta0:.15g} D={bs.D:.15g} change={diff}")
        ref = bs.D


if __name__ == "__main__":
    main()

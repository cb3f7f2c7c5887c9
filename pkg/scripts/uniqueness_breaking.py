"""Two positive radial solutions from one ground state (N >= 5, a > 0, b < b*)."""
import argparse

from katlas import rescale as rs
from katlas.cache import solve_cached
from katlas.kirchhoff import uniqueness_breaking_witness
from katlas.nonlinearity import PowerNonlinearity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=5)
    ap.add_argument("--p", type=float, default=2.5)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--fractions", type=float, nargs="+", default=[0.25, 0.5, 0.9, 0.99],
                    help="b as fractions of b*")
    args = ap.parse_args()

    nl = PowerNonlinearity.single(1.0, args.p)
    ground = solve_cached(nl, args.N, 0)
    th = rs.thresholds_b(args.a, args.N, ground.D)
    print(f"D1={ground.D:.12g} b**/b*={th.b_dstar / th.b_star:.6f}")
    print(f"{'b/b*':>6} {'t1':>12} {'t2':>12} {'Phi(u1)':>14} {'Phi(u2)':>14} {'D(u1)/D(u2)':>12}")
    for frac in args.fractions:
        u1, u2 = uniqueness_breaking_witness(nl, args.a, frac * th.b_star, args.N, ground=ground)
        print(f"{frac:6.3f} {u1.t:12.6g} {u2.t:12.6g} {u1.phi_formula:14.6g} {u2.phi_formula:14.6g} "
              f"{u1.D_u / u2.D_u:12.6g}")


if __name__ == "__main__":
    main()

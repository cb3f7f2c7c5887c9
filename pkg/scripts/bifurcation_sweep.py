"""Branch diagram for N >= 5: number of lifts and their energies as b crosses b** and b*.

    python scripts/bifurcation_sweep.py --N 5 --p 2.5 --count 40 --out sweep.csv
"""
import argparse

import numpy as np

from katlas import rescale as rs
from katlas.cache import solve_cached
from katlas.kirchhoff import lift
from katlas.nonlinearity import PowerNonlinearity
from katlas.report import write_csv_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=5)
    ap.add_argument("--p", type=float, default=2.5)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args()

    nl = PowerNonlinearity.single(1.0, args.p)
    ground = solve_cached(nl, args.N, 0)
    th = rs.thresholds_b(args.a, args.N, ground.D)
    bs = np.union1d(np.linspace(0.5 * th.b_dstar, 1.1 * th.b_star, args.count), [th.b_dstar, th.b_star])
    rows = []
    for b in bs:
        sols = lift(ground, rs.KirchhoffParams(args.a, float(b), args.N))
        phis = {s.label: s.phi_formula for s in sols}
        lower = phis.get(rs.Branch.LOWER, phis.get(rs.Branch.TANGENT, np.nan))
        upper = phis.get(rs.Branch.UPPER, phis.get(rs.Branch.TANGENT, np.nan))
        worst = max((s.residual_pde for s in sols), default=0.0)
        rows.append((b, len(sols), lower, upper, worst))
        print(f"b={b:.6e} branches={len(sols)} phi_lower={lower:.6g} phi_upper={upper:.6g} max_pde={worst:.1e}")
    cols = list(zip(*rows))
    write_csv_atomic(args.out, ["b", "branch_count", "phi_lower", "phi_upper", "max_residual_pde"], cols)
    print(f"D1={ground.D:.12g} b**={th.b_dstar:.12g} b*={th.b_star:.12g} -> {args.out}")


if __name__ == "__main__":
    main()

"""Boundary trace of the maximal solution, lim d^(2/(q-1)) U, against ell_kappa."""
import argparse
from pathlib import Path

from hardylab import HardyParams
from hardylab import bvp
from hardylab.artifacts import write_json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa", type=float, default=0.25)
    ap.add_argument("--q", type=float, default=2.0)
    ap.add_argument("--out", default="results/keller_osserman")
    args = ap.parse_args()
    p = HardyParams(2, args.kappa, args.q)
    rep = bvp.solve_maximal(p)
    rep["saturation_M_vs_2M"] = bvp.saturation_check(p, 4e-4, 1e10)
    write_json(Path(args.out) / "maximal.json", rep)
    print(f"ell_hat={rep['ell_hat']:.5f}  ell_kappa={rep['ell_kappa']:.5f}  rel={rep['rel_error']:.2e}")


if __name__ == "__main__":
    main()

"""Existence threshold of the spherical profile versus the critical exponent.

For each kappa the shooting verdict is bisected in q and compared with q_c.
Writes phase_diagram.csv (kappa, q_c, q_flip, gap) and a q_c(kappa) curve.
"""
import argparse
from pathlib import Path

import numpy as np

from hardylab import HardyParams, derive_exponents
from hardylab import spherical as sph
from hardylab.artifacts import write_csv, write_series


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--n", type=int, default=512, help="azimuthal grid points")
    ap.add_argument("--resolution", type=float, default=1e-4)
    ap.add_argument("--out", default="results/phase_diagram")
    args = ap.parse_args()
    out = Path(args.out)
    g = sph.AzimuthalGrid.uniform(args.n)
    rows = []
    for kappa in (1 / 16, 1 / 8, 3 / 16, 1 / 4):
        qc = derive_exponents(HardyParams(args.N, kappa, 2.0)).q_c
        scan = sph.threshold_scan(args.N, kappa, qc - 0.3, qc + 0.3, g, resolution=args.resolution)
        rows.append({"kappa": kappa, "q_c": qc, "q_flip": scan["q_flip"], "gap": scan["q_flip"] - qc})
        print(f"kappa={kappa:.4f}  q_c={qc:.6f}  flip={scan['q_flip']:.6f}")
    write_csv(out / "phase_diagram.csv", rows, leading=("kappa", "q_c", "q_flip", "gap"))
    ks = np.linspace(1e-3, 0.25, 200)
    write_series(out / "qc_curve.dat", ks, [derive_exponents(HardyParams(args.N, k, 2.0)).q_c for k in ks])


if __name__ == "__main__":
    main()

"""Gaussian gap sweep over SNR for both receivers, one row per (decoder, rho, gamma)."""
import argparse
import pathlib

import numpy as np

from twsc.cli import write_csv
from twsc.scalar_coding import Decoder, gap_sweep_gaussian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results/fig3_gaussian_gap.csv")
    ap.add_argument("--gamma-min", type=float, default=0.1)
    ap.add_argument("--gamma-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=21)
    args = ap.parse_args()

    rhos = [i / 10 for i in range(10)]
    gammas = np.logspace(np.log10(args.gamma_min), np.log10(args.gamma_max), args.points)
    rows = [[dec.value, p.rho, p.param, 10 * np.log10(p.param), p.scalar_distortion, p.lower_bound, p.gap]
            for dec in Decoder for p in gap_sweep_gaussian(rhos, gammas, dec)]

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        write_csv(fh, ["decoder", "rho", "gamma", "gamma_db", "scalar_d", "lower_bound", "gap"], rows)
    print(f"wrote {out} ({len(rows)} rows)")


if __name__ == "__main__":
    main()

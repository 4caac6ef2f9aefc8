"""Monte Carlo check of the scalar distortions over a small parameter grid.

Prints one line per point and exits nonzero if any point misses 3 stderr.
"""
import argparse
import pathlib

from twsc.cli import write_csv
from twsc.models import Awgn, BinarySymmetric, BivariateGaussian, QaryAdditive, UniformQary
from twsc.scalar_coding import (
    Decoder,
    GaussianLinear,
    QaryIdentity,
    QaryMapWithSideInfo,
    gaussian_scalar_distortion,
    map_distortion_binary,
)
from twsc.simulator import SimulationConfig, sweep_simulation


def binary_identity(eps):
    return (BinarySymmetric(0.25), QaryAdditive(2, eps, eps), QaryIdentity(2).coder_pair()), eps


def binary_map(eps):
    scheme = (BinarySymmetric(0.25), QaryAdditive(2, eps, eps), QaryMapWithSideInfo(0.25, eps, eps).coder_pair())
    return scheme, map_distortion_binary(0.25, eps)


def qary4(eps):
    return (UniformQary(4), QaryAdditive(4, eps, eps), QaryIdentity(4).coder_pair()), eps


def gaussian(decoder):
    def make(gamma):
        ch = Awgn(gamma, gamma)
        scheme = (BivariateGaussian(0.5), ch, GaussianLinear(ch, 0.5, decoder).coder_pair())
        return scheme, gaussian_scalar_distortion(0.5, gamma, decoder)
    return make


CASES = {
    "binary-identity": (binary_identity, [0.05, 0.1, 0.2, 0.4]),
    "binary-map": (binary_map, [0.05, 0.1, 0.2, 0.4]),
    "qary4-identity": (qary4, [0.05, 0.3, 0.6]),
    "gaussian-cancelled": (gaussian(Decoder.CANCELLED_MMSE), [0.1, 1.0, 3.0, 10.0]),
    "gaussian-side-info": (gaussian(Decoder.SIDE_INFO_MMSE), [0.1, 1.0, 3.0, 10.0]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--block-length", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20190101)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", default="results/mc_validation.csv")
    args = ap.parse_args()

    config = SimulationConfig(args.trials, args.block_length, args.seed, args.workers)
    rows, misses = [], 0
    for name, (make, grid) in CASES.items():
        analytic = {v: make(v)[1] for v in grid}
        for value, res in sweep_simulation(config, grid, lambda v: make(v)[0]):
            ok = abs(res.d1_hat - analytic[value]) <= 3 * res.stderr1
            misses += not ok
            rows.append([name, value, res.d1_hat, res.stderr1, analytic[value], ok])
            print(f"{name:20s} {value:6.3f}  d1_hat={res.d1_hat:.5f}  analytic={analytic[value]:.5f}  "
                  f"{'ok' if ok else 'MISS'}")

    out = pathlib.Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        write_csv(fh, ["case", "param", "d1_hat", "stderr1", "d1_analytic", "within_3sigma"], rows)
    print(f"wrote {out}; {misses} of {len(rows)} points outside 3 stderr")
    raise SystemExit(1 if misses else 0)


if __name__ == "__main__":
    main()

"""Command-line front end; every subcommand writes CSV to stdout.

Exit codes: 0 success (or "inside" for ``region``), 1 "outside" for
``region``, 2 invalid parameters, 3 simulation or oracle failure.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import sys

import numpy as np

from twsc import __version__
from twsc.bounds import (
    capacity_awgn,
    capacity_qary_additive,
    converse_lb_binary,
    converse_lb_gaussian,
    converse_lb_qary_uniform,
    gaussian_jscc_region,
    jscc_region_independent,
    achievable_region_lemma1,
)
from twsc.models import Awgn, BinarySymmetric, BivariateGaussian, QaryAdditive, UniformQary
from twsc.rd_functions import (
    BinaryCurve,
    ConvergenceError,
    GaussianCurve,
    QaryCurve,
    WynerZivGaussianCurve,
    blahut_arimoto_rd,
    hamming_matrix,
)
from twsc.scalar_coding import (
    Decoder,
    GaussianLinear,
    QaryIdentity,
    QaryMapWithSideInfo,
    delta_from_rho,
    gap_sweep_binary,
    gap_sweep_gaussian,
    gaussian_scalar_distortion,
    map_distortion_binary,
    scalar_distortion_qary,
)
from twsc.simulator import SimulationConfig, SimulationError, run_simulation

DEFAULT_SEED = 20190101
ORACLE_TOL = 1e-4


class UsageError(Exception):
    def __init__(self, flag, message):
        super().__init__(f"{flag}: {message}")


class RunFailure(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0.0:
        x = 0.0  # drop the sign of -0.0
    return f"{x:.12g}"


def write_csv(buf, header, rows):
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")


def parse_grid(text: str):
    """``"a,b,c"``, ``"start:stop:num"`` (inclusive linspace) or ``"log:start:stop:num"``."""
    text = text.strip()
    if text.startswith("log:"):
        a, b, n = text[4:].split(":")
        return [float(v) for v in np.logspace(np.log10(float(a)), np.log10(float(b)), int(n))]
    if ":" in text:
        a, b, n = text.split(":")
        return [float(v) for v in np.linspace(float(a), float(b), int(n))]
    return [float(v) for v in text.split(",") if v.strip()]


def grid_arg(text):
    try:
        g = parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc
    if not g:
        raise argparse.ArgumentTypeError("empty grid")
    return g


def _need(cond, flag, message):
    if not cond:
        raise UsageError(flag, message)


def _prob(value, flag, hi, lo=0.0):
    _need(value is not None, flag, "required")
    _need(lo <= value <= hi, flag, f"{value} outside [{lo}, {hi}]")
    return value


def _q(value):
    _need(value is not None, "--q", "required")
    _need(value >= 2, "--q", f"{value} must be >= 2")
    return value


def _gamma(value, flag):
    _need(value is not None, flag, "required")
    _need(value >= 0 and math.isfinite(value), flag, f"{value} must be a finite SNR >= 0")
    return value


def _rho(value, lo=-1.0):
    _need(value is not None, "--rho", "required")
    _need(lo <= value <= 1.0, "--rho", f"{value} outside [{lo}, 1]")
    return value


def _rate(value):
    _need(value > 0 and math.isfinite(value), "--r", f"{value} must be > 0")
    return value


# ------------------------------------------------------------ commands


def cmd_bounds(args, buf):
    if args.family == "binary":
        delta = _prob(args.delta, "--delta", 0.5)
        e1 = _prob(args.eps1, "--eps1", 0.5)
        e2 = _prob(args.eps2, "--eps2", 0.5)
        write_csv(buf, ["delta", "eps1", "eps2", "d1_lb", "d2_lb"],
                  [[delta, e1, e2, converse_lb_binary(delta, e2), converse_lb_binary(delta, e1)]])
    elif args.family == "qary":
        q = _q(args.q)
        e1 = _prob(args.eps1, "--eps1", (q - 1) / q)
        e2 = _prob(args.eps2, "--eps2", (q - 1) / q)
        write_csv(buf, ["q", "eps1", "eps2", "d1_lb", "d2_lb"],
                  [[q, e1, e2, converse_lb_qary_uniform(q, e2), converse_lb_qary_uniform(q, e1)]])
    else:
        rho = _rho(args.rho)
        g1, g2 = _gamma(args.gamma1, "--gamma1"), _gamma(args.gamma2, "--gamma2")
        r = _rate(args.r)
        write_csv(buf, ["rho", "gamma1", "gamma2", "r", "d1_lb", "d2_lb"],
                  [[rho, g1, g2, r, converse_lb_gaussian(rho, g1, r), converse_lb_gaussian(rho, g2, r)]])
    return 0


def cmd_gap(args, buf):
    rhos = args.rho
    if args.family == "binary":
        for rho in rhos:
            _need(0.0 <= rho <= 1.0, "--rho", f"{rho} outside [0, 1] for binary sources")
        eps = args.eps or parse_grid("0.01:0.5:50")
        for e in eps:
            _need(0.0 <= e <= 0.5, "--eps", f"{e} outside [0, 0.5]")
        points = []
        for rho in rhos:
            for p in gap_sweep_binary([delta_from_rho(rho)], eps):
                points.append((rho, p))
    else:
        for rho in rhos:
            _need(-1.0 <= rho <= 1.0, "--rho", f"{rho} outside [-1, 1]")
        gammas = args.gamma or parse_grid("log:0.1:10:21")
        for g in gammas:
            _need(g >= 0, "--gamma", f"{g} must be >= 0")
        decoder = Decoder(args.decoder)
        points = [(rho, p) for rho in rhos for p in gap_sweep_gaussian([rho], gammas, decoder)]
    write_csv(buf, ["rho", "param", "scalar_d", "lower_bound", "gap"],
              [[rho, p.param, p.scalar_distortion, p.lower_bound, p.gap] for rho, p in points])
    return 0


def _rd_curve(args):
    if args.curve == "binary":
        return BinaryCurve()
    if args.curve == "qary":
        return QaryCurve(_q(args.q))
    if args.curve == "gaussian":
        return GaussianCurve()
    rho = _rho(args.rho)
    _need(abs(rho) < 1.0, "--rho", "Wyner-Ziv curve needs |rho| < 1")
    return WynerZivGaussianCurve(rho)


def cmd_rd(args, buf):
    curve = _rd_curve(args)
    discrete = isinstance(curve, (BinaryCurve, QaryCurve))
    if args.d is None:
        lo = 0.0 if discrete else curve.d_max / 20
        grid = [float(v) for v in np.linspace(lo, curve.d_max, 20)]
    else:
        grid = args.d
    for d in grid:
        if discrete:
            _need(d >= 0 and math.isfinite(d), "--d", f"{d} must be >= 0")
        else:
            _need(d > 0 and math.isfinite(d), "--d", f"{d} must be > 0")
    rows = []
    if args.oracle:
        _need(discrete, "--oracle", "only available for the discrete curves")
        q = 2 if isinstance(curve, BinaryCurve) else curve.q
        p, dist = np.full(q, 1.0 / q), hamming_matrix(q)
        worst = 0.0
        for d in grid:
            rate = curve.rate(d)
            try:
                oracle = blahut_arimoto_rd(p, dist, d)
            except ConvergenceError as exc:
                raise RunFailure(f"Blahut-Arimoto failed at d={d}: {exc}") from exc
            diff = abs(rate - oracle)
            worst = max(worst, diff)
            rows.append([d, rate, oracle, diff])
        if worst > ORACLE_TOL:
            raise RunFailure(f"oracle disagreement {worst:.3e} exceeds {ORACLE_TOL}")
        write_csv(buf, ["d", "rate", "rate_oracle", "abs_diff"], rows)
    else:
        write_csv(buf, ["d", "rate"], [[d, curve.rate(d)] for d in grid])
    return 0


def _mirror(args, a, b):
    # a single value given for a per-terminal pair applies to both terminals
    va, vb = getattr(args, a), getattr(args, b)
    setattr(args, a, vb if va is None else va)
    setattr(args, b, va if vb is None else vb)


def _simulation_setup(args):
    """Returns (source, channel, coders, analytic (d1, d2), lower bounds (d1, d2))."""
    _mirror(args, "eps1", "eps2")
    _mirror(args, "gamma1", "gamma2")
    if args.family == "binary":
        delta = _prob(args.delta, "--delta", 0.5)
        e1 = _prob(args.eps1, "--eps1", 0.5)
        e2 = _prob(args.eps2, "--eps2", 0.5)
        source, channel = BinarySymmetric(delta), QaryAdditive(2, e1, e2)
        if args.scheme == "map":
            coders = QaryMapWithSideInfo(delta, e1, e2).coder_pair()
            analytic = (map_distortion_binary(delta, e2), map_distortion_binary(delta, e1))
        else:
            coders = QaryIdentity(2).coder_pair()
            analytic = (scalar_distortion_qary(2, e2), scalar_distortion_qary(2, e1))
        lbs = (converse_lb_binary(delta, e2), converse_lb_binary(delta, e1))
    elif args.family == "qary":
        q = _q(args.q)
        _need(args.scheme == "identity", "--scheme", "q-ary sources only support 'identity'")
        e1 = _prob(args.eps1, "--eps1", (q - 1) / q)
        e2 = _prob(args.eps2, "--eps2", (q - 1) / q)
        source, channel = UniformQary(q), QaryAdditive(q, e1, e2)
        coders = QaryIdentity(q).coder_pair()
        analytic = (scalar_distortion_qary(q, e2), scalar_distortion_qary(q, e1))
        lbs = (converse_lb_qary_uniform(q, e2), converse_lb_qary_uniform(q, e1))
    else:
        rho = _rho(args.rho)
        g1, g2 = _gamma(args.gamma1, "--gamma1"), _gamma(args.gamma2, "--gamma2")
        _need(g1 > 0, "--gamma1", "simulation needs a positive transmit power")
        _need(g2 > 0, "--gamma2", "simulation needs a positive transmit power")
        decoder = Decoder(args.decoder)
        # unit noise variances, so the powers equal the SNRs
        source, channel = BivariateGaussian(rho), Awgn(g1, g2, 1.0, 1.0)
        coders = GaussianLinear(channel, rho, decoder).coder_pair()
        analytic = (gaussian_scalar_distortion(rho, g1, decoder),
                    gaussian_scalar_distortion(rho, g2, decoder))
        lbs = (converse_lb_gaussian(rho, g1, 1.0), converse_lb_gaussian(rho, g2, 1.0))
    return source, channel, coders, analytic, lbs


def _within(d_hat, stderr, ref):
    if math.isnan(stderr):
        return d_hat == ref
    return abs(d_hat - ref) <= 3.0 * stderr


def cmd_simulate(args, buf):
    _need(args.trials >= 1, "--trials", "must be >= 1")
    _need(args.block_length >= 1, "--block-length", "must be >= 1")
    _need(args.workers >= 1, "--workers", "must be >= 1")
    source, channel, coders, analytic, lbs = _simulation_setup(args)
    config = SimulationConfig(args.trials, args.block_length, args.seed, args.workers)
    try:
        res = run_simulation(source, channel, coders, config)
    except SimulationError as exc:
        raise RunFailure(str(exc)) from exc
    ok1 = _within(res.d1_hat, res.stderr1, analytic[0])
    ok2 = _within(res.d2_hat, res.stderr2, analytic[1])
    scheme = args.decoder if args.family == "gaussian" else args.scheme
    write_csv(
        buf,
        ["family", "scheme", "seed", "trials", "block_length", "total_symbols",
         "d1_hat", "stderr1", "d1_analytic", "d1_lb", "within_3sigma_1",
         "d2_hat", "stderr2", "d2_analytic", "d2_lb", "within_3sigma_2", "within_3sigma"],
        [[args.family, scheme, res.seed, res.trials, res.block_length, res.total_symbols,
          res.d1_hat, res.stderr1, analytic[0], lbs[0], ok1,
          res.d2_hat, res.stderr2, analytic[1], lbs[1], ok2, ok1 and ok2]],
    )
    return 0


def cmd_region(args, buf):
    r = _rate(args.r)
    _need(args.d1 is not None and args.d1 >= 0, "--d1", "required, >= 0")
    _need(args.d2 is not None and args.d2 >= 0, "--d2", "required, >= 0")
    d = (args.d1, args.d2)
    if args.region == "theorem1":
        if args.q is not None:
            q = _q(args.q)
            e1 = _prob(args.eps1, "--eps1", (q - 1) / q)
            e2 = _prob(args.eps2, "--eps2", (q - 1) / q)
            curves = (QaryCurve(q), QaryCurve(q))
            # 1->2 is limited by the noise at terminal 2
            caps = (capacity_qary_additive(q, e2), capacity_qary_additive(q, e1))
        else:
            g1, g2 = _gamma(args.gamma1, "--gamma1"), _gamma(args.gamma2, "--gamma2")
            _need(d[0] > 0, "--d1", "Gaussian distortion must be > 0")
            _need(d[1] > 0, "--d2", "Gaussian distortion must be > 0")
            curves = (GaussianCurve(), GaussianCurve())
            caps = (capacity_awgn(g1), capacity_awgn(g2))
        verdict = jscc_region_independent(curves, caps, r, d)
    else:
        rho = _rho(args.rho)
        g1, g2 = _gamma(args.gamma1, "--gamma1"), _gamma(args.gamma2, "--gamma2")
        _need(d[0] > 0, "--d1", "Gaussian distortion must be > 0")
        _need(d[1] > 0, "--d2", "Gaussian distortion must be > 0")
        if args.region == "lemma1":
            verdict = achievable_region_lemma1(BivariateGaussian(rho), (g1, g2), r, d)
        else:
            verdict = gaussian_jscc_region(rho, (g1, g2), r, d)
    word = "inside" if verdict.inside else "outside"
    buf.write(f"{word} binding={verdict.binding_constraint} margin={fmt(verdict.margin)} "
              f"margins={fmt(verdict.margins[0])};{fmt(verdict.margins[1])}\n")
    return 0 if verdict.inside else 1


# -------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twsc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"twsc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--manifest", metavar="PATH", help="write a JSON run manifest here")

    p = sub.add_parser("bounds", help="converse distortion lower bounds")
    p.add_argument("family", choices=["binary", "qary", "gaussian"])
    p.add_argument("--delta", type=float)
    p.add_argument("--q", type=int)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--r", type=float, default=1.0)
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("gap", help="scalar coding distortion minus the lower bound")
    p.add_argument("family", choices=["binary", "gaussian"])
    p.add_argument("--rho", type=grid_arg, default=parse_grid("0:0.9:10"),
                   help="correlation grid (default 0,0.1,...,0.9)")
    p.add_argument("--eps", type=grid_arg, help="binary noise grid (default 0.01:0.5:50)")
    p.add_argument("--gamma", type=grid_arg, help="SNR grid (default log:0.1:10:21)")
    p.add_argument("--decoder", choices=[d.value for d in Decoder], default=Decoder.CANCELLED_MMSE.value)
    common(p)
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("rd", help="rate-distortion curves")
    p.add_argument("curve", choices=["binary", "qary", "gaussian", "wz"])
    p.add_argument("--q", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--d", type=grid_arg, help="distortion grid")
    p.add_argument("--oracle", action="store_true", help="add Blahut-Arimoto values")
    common(p)
    p.set_defaults(func=cmd_rd)

    p = sub.add_parser("simulate", help="Monte Carlo run of a scalar scheme")
    p.add_argument("family", choices=["binary", "qary", "gaussian"])
    p.add_argument("--scheme", choices=["identity", "map"], default="identity")
    p.add_argument("--decoder", choices=[d.value for d in Decoder], default=Decoder.CANCELLED_MMSE.value)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--q", type=int)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--block-length", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("region", help="test a distortion pair against a region")
    p.add_argument("region", choices=["lemma1", "theorem1", "theorem2"])
    p.add_argument("--rho", type=float)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--q", type=int)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--d1", type=float)
    p.add_argument("--d2", type=float)
    common(p)
    p.set_defaults(func=cmd_region)
    return ap


def write_manifest(path, args, output: str):
    params = {k: v for k, v in vars(args).items() if k not in ("func", "manifest")}
    manifest = {
        "subcommand": args.command,
        "params": params,
        "seed": params.get("seed"),
        "version": __version__,
        "sha256": hashlib.sha256(output.encode()).hexdigest(),
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except UsageError as exc:
        print(f"twsc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except RunFailure as exc:
        print(f"twsc {args.command}: failed: {exc}", file=sys.stderr)
        return 3
    out = buf.getvalue()
    sys.stdout.write(out)
    sys.stdout.flush()
    if args.manifest:
        write_manifest(args.manifest, args, out)
    return code


if __name__ == "__main__":
    sys.exit(main())

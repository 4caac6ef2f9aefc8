"""The eight acceptance criteria, each with its runtime budget.

Run ``pytest tests/test_acceptance.py`` (one PASS/FAIL line per criterion in
the terminal summary) or ``python tests/test_acceptance.py``.
"""
import time

import numpy as np
import pytest

from twsc.bounds import (
    capacity_qary_additive,
    converse_lb_gaussian,
    converse_lb_qary_uniform,
    gaussian_jscc_region,
)
from twsc.info_measures import conditional_mutual_information
from twsc.models import Awgn, BinarySymmetric, BivariateGaussian, QaryAdditive
from twsc.rd_functions import blahut_arimoto_rd, hamming_matrix, rd_binary_hamming, rd_qary_hamming
from twsc.scalar_coding import (
    Decoder,
    GaussianLinear,
    QaryIdentity,
    delta_from_rho,
    gap_sweep_binary,
    gap_sweep_gaussian,
    gaussian_scalar_distortion,
    scalar_distortion_qary,
)
from twsc.simulator import SimulationConfig, run_simulation

RHO_GRID = [i / 10 for i in range(10)]


def c1_qary_converse_identity():
    rng = np.random.default_rng(101)
    worst, scalar_gap, bit_equal, scalar_is_eps = 0.0, 0.0, 0, True
    for _ in range(50):
        q = int(rng.integers(2, 9))
        eps = float(rng.uniform(0.0, (q - 1) / q))
        lb = converse_lb_qary_uniform(q, eps)
        scalar = scalar_distortion_qary(q, eps)
        worst = max(worst, abs(lb - eps))
        scalar_is_eps &= scalar == eps
        # the computed bound is a float root of an O(1) function: resolution ~1e-16 absolute
        scalar_gap = max(scalar_gap, abs(scalar - lb))
        bit_equal += scalar == lb
    ok = worst <= 1e-9 and scalar_is_eps and scalar_gap <= 1e-15
    return ok, (f"max |lb - eps| = {worst:.2e}, scalar == eps: {scalar_is_eps}, "
                f"scalar vs computed bound {scalar_gap:.1e} ({bit_equal}/50 bit-identical)")


def c2_gaussian_optimal_at_independence():
    diffs = [abs(gaussian_scalar_distortion(0.0, g, Decoder.CANCELLED_MMSE) - converse_lb_gaussian(0.0, g, 1.0))
             for g in (0.1, 1.0, 3.0, 10.0)]
    return max(diffs) <= 1e-12, f"max diff = {max(diffs):.2e}"


def grid_inverted_bound(delta, eps, step=1e-6):
    # smallest grid D in [0, 1/2] with 1 - H_b(D) <= 2 - H_b(delta) - H_b(eps)
    def hb(p):
        p = np.asarray(p, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            h = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
        return np.nan_to_num(h)
    d = np.arange(0.0, 0.5 + step / 2, step)
    budget = 2 - hb(delta) - hb(eps)
    return float(d[np.argmax(1 - hb(d) <= budget)])


def _ordering_checks(gaps):
    zero_row = float(np.max(np.abs(gaps[0])))
    ordered = bool(np.all(np.diff(gaps, axis=0) >= 0))
    nonneg = bool(np.all(gaps >= 0))
    return zero_row, ordered, nonneg


def c3_figure2_properties():
    eps = [i / 100 for i in range(1, 50)]
    gaps = np.array([[p.gap for p in gap_sweep_binary([delta_from_rho(r)], eps)] for r in RHO_GRID])
    zero_row, ordered, nonneg = _ordering_checks(gaps)
    (spot,) = gap_sweep_binary([0.25], [0.1])
    oracle_gap = 0.1 - grid_inverted_bound(0.25, 0.1)
    spot_err = abs(spot.gap - oracle_gap)
    ok = zero_row <= 1e-9 and ordered and nonneg and spot_err <= 1e-5
    return ok, (f"rho=0 row max {zero_row:.1e}, ordered={ordered}, nonneg={nonneg}, "
                f"spot gap {spot.gap:.6f} vs grid {oracle_gap:.6f}")


def c4_figure3_properties():
    gammas = np.logspace(-1, 1, 21)
    gaps = np.array([[p.gap for p in gap_sweep_gaussian([r], gammas, Decoder.CANCELLED_MMSE)] for r in RHO_GRID])
    analytic = np.array([[r * r / (1 + g) for g in gammas] for r in RHO_GRID])
    err = float(np.max(np.abs(gaps - analytic)))
    zero_row, ordered, nonneg = _ordering_checks(gaps)
    ok = err <= 1e-12 and zero_row <= 1e-9 and ordered and nonneg
    return ok, f"max |gap - rho^2/(1+gamma)| = {err:.1e}, ordered={ordered}, nonneg={nonneg}"


def c5_blahut_arimoto_oracle():
    worst = 0.0
    for q, rd in ((2, rd_binary_hamming), (3, lambda d: rd_qary_hamming(3, d)),
                  (4, lambda d: rd_qary_hamming(4, d))):
        p, dist = np.full(q, 1.0 / q), hamming_matrix(q)
        for d in np.linspace(0.0, (q - 1) / q, 20):
            worst = max(worst, abs(blahut_arimoto_rd(p, dist, float(d)) - rd(float(d))))
    return worst <= 1e-4, f"max |BA - closed form| = {worst:.2e}"


def c6_gaussian_region_boundary():
    rng = np.random.default_rng(106)
    worst_margin, inside_all, shrunk_out = 0.0, True, True
    for _ in range(100):
        rho = float(rng.uniform(-0.99, 0.99))
        g = (float(10 ** rng.uniform(-2, 2)), float(10 ** rng.uniform(-2, 2)))
        r = float(rng.uniform(0.25, 4.0))
        d = tuple((1 - rho * rho) / (1 + gi) ** (1 / r) for gi in g)
        v = gaussian_jscc_region(rho, g, r, d)
        inside_all &= v.inside
        worst_margin = max(worst_margin, abs(v.margin))
        shrunk_out &= not gaussian_jscc_region(rho, g, r, (0.999 * d[0], d[1])).inside
        shrunk_out &= not gaussian_jscc_region(rho, g, r, (d[0], 0.999 * d[1])).inside
    ok = inside_all and worst_margin <= 1e-12 and shrunk_out
    return ok, f"boundary inside={inside_all}, max |margin| = {worst_margin:.1e}, shrunk outside={shrunk_out}"


def _gaussian_case():
    ch = Awgn(3.0, 3.0)
    return BivariateGaussian(0.5), ch, GaussianLinear(ch, 0.5, Decoder.CANCELLED_MMSE).coder_pair()


def c7_monte_carlo():
    binary = (BinarySymmetric(0.5), QaryAdditive(2, 0.1, 0.1), QaryIdentity(2).coder_pair())
    gauss = _gaussian_case()
    hits_b = hits_g = 0
    for rep in range(100):
        rb = run_simulation(*binary, SimulationConfig(1000, 100, seed=rep))
        hits_b += abs(rb.d1_hat - 0.1) <= 3 * rb.stderr1
        rg = run_simulation(*gauss, SimulationConfig(1000, 1000, seed=rep))
        hits_g += abs(rg.d1_hat - 0.25) <= 3 * rg.stderr1
    replay = all(
        run_simulation(*case, SimulationConfig(1000, k, seed=7, workers=1))
        == run_simulation(*case, SimulationConfig(1000, k, seed=7, workers=8))
        for case, k in ((binary, 100), (gauss, 1000))
    )
    ok = hits_b >= 99 and hits_g >= 99 and replay
    return ok, f"binary {hits_b}/100, gaussian {hits_g}/100 within 3 stderr, 1-vs-8-worker replay={replay}"


def c8_capacity_consistency():
    worst = 0.0
    for q in (2, 3, 4):
        u = np.full(q, 1.0 / q)
        for eps in (0.0, 0.1, 0.3):
            ch = QaryAdditive(q, eps, eps)
            for direction in ("1->2", "2->1"):
                cmi = conditional_mutual_information(u, u, ch, direction)
                worst = max(worst, abs(cmi - capacity_qary_additive(q, eps)))
    return worst <= 1e-10, f"max |I - C| = {worst:.1e}"


CRITERIA = [
    (1, "q-ary converse identity", c1_qary_converse_identity, 1.0),
    (2, "Gaussian optimality at independence", c2_gaussian_optimal_at_independence, 1.0),
    (3, "binary gap sweep properties", c3_figure2_properties, 5.0),
    (4, "Gaussian gap sweep properties", c4_figure3_properties, 1.0),
    (5, "Blahut-Arimoto oracle equivalence", c5_blahut_arimoto_oracle, 30.0),
    (6, "Gaussian region boundary", c6_gaussian_region_boundary, 1.0),
    (7, "Monte Carlo validation", c7_monte_carlo, 60.0),
    (8, "capacity consistency", c8_capacity_consistency, 1.0),
]


def evaluate(number, name, fn, budget):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    passed = bool(ok) and elapsed < budget
    line = (f"{'PASS' if passed else 'FAIL'} criterion {number} ({name}): {detail}; "
            f"{elapsed:.2f}s of {budget:g}s")
    return passed, line


@pytest.mark.parametrize("number,name,fn,budget", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number, name, fn, budget):
    from conftest import ACCEPTANCE_LINES

    passed, line = evaluate(number, name, fn, budget)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(p for p, _ in results) else 1)

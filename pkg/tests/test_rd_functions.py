import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twsc.info_measures import binary_entropy, discrete_entropy, qary_noise_entropy
from twsc.rd_functions import (
    BinaryCurve,
    ConvergenceError,
    GaussianCurve,
    QaryCurve,
    WynerZivGaussianCurve,
    blahut_arimoto_rd,
    distortion_at_rate,
    hamming_matrix,
    rd_binary_hamming,
    rd_curve,
    rd_gaussian,
    rd_qary_hamming,
    wz_rd_gaussian,
)

# mpmath, 40 digits
RD_BIN_01 = 0.53100440641071878
RD_Q4_01 = 1.37250815633860316


def test_rd_binary_values():
    assert rd_binary_hamming(0.0) == 1.0
    assert rd_binary_hamming(0.5) == 0.0
    assert rd_binary_hamming(0.7) == 0.0
    assert rd_binary_hamming(0.1) == pytest.approx(RD_BIN_01, abs=1e-15)
    with pytest.raises(ValueError):
        rd_binary_hamming(-0.1)


def test_rd_qary_values():
    assert rd_qary_hamming(2, 0.1) == rd_binary_hamming(0.1)
    assert rd_qary_hamming(4, 0.75) == 0.0
    assert rd_qary_hamming(4, 0.1) == pytest.approx(RD_Q4_01, abs=1e-14)
    assert rd_qary_hamming(5, 0.0) == pytest.approx(math.log2(5))
    with pytest.raises(ValueError):
        rd_qary_hamming(1, 0.1)


def test_rd_gaussian_values():
    assert rd_gaussian(1.0) == 0.0
    assert rd_gaussian(0.25) == pytest.approx(1.0, abs=1e-15)
    assert rd_gaussian(2.0) == 0.0
    with pytest.raises(ValueError):
        rd_gaussian(0.0)


def test_wz_rd_gaussian_values():
    assert wz_rd_gaussian(0.0, 0.5) == rd_gaussian(0.5)
    assert wz_rd_gaussian(0.5, 0.75) == 0.0
    assert wz_rd_gaussian(0.5, 0.1875) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        wz_rd_gaussian(0.5, 0.0)
    with pytest.raises(ValueError):
        wz_rd_gaussian(1.0, 0.5)


CURVES = [BinaryCurve(), QaryCurve(3), QaryCurve(4), QaryCurve(7), GaussianCurve(),
          WynerZivGaussianCurve(0.5), WynerZivGaussianCurve(-0.9)]


@pytest.mark.parametrize("curve", CURVES, ids=repr)
def test_curves_non_increasing_and_convex(curve):
    lo = 1e-3 * curve.d_max
    grid = np.linspace(lo, 1.2 * curve.d_max, 301)
    r = np.array([curve.rate(d) for d in grid])
    assert np.all(np.diff(r) <= 1e-15)
    for i in range(len(grid) - 2):
        # grid is uniform, so the middle point is the midpoint of its neighbours
        assert r[i + 1] <= (r[i] + r[i + 2]) / 2 + 1e-12
    assert curve.rate(curve.d_max) == 0.0


@given(st.floats(-0.999, 0.999), st.floats(1e-6, 1.0))
def test_wyner_ziv_identity(rho, frac):
    d = frac * (1 - rho * rho)
    info = -0.5 * math.log2(1 - rho * rho)
    assert rd_gaussian(d) - info == pytest.approx(wz_rd_gaussian(rho, d), abs=1e-12)


def test_distortion_at_rate_binary_endpoints():
    assert distortion_at_rate(BinaryCurve(), 1.0) == 0.0
    assert distortion_at_rate(BinaryCurve(), 3.0) == 0.0
    assert distortion_at_rate(BinaryCurve(), 0.0) == 0.5
    with pytest.raises(ValueError):
        distortion_at_rate(BinaryCurve(), -0.1)


def test_distortion_at_rate_lands_on_noise_level():
    rate = 2.0 - qary_noise_entropy(4, 0.1)
    assert distortion_at_rate(QaryCurve(4), rate) == pytest.approx(0.1, abs=1e-9)


def test_distortion_at_rate_gaussian_exact():
    assert distortion_at_rate(GaussianCurve(), 1.0) == 0.25
    assert distortion_at_rate(WynerZivGaussianCurve(0.5), 1.0) == pytest.approx(0.1875, abs=1e-16)


@given(st.sampled_from(CURVES), st.floats(0.0, 4.0))
def test_distortion_at_rate_round_trip(curve, rate):
    d = distortion_at_rate(curve, rate)
    assert 0.0 <= d <= curve.d_max
    if d > 0:
        assert curve.rate(d) == pytest.approx(min(rate, curve.r_max), abs=1e-9)


def test_rd_curve_points():
    pts = rd_curve(BinaryCurve(), [0.0, 0.5])
    assert [(p.distortion, p.rate) for p in pts] == [(0.0, 1.0), (0.5, 0.0)]


@pytest.mark.parametrize("q,d,expected", [(2, 0.1, RD_BIN_01), (4, 0.1, RD_Q4_01)])
def test_blahut_arimoto_matches_closed_forms(q, d, expected):
    r = blahut_arimoto_rd(np.ones(q) / q, hamming_matrix(q), d)
    assert r == pytest.approx(expected, abs=1e-4)


def test_blahut_arimoto_zero_rate_at_max_distortion():
    p = np.array([0.2, 0.5, 0.3])
    dmax = float(np.min(p @ hamming_matrix(3)))
    assert blahut_arimoto_rd(p, hamming_matrix(3), dmax) == pytest.approx(0.0, abs=1e-6)


def test_blahut_arimoto_lossless_point():
    p = np.array([0.2, 0.5, 0.3])
    assert blahut_arimoto_rd(p, hamming_matrix(3), 0.0) == pytest.approx(discrete_entropy(p), abs=1e-6)


@pytest.mark.parametrize("d", [0.02, 0.1, 0.25, 0.39])
def test_blahut_arimoto_nonuniform_hamming(d):
    # known closed form for Hamming distortion, valid while d <= (q-1) * min(p)
    p = np.array([0.2, 0.5, 0.3])
    expected = discrete_entropy(p) - binary_entropy(d) - d * math.log2(2)
    assert blahut_arimoto_rd(p, hamming_matrix(3), d) == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("d", [0.05, 0.2, 0.45])
def test_blahut_arimoto_distortion_scale_invariance(d):
    # scaling the distortion matrix by c maps R(D) to R(D / c)
    p = np.array([0.5, 0.5])
    assert blahut_arimoto_rd(p, 2.0 * hamming_matrix(2), 2.0 * d) == pytest.approx(
        rd_binary_hamming(d), abs=1e-6)


def test_blahut_arimoto_squared_error_three_levels():
    # a source on {-1, 0, 1} with squared error; the rate must lie between
    # zero and the entropy, decrease with D, and vanish at the variance
    p = np.array([0.25, 0.5, 0.25])
    x = np.array([-1.0, 0.0, 1.0])
    dist = (x[:, None] - x[None, :]) ** 2
    rates = [blahut_arimoto_rd(p, dist, d) for d in (0.05, 0.2, 0.4)]
    assert 0 < rates[2] < rates[1] < rates[0] <= 1.5
    assert blahut_arimoto_rd(p, dist, 0.5) == 0.0


def test_blahut_arimoto_reports_non_convergence():
    p = np.array([0.1, 0.6, 0.3])
    dist = np.array([[0.0, 1.0, 4.0], [1.0, 0.0, 1.0], [4.0, 1.0, 0.0]])
    with pytest.raises(ConvergenceError) as info:
        blahut_arimoto_rd(p, dist, 0.3, max_iters=2, tol=1e-14)
    assert info.value.residual > 0


def test_blahut_arimoto_rejects_bad_input():
    with pytest.raises(ValueError):
        blahut_arimoto_rd([0.5, 0.5], hamming_matrix(3), 0.1)
    with pytest.raises(ValueError):
        blahut_arimoto_rd([0.5, 0.5], -hamming_matrix(2), 0.1)
    with pytest.raises(ValueError):
        blahut_arimoto_rd([0.5, 0.5], hamming_matrix(2) + 0.2, 0.1)

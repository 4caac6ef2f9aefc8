"""Rate-distortion functions (bits per source symbol).

Closed forms for the three source families used here, numeric inversion
``distortion_at_rate``, and a Blahut-Arimoto solver that serves as an
independent oracle for the discrete closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from twsc.info_measures import bisect, divergence_from_uniform


def rd_binary_hamming(d: float) -> float:
    if d < 0:
        raise ValueError(f"distortion d={d!r} must be >= 0")
    if d >= 0.5:
        return 0.0
    return divergence_from_uniform(2, d)


def rd_qary_hamming(q: int, d: float) -> float:
    """R(D) of a uniform q-ary source under Hamming distortion."""
    if int(q) != q or q < 2:
        raise ValueError(f"q={q!r} must be an integer >= 2")
    if d < 0:
        raise ValueError(f"distortion d={d!r} must be >= 0")
    if d >= (q - 1) / q:
        return 0.0
    # equals log2 q - H_b(d) - d log2(q-1)
    return divergence_from_uniform(q, d)


def rd_gaussian(d: float) -> float:
    """R(D) of a unit-variance Gaussian under squared error."""
    if d <= 0:
        raise ValueError(f"distortion d={d!r} must be > 0")
    if d >= 1.0:
        return 0.0
    return 0.5 * math.log2(1.0 / d)


def wz_rd_gaussian(rho: float, d: float) -> float:
    """Wyner-Ziv R(D) for unit-variance Gaussians with correlation ``rho``."""
    if not (-1.0 < rho < 1.0):
        raise ValueError(f"rho={rho!r} must satisfy |rho| < 1")
    if d <= 0:
        raise ValueError(f"distortion d={d!r} must be > 0")
    dmax = 1.0 - rho * rho
    if d >= dmax:
        return 0.0
    return 0.5 * math.log2(dmax / d)


# -------------------------------------------------------------- curves


@dataclass(frozen=True)
class RdCurvePoint:
    distortion: float
    rate: float


@dataclass(frozen=True)
class BinaryCurve:
    """Uniform binary source, Hamming distortion."""

    def rate(self, d):
        return rd_binary_hamming(d)

    @property
    def d_max(self):
        return 0.5

    @property
    def r_max(self):
        return 1.0


@dataclass(frozen=True)
class QaryCurve:
    q: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"q={self.q!r} must be an integer >= 2")

    def rate(self, d):
        return rd_qary_hamming(self.q, d)

    @property
    def d_max(self):
        return (self.q - 1) / self.q

    @property
    def r_max(self):
        return math.log2(self.q)


@dataclass(frozen=True)
class GaussianCurve:
    """Unit-variance Gaussian source, squared error."""

    def rate(self, d):
        return rd_gaussian(d)

    @property
    def d_max(self):
        return 1.0

    r_max = math.inf


@dataclass(frozen=True)
class WynerZivGaussianCurve:
    rho: float

    def __post_init__(self):
        if not (-1.0 < self.rho < 1.0):
            raise ValueError(f"rho={self.rho!r} must satisfy |rho| < 1")

    def rate(self, d):
        return wz_rd_gaussian(self.rho, d)

    @property
    def d_max(self):
        return 1.0 - self.rho * self.rho

    r_max = math.inf


RdCurve = BinaryCurve | QaryCurve | GaussianCurve | WynerZivGaussianCurve


def distortion_at_rate(curve: RdCurve, rate: float) -> float:
    """Smallest distortion ``d`` with ``curve.rate(d) <= rate``."""
    if rate < 0:
        raise ValueError(f"rate={rate!r} must be >= 0")
    if rate == 0:
        return curve.d_max
    if isinstance(curve, (GaussianCurve, WynerZivGaussianCurve)):
        # the Gaussian forms invert exactly
        return curve.d_max * 2.0 ** (-2.0 * rate)
    if rate >= curve.r_max:
        return 0.0
    return bisect(lambda d: curve.rate(d) <= rate, 0.0, curve.d_max)


def rd_curve(curve: RdCurve, distortions) -> list[RdCurvePoint]:
    return [RdCurvePoint(float(d), curve.rate(float(d))) for d in distortions]


# -------------------------------------------------------- Blahut-Arimoto


class ConvergenceError(RuntimeError):
    """Blahut-Arimoto did not reach ``tol`` within ``max_iters``."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _ba_fixed_slope(p, dist, s, q0, max_iters, tol):
    """Alternating minimization at Lagrange slope ``s`` (nats per unit distortion).

    Returns (rate_bits, distortion, output_marginal). Stops when the gap
    between Blahut's upper and lower bounds on the objective drops below tol.
    """
    # shifting each row by its minimum cancels in the conditional and in c
    a = np.exp(-s * (dist - dist.min(axis=1, keepdims=True)))
    q = q0.copy()
    residual = np.inf
    for _ in range(max_iters):
        z = a @ q
        c = (p / z) @ a
        q = q * c
        q /= q.sum()
        logc = np.log(c, where=c > 0, out=np.full_like(c, -np.inf))
        upper = -np.sum(q[q > 0] * logc[q > 0])
        lower = -np.max(logc)
        residual = upper - lower
        if residual < tol:
            break
    else:
        raise ConvergenceError(f"no convergence at slope {s:g}", residual)
    cond = a * q
    cond /= cond.sum(axis=1, keepdims=True)
    distortion = float(np.sum(p[:, None] * cond * dist))
    joint = p[:, None] * cond
    out = joint.sum(axis=0)
    mask = joint > 0
    ratio = cond[mask] / np.broadcast_to(out[None, :], cond.shape)[mask]
    rate = float(np.sum(joint[mask] * np.log2(ratio)))
    return max(rate, 0.0), distortion, q


def blahut_arimoto_rd(source_marginal, distortion_matrix, target, max_iters=10_000, tol=1e-10):
    """R(target) in bits, by bisection on the slope of the BA iteration.

    Raises :class:`ConvergenceError` if an inner iteration stalls.
    """
    p = np.asarray(source_marginal, dtype=float)
    dist = np.asarray(distortion_matrix, dtype=float)
    if dist.ndim != 2 or dist.shape[0] != p.size:
        raise ValueError("distortion matrix rows must match the source alphabet")
    if not np.all(np.isfinite(dist)) or np.any(dist < 0):
        raise ValueError("distortion matrix must be finite and non-negative")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("source_marginal is not a probability distribution")
    d_min = float(p @ dist.min(axis=1))
    d_max = float(np.min(p @ dist))
    if target < d_min - 1e-15:
        raise ValueError(f"target {target} below the minimum distortion {d_min}")
    if target >= d_max:
        return 0.0

    with np.errstate(under="ignore"):
        return _ba_bisect_slope(p, dist, target, max_iters, tol)


def _ba_bisect_slope(p, dist, target, max_iters, tol):
    # each solve warm-starts from the previous output marginal
    q0 = np.full(dist.shape[1], 1.0 / dist.shape[1])
    lo, hi = 0.0, 1.0
    r_hi, d_hi, q0 = _ba_fixed_slope(p, dist, hi, q0, max_iters, tol)
    while d_hi > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e4:
            # target sits at d_min: the supremum slope limit
            return r_hi
        r_hi, d_hi, q0 = _ba_fixed_slope(p, dist, hi, q0, max_iters, tol)
    best = (r_hi, d_hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        r_mid, d_mid, q0 = _ba_fixed_slope(p, dist, mid, q0, max_iters, tol)
        if d_mid > target:
            lo = mid
        else:
            hi = mid
            best = (r_mid, d_mid)
        if abs(d_mid - target) < 1e-13 or hi - lo < 1e-13 * hi:
            best = (r_mid, d_mid)
            break
    r_best, d_best = best
    # first-order correction along the curve, whose slope is -s / ln 2
    s = 0.5 * (lo + hi)
    return max(r_best - s / math.log(2) * (target - d_best), 0.0)


def hamming_matrix(q: int) -> np.ndarray:
    return 1.0 - np.eye(q)

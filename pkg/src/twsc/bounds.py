"""Capacities, converse distortion bounds and region membership tests.

Region tests return a :class:`RegionVerdict`. Margins are in bits:
``capacity - r * required_rate`` per direction, so positive means slack.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from twsc.info_measures import divergence_from_uniform
from twsc.models import BivariateGaussian
from twsc.rd_functions import (
    BinaryCurve,
    QaryCurve,
    distortion_at_rate,
    wz_rd_gaussian,
)

DIRECTIONS = ("1->2", "2->1")

# float slack used when deciding a boundary point; margins are reported raw
REGION_ATOL = 1e-12


@dataclass(frozen=True)
class RegionVerdict:
    inside: bool
    binding_constraint: str
    margin: float
    margins: tuple[float, float]
    strict: bool = False


@dataclass(frozen=True)
class LowerBound:
    distortion: float
    rate_budget: float
    vacuous: bool


def capacity_qary_additive(q: int, eps: float) -> float:
    """Per-direction capacity of the q-ary modulo-additive TWC, bits/use.

    Equal to log2 q - H(Z); computed as a divergence so that it stays exact
    enough to invert near the useless-channel end eps = (q-1)/q.
    """
    return divergence_from_uniform(q, eps)


def capacity_awgn(gamma: float) -> float:
    if gamma < 0:
        raise ValueError(f"gamma={gamma!r} must be >= 0")
    return 0.5 * math.log2(1.0 + gamma)


def _check_eps_binary(name, eps):
    if not (0.0 <= eps <= 0.5):
        raise ValueError(f"{name}={eps!r} outside [0, 0.5]")


def converse_bound_binary(delta: float, eps_noise: float) -> LowerBound:
    """Rate-one converse for the DSBS over the binary additive TWC."""
    _check_eps_binary("delta", delta)
    _check_eps_binary("eps_noise", eps_noise)
    # 2 - H_b(delta) - H_b(eps) = I(U1;U2) + (1 - H_b(eps))
    budget = divergence_from_uniform(2, delta) + divergence_from_uniform(2, eps_noise)
    vacuous = budget >= 1.0
    d = distortion_at_rate(BinaryCurve(), min(max(budget, 0.0), 1.0))
    # budget >= R(eps), so the inverse is at most eps; drop ulp-level noise above it
    return LowerBound(min(d, float(eps_noise)), budget, vacuous)


def converse_lb_binary(delta: float, eps_noise: float) -> float:
    return converse_bound_binary(delta, eps_noise).distortion


def converse_lb_qary_uniform(q: int, eps_noise: float) -> float:
    """Rate-one converse for independent uniform q-ary sources."""
    budget = capacity_qary_additive(q, eps_noise)
    return distortion_at_rate(QaryCurve(q), budget)


def converse_lb_gaussian(rho: float, gamma: float, r: float = 1.0) -> float:
    """(1 - rho^2) / (1 + gamma)^(1/r)."""
    if not (-1.0 <= rho <= 1.0):
        raise ValueError(f"rho={rho!r} outside [-1, 1]")
    if gamma < 0:
        raise ValueError(f"gamma={gamma!r} must be >= 0")
    if r <= 0:
        raise ValueError(f"r={r!r} must be > 0")
    return (1.0 - rho * rho) / (1.0 + gamma) ** (1.0 / r)


# ------------------------------------------------------------- regions


def _verdict(margins, required, strict, atol=REGION_ATOL):
    margins = tuple(float(m) for m in margins)
    if strict:
        # zero required rate is met by sending nothing, even over a dead link
        ok = [m > atol or req == 0.0 for m, req in zip(margins, required)]
    else:
        ok = [m >= -atol for m in margins]
    worst = min(range(2), key=lambda i: margins[i])
    failing = [i for i in range(2) if not ok[i]]
    binding = DIRECTIONS[failing[0] if failing else worst]
    return RegionVerdict(all(ok), binding, min(margins), margins, strict)


def _pair(d):
    d1, d2 = d
    return float(d1), float(d2)


def _rho(source):
    if isinstance(source, BivariateGaussian):
        return source.rho
    return float(source)


def _wz_or_zero(rho, d):
    if abs(rho) >= 1.0:
        # perfect side information: nothing needs to be sent
        return 0.0
    return wz_rd_gaussian(rho, d)


def achievable_region_lemma1(source, gammas, r, d) -> RegionVerdict:
    """Separate Wyner-Ziv + channel coding region (strict inequalities)."""
    rho = _rho(source)
    if r <= 0:
        raise ValueError(f"r={r!r} must be > 0")
    d1, d2 = _pair(d)
    req = (r * _wz_or_zero(rho, d1), r * _wz_or_zero(rho, d2))
    caps = (capacity_awgn(gammas[0]), capacity_awgn(gammas[1]))
    return _verdict([c - q for c, q in zip(caps, req)], req, strict=True)


def gaussian_jscc_region(rho, gammas, r, d, atol=REGION_ATOL) -> RegionVerdict:
    """Exact achievable region for Gaussian sources over the AWGN TWC."""
    rho = _rho(rho)
    if r <= 0:
        raise ValueError(f"r={r!r} must be > 0")
    d1, d2 = _pair(d)
    req = (r * _wz_or_zero(rho, d1), r * _wz_or_zero(rho, d2))
    caps = (capacity_awgn(gammas[0]), capacity_awgn(gammas[1]))
    return _verdict([c - q for c, q in zip(caps, req)], req, strict=False, atol=atol)


def jscc_region_independent(rd_curves, capacities, r, d, atol=REGION_ATOL) -> RegionVerdict:
    """Separation region for independent sources; ``rd_curves`` is one curve per direction."""
    if r <= 0:
        raise ValueError(f"r={r!r} must be > 0")
    d1, d2 = _pair(d)
    c1, c2 = rd_curves
    req = (r * c1.rate(d1), r * c2.rate(d2))
    return _verdict([capacities[0] - req[0], capacities[1] - req[1]], req,
                    strict=False, atol=atol)


def converse_region(rd_curves, source_information, capacities, r, d,
                    atol=REGION_ATOL) -> RegionVerdict:
    """Necessary condition R_i(D_i) <= I(U1;U2) + C_i / r, both directions.

    ``capacities`` must be the per-direction maxima over input distributions;
    for the additive families handled here those are the product-input values.
    Margins are reported in bits per source symbol scaled by ``r``.
    """
    if r <= 0:
        raise ValueError(f"r={r!r} must be > 0")
    d1, d2 = _pair(d)
    req = (r * (rd_curves[0].rate(d1) - source_information),
           r * (rd_curves[1].rate(d2) - source_information))
    return _verdict([capacities[0] - req[0], capacities[1] - req[1]], req,
                    strict=False, atol=atol)

"""Symbol-by-symbol (rate-one) coding for both channel families.

Each scheme turns into a :class:`CoderPair` for the simulator; the closed-form
distortions and gap sweeps reproduce the scalar-versus-bound comparisons.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from twsc.bounds import converse_lb_binary, converse_lb_gaussian
from twsc.models import Awgn, QaryAdditive


class Decoder(str, enum.Enum):
    CANCELLED_MMSE = "cancelled"  # scales the cancelled observation only
    SIDE_INFO_MMSE = "side-info"  # linear MMSE that also uses the own source


@dataclass(frozen=True)
class CoderPair:
    """Encoders ``f_i(u_i) -> x_i`` and decoders ``g_i(u_i, y_i) -> estimate of u_j``.

    All four callables act elementwise on numpy arrays.
    """

    encode1: Callable
    encode2: Callable
    decode1: Callable
    decode2: Callable
    name: str = "custom"


# ----------------------------------------------------------- q-ary schemes


def qary_scalar_decode(y, own_x, q: int):
    """Cancel the known own input: (y - own_x) mod q."""
    y = np.asarray(y)
    own_x = np.asarray(own_x)
    for name, v in (("y", y), ("own_x", own_x)):
        if np.any((v < 0) | (v >= q)) or np.any(np.mod(v, 1) != 0):
            raise ValueError(f"{name} outside the alphabet {{0..{q - 1}}}")
    out = np.mod(y.astype(np.int64) - own_x.astype(np.int64), q)
    return out if out.ndim else int(out)


def binary_map_decode(v, own_u, delta: float, eps: float):
    """MAP estimate of the other bit from the cancelled symbol ``v`` and own bit.

    With uniform marginals the choice only matters when ``v != own_u``: trust
    the channel when ``eps <= delta`` (ties go to ``v``), else the own bit.
    """
    v = np.asarray(v)
    own_u = np.asarray(own_u)
    out = v if eps <= delta else own_u
    out = np.broadcast_to(out, np.broadcast(v, own_u).shape)
    return out.copy() if out.ndim else int(out)


@dataclass(frozen=True)
class QaryIdentity:
    q: int

    def coder_pair(self) -> CoderPair:
        q = self.q
        ident = lambda u: np.asarray(u, dtype=np.int64)  # noqa: E731
        # the encoder is the identity, so own_x == own_u
        dec = lambda u, y: qary_scalar_decode(y, u, q)  # noqa: E731
        return CoderPair(ident, ident, dec, dec, name="identity")


@dataclass(frozen=True)
class QaryMapWithSideInfo:
    """Identity encoder, MAP decoder using the own source bit; q = 2 only.

    ``eps`` is taken per receiver from the channel: terminal 2 sees eps2.
    """

    delta: float
    eps1: float
    eps2: float

    def coder_pair(self) -> CoderPair:
        ident = lambda u: np.asarray(u, dtype=np.int64)  # noqa: E731

        def dec_at_2(u2, y2):
            return binary_map_decode(qary_scalar_decode(y2, u2, 2), u2, self.delta, self.eps2)

        def dec_at_1(u1, y1):
            return binary_map_decode(qary_scalar_decode(y1, u1, 2), u1, self.delta, self.eps1)

        return CoderPair(ident, ident, dec_at_1, dec_at_2, name="map")


def scalar_distortion_qary(q: int, eps_noise: float) -> float:
    """Hamming distortion of the identity scheme: the symbol error rate eps."""
    if int(q) != q or q < 2:
        raise ValueError(f"q={q!r} must be an integer >= 2")
    if not (0.0 <= eps_noise <= (q - 1) / q):
        raise ValueError(f"eps_noise={eps_noise!r} outside [0, (q-1)/q]")
    return float(eps_noise)


def map_distortion_binary(delta: float, eps: float) -> float:
    return float(min(delta, eps))


# ------------------------------------------------------ Gaussian schemes


@dataclass(frozen=True)
class GaussianLinear:
    """x_i = sqrt(P_i) u_i with an MMSE receiver of the chosen kind."""

    channel: Awgn
    rho: float = 0.0
    decoder: Decoder = Decoder.CANCELLED_MMSE

    @property
    def alpha1(self):
        return math.sqrt(self.channel.p1)

    @property
    def alpha2(self):
        return math.sqrt(self.channel.p2)

    def coder_pair(self) -> CoderPair:
        ch, rho = self.channel, self.rho
        a1, a2 = self.alpha1, self.alpha2
        enc1 = lambda u: a1 * np.asarray(u, dtype=float)  # noqa: E731
        enc2 = lambda u: a2 * np.asarray(u, dtype=float)  # noqa: E731
        # terminal 2 estimates u1 through noise sigma2_sq, terminal 1 estimates u2 through sigma1_sq
        dec2 = _linear_receiver(a1, a2, ch.sigma2_sq, rho, self.decoder)
        dec1 = _linear_receiver(a2, a1, ch.sigma1_sq, rho, self.decoder)
        return CoderPair(enc1, enc2, dec1, dec2, name=f"linear-{Decoder(self.decoder).value}")


def _linear_receiver(a_other, a_own, noise_var, rho, decoder):
    p = a_other * a_other
    if Decoder(decoder) is Decoder.CANCELLED_MMSE:
        gain = a_other / (p + noise_var)

        def dec(own_u, y):
            return gain * (y - a_own * np.asarray(own_u))
        return dec

    s = 1.0 - rho * rho
    gain = a_other * s / (p * s + noise_var)

    def dec(own_u, y):
        own_u = np.asarray(own_u)
        v = y - a_own * own_u
        prior = rho * own_u
        return prior + gain * (v - a_other * prior)
    return dec


def gaussian_scalar_distortion(rho: float, gamma: float, decoder=Decoder.CANCELLED_MMSE) -> float:
    """MSE of linear scalar coding at SNR ``gamma`` for unit-variance sources."""
    if not (-1.0 <= rho <= 1.0):
        raise ValueError(f"rho={rho!r} outside [-1, 1]")
    if gamma < 0:
        raise ValueError(f"gamma={gamma!r} must be >= 0")
    if Decoder(decoder) is Decoder.CANCELLED_MMSE:
        return 1.0 / (1.0 + gamma)
    s = 1.0 - rho * rho
    return s / (1.0 + gamma * s)


# ------------------------------------------------------------ gap sweeps


@dataclass(frozen=True)
class GapPoint:
    rho: float
    param: float
    scalar_distortion: float
    lower_bound: float

    @property
    def gap(self) -> float:
        return self.scalar_distortion - self.lower_bound


def gap_sweep_binary(delta_grid, eps_grid) -> list[GapPoint]:
    """Identity-scheme distortion eps against the converse, per (delta, eps)."""
    out = []
    for delta in delta_grid:
        for eps in eps_grid:
            lb = converse_lb_binary(float(delta), float(eps))
            out.append(GapPoint(1.0 - 2.0 * float(delta), float(eps),
                                scalar_distortion_qary(2, float(eps)), lb))
    return out


def gap_sweep_gaussian(rho_grid, gamma_grid, decoder=Decoder.CANCELLED_MMSE) -> list[GapPoint]:
    out = []
    for rho in rho_grid:
        for gamma in gamma_grid:
            rho, gamma = float(rho), float(gamma)
            out.append(GapPoint(rho, gamma, gaussian_scalar_distortion(rho, gamma, decoder),
                                converse_lb_gaussian(rho, gamma, 1.0)))
    return out


def delta_from_rho(rho: float) -> float:
    """DSBS crossover for a target correlation rho in [0, 1]."""
    if not (0.0 <= rho <= 1.0):
        raise ValueError(f"rho={rho!r} outside [0, 1] for a binary source")
    return (1.0 - rho) / 2.0


def identity_coders(channel: QaryAdditive) -> CoderPair:
    return QaryIdentity(channel.q).coder_pair()

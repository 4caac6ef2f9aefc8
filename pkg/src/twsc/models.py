"""Joint sources, two-way channels and distortion measures.

Every model is an immutable value. Randomness always comes in through an
explicit ``numpy.random.Generator``; :func:`make_rng` builds one from a
``(seed, *keys)`` tuple so that any stream can be reproduced in isolation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from twsc.info_measures import divergence_from_uniform


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator fully determined by ``seed`` and ``keys``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def _check_prob(name, value, lo=0.0, hi=1.0):
    if not (lo <= value <= hi):
        raise ValueError(f"{name}={value!r} outside [{lo}, {hi}]")


# ---------------------------------------------------------------- sources


@dataclass(frozen=True)
class BinarySymmetric:
    """Doubly symmetric binary source: U2 = U1 xor W with W ~ Bern(delta)."""

    delta: float

    def __post_init__(self):
        _check_prob("delta", self.delta, 0.0, 0.5)

    @property
    def rho(self) -> float:
        return 1.0 - 2.0 * self.delta

    @property
    def alphabet_size(self) -> int:
        return 2


@dataclass(frozen=True)
class UniformQary:
    """Independent sources, each uniform on {0, ..., q-1}."""

    q: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"q={self.q!r} must be an integer >= 2")

    @property
    def alphabet_size(self) -> int:
        return int(self.q)


@dataclass(frozen=True)
class BivariateGaussian:
    """Zero-mean, unit-variance jointly Gaussian pair with correlation rho."""

    rho: float

    def __post_init__(self):
        _check_prob("rho", self.rho, -1.0, 1.0)


JointSourceModel = Union[BinarySymmetric, UniformQary, BivariateGaussian]


def sample_source(model: JointSourceModel, k: int, seed: int) -> np.ndarray:
    """Draw ``k`` i.i.d. pairs; returns an array of shape ``(k, 2)``."""
    if k < 1:
        raise ValueError(f"k={k} must be >= 1")
    u1, u2 = draw_source(model, k, make_rng(seed))
    return np.stack([u1, u2], axis=1)


def draw_source(model: JointSourceModel, shape, rng: np.random.Generator):
    """Draw ``(u1, u2)`` arrays of the given shape from ``rng``."""
    shape = tuple(int(n) for n in np.atleast_1d(shape))
    if isinstance(model, BinarySymmetric):
        u1 = rng.integers(0, 2, size=shape, dtype=np.int64)
        w = (rng.random(shape) < model.delta).astype(np.int64)
        return u1, u1 ^ w
    if isinstance(model, UniformQary):
        u = rng.integers(0, model.q, size=(2,) + shape, dtype=np.int64)
        return u[0], u[1]
    if isinstance(model, BivariateGaussian):
        g = rng.standard_normal((2,) + shape)
        u2 = model.rho * g[0] + np.sqrt(1.0 - model.rho**2) * g[1]
        return g[0], u2
    raise TypeError(f"unsupported source model {model!r}")


def source_mutual_information(model: JointSourceModel) -> float:
    """I(U1; U2) in bits."""
    if isinstance(model, BinarySymmetric):
        return divergence_from_uniform(2, model.delta)
    if isinstance(model, UniformQary):
        return 0.0
    if isinstance(model, BivariateGaussian):
        if abs(model.rho) >= 1.0:
            return float("inf")
        return -0.5 * np.log2(1.0 - model.rho**2)
    raise TypeError(f"unsupported source model {model!r}")


# --------------------------------------------------------------- channels


@dataclass(frozen=True)
class QaryAdditive:
    """Y1 = X1+X2+Z1, Y2 = X1+X2+Z2 (mod q); Pr(Zi != 0) = eps_i, spread evenly."""

    q: int
    eps1: float
    eps2: float

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 2:
            raise ValueError(f"q={self.q!r} must be an integer >= 2")
        emax = (self.q - 1) / self.q
        _check_prob("eps1", self.eps1, 0.0, emax)
        _check_prob("eps2", self.eps2, 0.0, emax)

    def noise_pmf(self, which: int) -> np.ndarray:
        eps = self.eps1 if which == 1 else self.eps2
        pmf = np.full(self.q, eps / (self.q - 1))
        pmf[0] = 1.0 - eps
        return pmf

    def to_tensor(self) -> "GeneralDiscrete":
        """Render as an explicit transition tensor p(y1, y2 | x1, x2)."""
        q = self.q
        z1, z2 = self.noise_pmf(1), self.noise_pmf(2)
        t = np.zeros((q, q, q, q))
        for x1 in range(q):
            for x2 in range(q):
                s = (x1 + x2) % q
                # the two noises are independent, so the output pmf factorizes
                t[x1, x2] = np.outer(np.roll(z1, s), np.roll(z2, s))
        return GeneralDiscrete(t)


@dataclass(frozen=True)
class Awgn:
    """Y1 = X1+X2+Z1, Y2 = X1+X2+Z2 with Zi ~ N(0, sigma_i^2)."""

    p1: float
    p2: float
    sigma1_sq: float = 1.0
    sigma2_sq: float = 1.0

    def __post_init__(self):
        for name in ("p1", "p2", "sigma1_sq", "sigma2_sq"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name}={v!r} must be positive")

    @property
    def snr1(self) -> float:
        """SNR of the 1->2 link: P1 over the noise variance at terminal 2."""
        return self.p1 / self.sigma2_sq

    @property
    def snr2(self) -> float:
        return self.p2 / self.sigma1_sq


class GeneralDiscrete:
    """Finite-alphabet two-way channel given by ``tensor[x1, x2, y1, y2]``."""

    def __init__(self, tensor):
        t = np.array(tensor, dtype=float)
        if t.ndim != 4:
            raise ValueError("transition tensor must have axes (x1, x2, y1, y2)")
        if np.any(t < 0):
            raise ValueError("transition tensor has negative entries")
        sums = t.sum(axis=(2, 3))
        if np.any(np.abs(sums - 1.0) > 1e-12):
            raise ValueError("each p(., . | x1, x2) slice must sum to 1")
        t.setflags(write=False)
        self.tensor = t

    @property
    def input_sizes(self):
        return self.tensor.shape[:2]

    @property
    def output_sizes(self):
        return self.tensor.shape[2:]

    def __repr__(self):
        return f"GeneralDiscrete(shape={self.tensor.shape})"


TwcModel = Union[QaryAdditive, Awgn, GeneralDiscrete]


def _check_symbols(x, size, name):
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.integer):
        if not np.all(np.equal(np.mod(x, 1), 0)):
            raise ValueError(f"{name} must be integer symbols")
        x = x.astype(np.int64)
    if np.any((x < 0) | (x >= size)):
        raise ValueError(f"{name} outside the input alphabet {{0..{size - 1}}}")
    return x


def channel_step(model: TwcModel, x1, x2, rng: np.random.Generator):
    """One memoryless channel use per element of ``x1``/``x2`` (broadcast).

    Z1 is drawn before Z2 from ``rng``; both are fresh for every call.
    """
    if isinstance(model, QaryAdditive):
        x1 = _check_symbols(x1, model.q, "x1")
        x2 = _check_symbols(x2, model.q, "x2")
        s = (x1 + x2) % model.q
        z1 = _qary_noise(model.q, model.eps1, s.shape, rng)
        z2 = _qary_noise(model.q, model.eps2, s.shape, rng)
        return (s + z1) % model.q, (s + z2) % model.q
    if isinstance(model, Awgn):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
            raise ValueError("AWGN inputs must be finite reals")
        s = x1 + x2
        z1 = rng.normal(0.0, np.sqrt(model.sigma1_sq), s.shape)
        z2 = rng.normal(0.0, np.sqrt(model.sigma2_sq), s.shape)
        return s + z1, s + z2
    if isinstance(model, GeneralDiscrete):
        n1, n2 = model.input_sizes
        x1, x2 = np.broadcast_arrays(_check_symbols(x1, n1, "x1"), _check_symbols(x2, n2, "x2"))
        m1, m2 = model.output_sizes
        flat = model.tensor.reshape(n1 * n2, m1 * m2)
        cdf = np.cumsum(flat, axis=1)
        idx = (x1 * n2 + x2).ravel()
        r = rng.random(idx.shape)
        out = np.empty(idx.shape, dtype=np.int64)
        for row in np.unique(idx):
            sel = idx == row
            out[sel] = np.minimum(np.searchsorted(cdf[row], r[sel], side="right"), m1 * m2 - 1)
        out = out.reshape(x1.shape)
        return out // m2, out % m2
    raise TypeError(f"unsupported channel model {model!r}")


def _qary_noise(q, eps, shape, rng):
    hit = rng.random(shape) < eps
    # nonzero noise values are uniform on {1..q-1}
    nz = rng.integers(1, q, size=shape) if q > 2 else np.ones(shape, dtype=np.int64)
    return np.where(hit, nz, 0)


# ------------------------------------------------------------ distortion


class Hamming:
    name = "hamming"

    def __call__(self, u, u_hat):
        return (np.asarray(u) != np.asarray(u_hat)).astype(float)

    def __repr__(self):
        return "Hamming()"

    def __eq__(self, other):
        return isinstance(other, Hamming)

    def __hash__(self):
        return hash(self.name)


class SquaredError:
    name = "squared_error"

    def __call__(self, u, u_hat):
        diff = np.asarray(u, dtype=float) - np.asarray(u_hat, dtype=float)
        return diff * diff

    def __repr__(self):
        return "SquaredError()"

    def __eq__(self, other):
        return isinstance(other, SquaredError)

    def __hash__(self):
        return hash(self.name)


DistortionMeasure = Union[Hamming, SquaredError]


@dataclass(frozen=True)
class DistortionPair:
    d1: float
    d2: float
    measure: DistortionMeasure | None = None

    def __iter__(self):
        return iter((self.d1, self.d2))


def measure_for(model: JointSourceModel) -> DistortionMeasure:
    return SquaredError() if isinstance(model, BivariateGaussian) else Hamming()

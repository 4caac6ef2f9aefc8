"""Entropy and mutual-information primitives (all in bits)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# guaranteed bracket width on the argument; bisect() actually runs until the
# bracket cannot be split further in double precision, which is tighter
BISECTION_TOL = 1e-12


def bisect(pred, lo, hi):
    """Smallest x in [lo, hi] (to float resolution) with ``pred(x)`` true.

    ``pred`` must be monotone: false below some threshold, true above it.
    Returns the upper end of the final bracket.
    """
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return hi
        if pred(mid):
            hi = mid
        else:
            lo = mid


def _check_unit(name, p):
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"{name}={p!r} outside [0, 1]")


def binary_entropy(p: float) -> float:
    """H_b(p) = -p log2 p - (1-p) log2 (1-p), with 0 log 0 = 0."""
    p = float(p)
    _check_unit("p", p)
    h = 0.0
    if p > 0.0:
        h -= p * math.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * math.log2(1.0 - p)
    return h


def binary_entropy_inverse(h: float) -> float:
    """The unique p in [0, 1/2] with ``binary_entropy(p) == h``."""
    h = float(h)
    _check_unit("h", h)
    if h == 0.0:
        return 0.0
    if h == 1.0:
        return 0.5
    return bisect(lambda p: binary_entropy(p) >= h, 0.0, 0.5)


def qary_noise_entropy(q: int, eps: float) -> float:
    """Entropy of Z with Pr(Z=0)=1-eps and the rest spread over q-1 symbols."""
    if int(q) != q or q < 2:
        raise ValueError(f"q={q!r} must be an integer >= 2")
    if not (0.0 <= eps <= (q - 1) / q):
        raise ValueError(f"eps={eps!r} outside [0, (q-1)/q]")
    h = binary_entropy(eps)
    if eps > 0.0 and q > 2:
        h += eps * math.log2(q - 1)
    return h


def divergence_from_uniform(q: int, eps: float) -> float:
    """log2 q - qary_noise_entropy(q, eps), evaluated without cancellation.

    This is the KL divergence between (1-eps, eps/(q-1), ...) and the uniform
    law. Writing it with log1p keeps full relative precision near
    eps = (q-1)/q, where the plain difference of entropies loses ~half the digits.
    """
    if int(q) != q or q < 2:
        raise ValueError(f"q={q!r} must be an integer >= 2")
    if not (0.0 <= eps <= (q - 1) / q):
        raise ValueError(f"eps={eps!r} outside [0, (q-1)/q]")
    x = (q - 1) - q * eps  # q(1-eps) - 1, zero at the uniform point
    if abs(x) < 0.5:
        head = (1.0 - eps) * math.log1p(x)
    else:
        head = (1.0 - eps) * math.log(q * (1.0 - eps))
    tail = 0.0
    if eps > 0.0:
        y = -x / (q - 1)  # q eps / (q-1) - 1
        tail = eps * (math.log1p(y) if abs(y) < 0.5 else math.log(q * eps / (q - 1)))
    return max((head + tail) / math.log(2.0), 0.0)


def discrete_entropy(dist) -> float:
    p = np.asarray(dist, dtype=float).ravel()
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("not a probability distribution")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


@dataclass(frozen=True)
class DiscreteJoint:
    """Probability tensor with one named axis per random variable."""

    probs: np.ndarray
    axes: tuple

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != len(self.axes):
            raise ValueError("one axis name per tensor dimension")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("joint tensor must be non-negative and sum to 1")
        object.__setattr__(self, "probs", p)

    def marginal(self, *keep) -> "DiscreteJoint":
        drop = tuple(i for i, a in enumerate(self.axes) if a not in keep)
        p = self.probs.sum(axis=drop) if drop else self.probs
        kept = tuple(a for a in self.axes if a in keep)
        order = [kept.index(a) for a in keep]
        return DiscreteJoint(np.transpose(p, order), tuple(keep))

    def entropy(self, *over) -> float:
        return discrete_entropy(self.marginal(*over).probs)

    def conditional_mutual_information(self, a, b, given) -> float:
        """I(a; b | given) via the entropy identity, clipped at zero."""
        g = tuple(given)
        val = (self.entropy(a, *g) + self.entropy(b, *g)
               - self.entropy(a, b, *g) - (self.entropy(*g) if g else 0.0))
        return max(val, 0.0)


def _as_pmf(p, size, name):
    p = np.asarray(p, dtype=float)
    if p.shape != (size,):
        raise ValueError(f"{name} has shape {p.shape}, channel expects ({size},)")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError(f"{name} is not a probability distribution")
    return p


def conditional_mutual_information(px1, px2, channel, direction="1->2") -> float:
    """I(X1; Y2 | X2) (``"1->2"``) or I(X2; Y1 | X1) (``"2->1"``) for independent inputs.

    ``channel`` is a :class:`twsc.models.GeneralDiscrete` (or anything with a
    ``to_tensor`` method).
    """
    if hasattr(channel, "to_tensor"):
        channel = channel.to_tensor()
    t = channel.tensor
    n1, n2 = t.shape[:2]
    px1 = _as_pmf(px1, n1, "px1")
    px2 = _as_pmf(px2, n2, "px2")
    if direction in ("1->2", 1, "12"):
        # p(x1, x2, y2): marginalize y1
        joint = np.einsum("a,b,abk->abk", px1, px2, t.sum(axis=2))
        return _cmi_exact(joint, sender=0)
    if direction in ("2->1", 2, "21"):
        joint = np.einsum("a,b,abk->abk", px1, px2, t.sum(axis=3))
        return _cmi_exact(joint, sender=1)
    raise ValueError(f"direction must be '1->2' or '2->1', got {direction!r}")


def _cmi_exact(joint, sender):
    # I(S; Y | O) = sum p(s,o,y) log2 [p(y|s,o) / p(y|o)]; joint axes are (x1, x2, y)
    p_x = joint.sum(axis=2, keepdims=True)
    p_oy = joint.sum(axis=sender, keepdims=True)
    p_o = joint.sum(axis=(sender, 2), keepdims=True)
    mask = joint > 0
    num = np.broadcast_to(joint * p_o, joint.shape)[mask]
    den = np.broadcast_to(p_x * p_oy, joint.shape)[mask]
    total = float(np.sum(joint[mask] * np.log2(num / den)))
    return max(total, 0.0)

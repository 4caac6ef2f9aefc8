"""Seeded Monte Carlo harness for scalar coding over a two-way channel.

Trials are grouped into fixed-size shards. Every shard draws from its own
stream keyed by ``(seed, *stream_key, shard_index)``; the shard layout only
depends on the configuration, so results are identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from twsc.models import (
    Awgn,
    BinarySymmetric,
    BivariateGaussian,
    GeneralDiscrete,
    QaryAdditive,
    UniformQary,
    channel_step,
    draw_source,
    make_rng,
    measure_for,
)
from twsc.scalar_coding import CoderPair

# symbols per shard; part of the reproducibility contract, do not tune per run
SHARD_SYMBOLS = 1 << 16


@dataclass(frozen=True)
class SimulationConfig:
    trials: int
    block_length: int = 1
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials={self.trials} must be >= 1")
        if self.block_length < 1:
            raise ValueError(f"block_length={self.block_length} must be >= 1")
        if self.workers < 1:
            raise ValueError(f"workers={self.workers} must be >= 1")

    @property
    def total_symbols(self) -> int:
        return self.trials * self.block_length


@dataclass(frozen=True)
class SimulationResult:
    d1_hat: float
    d2_hat: float
    stderr1: float
    stderr2: float
    total_symbols: int
    seed: int
    trials: int
    block_length: int


class SimulationError(RuntimeError):
    pass


def check_compatible(source, channel) -> None:
    """Reject source/channel pairs whose alphabets cannot line up."""
    if isinstance(channel, QaryAdditive):
        if isinstance(source, BinarySymmetric) and channel.q == 2:
            return
        if isinstance(source, UniformQary) and source.q == channel.q:
            return
    elif isinstance(channel, Awgn):
        if isinstance(source, BivariateGaussian):
            return
    elif isinstance(channel, GeneralDiscrete):
        if isinstance(source, (BinarySymmetric, UniformQary)):
            n = source.alphabet_size
            if all(s >= n for s in channel.input_sizes):
                return
    raise ValueError(f"source {source!r} is incompatible with channel {channel!r}")


def _shards(config: SimulationConfig):
    per = max(1, SHARD_SYMBOLS // config.block_length)
    return [(start, min(per, config.trials - start)) for start in range(0, config.trials, per)]


def _run_shard(source, channel, coders, measure, config, stream_key, index, n_trials):
    rng = make_rng(config.seed, *stream_key, index)
    shape = (n_trials, config.block_length)
    u1, u2 = draw_source(source, shape, rng)
    x1 = coders.encode1(u1)
    x2 = coders.encode2(u2)
    y1, y2 = channel_step(channel, x1, x2, rng)
    # terminal 2 reconstructs u1 from (u2, y2), terminal 1 reconstructs u2
    u1_hat = np.asarray(coders.decode2(u2, y2))
    u2_hat = np.asarray(coders.decode1(u1, y1))
    if u1_hat.shape != shape or u2_hat.shape != shape:
        raise SimulationError("decoder output shape differs from its input")
    e1 = measure(u1, u1_hat)
    e2 = measure(u2, u2_hat)
    return e1.mean(axis=1), e2.mean(axis=1), (e1 * e1).mean(axis=1), (e2 * e2).mean(axis=1)


def check_symbolwise(coders: CoderPair, source, channel, seed=0, n=64) -> None:
    """Verify the coders act symbol by symbol: permuting time permutes outputs.

    A decoder that looked at other time indices (future or past received
    symbols) would generally break this equivariance.
    """
    rng = make_rng(seed, 0xC0DE)
    u1, u2 = draw_source(source, n, rng)
    y1, y2 = channel_step(channel, coders.encode1(u1), coders.encode2(u2), rng)
    perm = rng.permutation(n)
    pairs = [
        (coders.encode1, (u1,)), (coders.encode2, (u2,)),
        (coders.decode1, (u1, y1)), (coders.decode2, (u2, y2)),
    ]
    for fn, args in pairs:
        full = np.asarray(fn(*args))
        permuted = np.asarray(fn(*(a[perm] for a in args)))
        if not np.array_equal(full[perm], permuted):
            raise SimulationError("coder is not memoryless/symbol-wise")


def run_simulation(source, channel, coders: CoderPair, config: SimulationConfig,
                   stream_key=()) -> SimulationResult:
    check_compatible(source, channel)
    check_symbolwise(coders, source, channel, seed=config.seed)
    measure = measure_for(source)
    shards = _shards(config)

    def work(item):
        i, (_, n) = item
        return _run_shard(source, channel, coders, measure, config, stream_key, i, n)

    if config.workers == 1 or len(shards) == 1:
        parts = [work(item) for item in enumerate(shards)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            # map preserves shard order, so the merge is scheduling-independent
            parts = list(pool.map(work, enumerate(shards)))

    d1, d2, sq1, sq2 = (np.concatenate([p[j] for p in parts]) for j in range(4))
    return SimulationResult(
        d1_hat=float(d1.mean()),
        d2_hat=float(d2.mean()),
        stderr1=_stderr(d1, sq1, config),
        stderr2=_stderr(d2, sq2, config),
        total_symbols=config.total_symbols,
        seed=config.seed,
        trials=config.trials,
        block_length=config.block_length,
    )


def _stderr(block_means, block_sq, config):
    # spread of per-trial block means; equals sd/sqrt(total symbols) for memoryless coders
    t = block_means.size
    if t >= 2:
        return float(np.std(block_means, ddof=1) / math.sqrt(t))
    k = config.block_length
    if k < 2:
        return math.nan
    m = float(block_means[0])
    var = max(float(block_sq[0]) - m * m, 0.0) * k / (k - 1)
    return math.sqrt(var / k)


def point_seed(seed: int, index: int) -> int:
    """Sub-seed for grid point ``index``; a pure function of (seed, index)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(0x5EED, int(index)))
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


class SweepError(SimulationError):
    def __init__(self, index, value, cause):
        super().__init__(f"grid point {index} ({value!r}) failed: {cause}")
        self.index = index
        self.value = value


def sweep_simulation(config: SimulationConfig, grid, scheme):
    """Run one simulation per grid value.

    ``scheme(value)`` returns ``(source, channel, coders)``. Point ``i`` runs
    with seed :func:`point_seed` ``(config.seed, i)``.
    """
    out = []
    for i, value in enumerate(grid):
        try:
            source, channel, coders = scheme(value)
            res = run_simulation(source, channel, coders,
                                 replace(config, seed=point_seed(config.seed, i)))
        except (ValueError, SimulationError) as exc:
            raise SweepError(i, value, exc) from exc
        out.append((value, res))
    return out

"""Monte Carlo distortion estimation over SNR grids.

Trials run in fixed batches of 4096.  Each batch draws its source samples
and noise from a stream keyed by (master seed, point index, batch index),
and batch statistics are merged strictly in batch-index order, so the
estimate is bit-identical no matter how many workers computed the batches.

The transmitted signal is normalized to zero mean and unit average power
using a measured per-codec record; decoding happens back in the raw
constellation coordinates, where the effective noise level is the channel
sigma scaled by the measured power root.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import channel, numrep
from .codecs import CodecSpec, build_codec, resolve_for_sigma
from .codecs.base import NormalizationRecord, measure_normalization

BATCH_SIZE = 4096

_SOURCE_VARIANCE = {"uniform": 1.0 / 12.0, "gaussian": 1.0}

_codec_cache: dict[CodecSpec, object] = {}
_normalization_cache: dict[CodecSpec, NormalizationRecord] = {}


def cached_codec(spec: CodecSpec):
    codec = _codec_cache.get(spec)
    if codec is None:
        codec = build_codec(spec)
        _codec_cache[spec] = codec
    return codec


def get_normalization(codec) -> NormalizationRecord:
    """Measured mean/power record for a codec, memoized per spec."""
    rec = _normalization_cache.get(codec.spec)
    if rec is None:
        rec = measure_normalization(codec)
        _normalization_cache[codec.spec] = rec
    return rec


@dataclass(frozen=True)
class SdrPoint:
    snr_db: float
    sigma: float
    trials: int
    distortion: float
    std_err: float
    sdr_db: float
    capped: bool


@dataclass(frozen=True)
class SweepPlan:
    codec: CodecSpec
    snr_grid_db: tuple
    min_trials: int = 100_000
    max_trials: int = 10_000_000
    rel_se_target: float = 0.1
    master_seed: int = 0x5EED

    def __post_init__(self):
        grid = tuple(float(v) for v in self.snr_grid_db)
        object.__setattr__(self, "snr_grid_db", grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("snr grid must be strictly increasing")
        if self.min_trials < 1:
            raise ValueError("min_trials must be positive")
        if self.max_trials < self.min_trials:
            raise ValueError("max_trials must be >= min_trials")
        if not 0.0 < self.rel_se_target < 1.0:
            raise ValueError("rel_se_target must lie in (0, 1)")


@dataclass(frozen=True)
class SdrCurve:
    plan: SweepPlan
    points: tuple
    resolved: tuple
    normalizations: tuple


class _Kahan:
    """Compensated running sum; order of add() calls fixes the result."""

    __slots__ = ("total", "carry")

    def __init__(self):
        self.total = 0.0
        self.carry = 0.0

    def add(self, value: float):
        y = value - self.carry
        t = self.total + y
        self.carry = (t - self.total) - y
        self.total = t


def _run_batch(codec, noise: channel.NoisePoint, norm: NormalizationRecord,
               batch_index: int) -> tuple:
    rng = channel.batch_rng(noise.master_seed, noise.point_index, batch_index)
    x = numrep.draw_source(codec.spec.source_kind, rng, BATCH_SIZE)
    s = codec.encode(x)
    root_p = math.sqrt(norm.power)
    mean = np.asarray(norm.mean)
    s_unit = (s - mean) / root_p
    y_unit = channel.awgn(s_unit, noise.sigma, rng)
    y = y_unit * root_p + mean
    xh = codec.decode(y, noise.sigma * root_p)
    e2 = np.square(xh - x)
    # fsum keeps tiny squared errors (down to ~1e-29) from vanishing
    return math.fsum(e2.tolist()), math.fsum(np.square(e2).tolist())


def estimate_point(codec, noise: channel.NoisePoint, plan: SweepPlan, *,
                   normalization: NormalizationRecord | None = None,
                   workers: int = 1) -> SdrPoint:
    """Adaptive distortion estimate at one noise level.

    Stops at the first batch boundary past min_trials where the relative
    standard error of the distortion meets the plan target; caps at
    max_trials (rounded up to whole batches) with the capped flag set.
    """
    if normalization is None:
        normalization = get_normalization(codec)
    workers = max(1, int(workers))
    max_batches = -(-plan.max_trials // BATCH_SIZE)
    sum2, sum4 = _Kahan(), _Kahan()
    trials = 0
    stopped = False
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        next_index = 0
        while not stopped and next_index < max_batches:
            count = min(workers, max_batches - next_index)
            indices = range(next_index, next_index + count)
            if pool is None:
                results = [_run_batch(codec, noise, normalization, b) for b in indices]
            else:
                results = list(pool.map(
                    lambda b: _run_batch(codec, noise, normalization, b), indices))
            for s2, s4 in results:
                if stopped:
                    break  # overshoot from speculative workers is discarded
                sum2.add(s2)
                sum4.add(s4)
                trials += BATCH_SIZE
                if trials >= plan.min_trials:
                    mean = sum2.total / trials
                    if mean == 0.0:
                        stopped = True
                        break
                    var = max(sum4.total / trials - mean * mean, 0.0)
                    if math.sqrt(var / trials) <= plan.rel_se_target * mean:
                        stopped = True
            next_index += count
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    mean = sum2.total / trials
    var = max(sum4.total / trials - mean * mean, 0.0)
    std_err = math.sqrt(var / trials)
    src_var = _SOURCE_VARIANCE[codec.spec.source_kind]
    return SdrPoint(
        snr_db=noise.snr_db,
        sigma=noise.sigma,
        trials=trials,
        distortion=mean,
        std_err=std_err,
        sdr_db=channel.sdr_db(mean, src_var),
        capped=not stopped,
    )


def sweep(plan: SweepPlan, *, workers: int = 1) -> SdrCurve:
    """Run estimate_point across the plan's grid, resolving families per point."""
    points, resolved, norms = [], [], []
    for index, snr in enumerate(plan.snr_grid_db):
        sigma = channel.sigma_from_snr_db(snr)
        spec = resolve_for_sigma(plan.codec, sigma)
        codec = cached_codec(spec)
        norm = get_normalization(codec)
        noise = channel.NoisePoint(sigma=sigma, snr_db=snr,
                                   master_seed=plan.master_seed, point_index=index)
        points.append(estimate_point(codec, noise, plan,
                                     normalization=norm, workers=workers))
        resolved.append(spec)
        norms.append(norm)
    return SdrCurve(plan=plan, points=tuple(points),
                    resolved=tuple(resolved), normalizations=tuple(norms))

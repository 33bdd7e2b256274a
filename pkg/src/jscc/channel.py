"""AWGN channel, SNR/SDR conversions, and reproducible noise streams."""

import math
from dataclasses import dataclass

import numpy as np

# Noise levels above 1/sqrt(2) are outside the regime any of the codes or
# reference curves are designed for.
SIGMA_MAX = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class NoisePoint:
    """One grid point of a sweep: noise level plus its seed material."""

    sigma: float
    snr_db: float
    master_seed: int
    point_index: int


def sigma_from_snr_db(snr_db: float) -> float:
    """Per-dimension noise std for unit transmit power: 10**(-snr_db/20)."""
    return 10.0 ** (-snr_db / 20.0)


def snr_db_from_sigma(sigma: float) -> float:
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return -20.0 * math.log10(sigma)


def sdr_db(distortion: float, source_variance: float) -> float:
    """Signal-to-distortion ratio in dB; +inf for an exactly zero distortion."""
    if distortion < 0.0:
        raise ValueError("distortion must be nonnegative")
    if source_variance <= 0.0:
        raise ValueError("source variance must be positive")
    if distortion == 0.0:
        return math.inf
    return 10.0 * math.log10(source_variance / distortion)


def awgn(s: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Add white gaussian noise with per-dimension std sigma."""
    if sigma < 0.0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0.0:
        return np.array(s, dtype=np.float64, copy=True)
    return s + sigma * rng.standard_normal(np.shape(s))


def batch_rng(master_seed: int, point_index: int, batch_index: int) -> np.random.Generator:
    """Generator for one trial batch, independent of worker scheduling.

    Streams are keyed by (master_seed, point_index, batch_index) through
    SeedSequence spawn keys, so any partition of batches across processes
    reproduces the same draws.
    """
    seq = np.random.SeedSequence(entropy=master_seed,
                                 spawn_key=(point_index, batch_index))
    return np.random.default_rng(seq)


def derived_rng(master_seed: int, *labels: int) -> np.random.Generator:
    """Named auxiliary stream (normalization sampling, diagnostics)."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(labels))
    return np.random.default_rng(seq)

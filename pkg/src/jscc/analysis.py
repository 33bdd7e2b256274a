"""Reference distortion curves and constellation geometry diagnostics.

The harness measures distortion empirically.  This module supplies the
closed-form curves those measurements are compared against, a least-squares
slope fit for SDR-vs-SNR curves, a box-counting dimension estimator, and a
stretch profile that fits the power-law growth of encoder displacement
under small source perturbations.

All curve shapes carry an undetermined multiplicative constant.  The
``scale`` field holds it; :func:`anchored` pins it so a curve passes
through a chosen (sigma, distortion) point, which is how overlays are
matched to measured data.  Logarithmic factors use the natural log; a
different base would only change ``scale``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import numrep

# Largest per-dimension noise level any curve is defined for (sigma^2 <= 1/2).
SIGMA_MAX = 2.0 ** -0.5

BOUND_KINDS = (
    "opta_slb",
    "shiftmap_upper",
    "shiftmap_lower",
    "scheme1_upper",
    "scheme2_upper",
    "hda_lower",
    "type1_upper",
    "type2_upper",
)

_NEEDS_ALPHA = ("scheme1_upper",)
_NEEDS_SPLIT = ("hda_lower",)
_NEEDS_RATE = ("scheme2_upper", "type2_upper")


def scheme1_beta(n: int, alpha: float) -> float:
    """Fractal-code SDR exponent: n * log 2 / log alpha."""
    if alpha <= 2.0:
        raise ValueError("alpha must exceed 2")
    return n * math.log(2.0) / math.log(alpha)


@dataclass(frozen=True)
class BoundSpec:
    """One reference curve: a kind tag plus its shape parameters.

    kind      one of BOUND_KINDS
    n         bandwidth expansion (channel dims per source sample)
    alpha     digit base, scheme1_upper only
    m         analog dims of a hybrid split, hda_lower only (1..n)
    scale     multiplicative constant, fitted via anchored()
    rate      coefficient of the sqrt(-log2 sigma) exponent term,
              scheme2_upper / type2_upper only
    """

    kind: str
    n: int
    alpha: float | None = None
    m: int | None = None
    scale: float = 1.0
    rate: float = 1.0

    def __post_init__(self):
        if self.kind not in BOUND_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.kind in _NEEDS_ALPHA:
            if self.alpha is None:
                raise ValueError(f"{self.kind} requires alpha")
            if self.alpha <= 2.0:
                raise ValueError("alpha must exceed 2")
        if self.kind in _NEEDS_SPLIT:
            if self.m is None:
                raise ValueError(f"{self.kind} requires m")
            if not 1 <= self.m <= self.n:
                raise ValueError("m must lie in 1..n")
        if self.kind in _NEEDS_RATE and self.rate <= 0.0:
            raise ValueError("rate must be positive")

    def describe(self) -> str:
        bits = [self.kind, f"n={self.n}"]
        if self.kind in _NEEDS_ALPHA:
            bits.append(f"alpha={self.alpha:g}")
        if self.kind in _NEEDS_SPLIT:
            bits.append(f"m={self.m}")
        if self.kind in _NEEDS_RATE:
            bits.append(f"rate={self.rate:g}")
        return " ".join(bits)


def bound_eval(spec: BoundSpec, sigma):
    """Evaluate the curve at per-dimension noise level sigma.

    Accepts a scalar or array; sigma must lie in (0, SIGMA_MAX].
    """
    sig = np.asarray(sigma, dtype=np.float64)
    if sig.size and (np.any(sig <= 0.0) or np.any(sig > SIGMA_MAX)):
        raise ValueError(f"sigma must lie in (0, {SIGMA_MAX:.6f}]")
    u = -np.log(sig)
    if spec.kind == "opta_slb":
        # Width-1 uniform source has differential entropy 0, so the
        # Shannon lower bound gives D = (2 pi e)^{-1} (1 + SNR)^{-n}
        # at unit transmit power.
        out = spec.scale / (2.0 * np.pi * np.e * (1.0 + sig ** -2.0) ** spec.n)
    elif spec.kind in ("shiftmap_upper", "shiftmap_lower"):
        out = spec.scale * sig ** (2 * spec.n) * u ** (spec.n - 1)
    elif spec.kind == "scheme1_upper":
        beta = scheme1_beta(spec.n, spec.alpha)
        out = spec.scale * sig ** (2.0 * beta) * u ** spec.n
    elif spec.kind in ("scheme2_upper", "type2_upper"):
        t = -np.log2(sig)
        out = spec.scale * sig ** (2 * spec.n) * 2.0 ** (spec.rate * np.sqrt(t))
    elif spec.kind == "hda_lower":
        expo = 2.0 * spec.n / spec.m
        out = spec.scale * sig ** expo * u ** ((spec.n - spec.m) / spec.m)
    else:  # type1_upper
        out = spec.scale * sig ** (2 * spec.n)
    if np.isscalar(sigma):
        return float(out)
    return out


def anchored(spec: BoundSpec, sigma: float, distortion: float) -> BoundSpec:
    """Refit scale so the curve passes through (sigma, distortion)."""
    if distortion <= 0.0:
        raise ValueError("distortion must be positive")
    base = bound_eval(dataclasses.replace(spec, scale=1.0), float(sigma))
    return dataclasses.replace(spec, scale=distortion / base)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    snr_db: tuple
    residuals: tuple

    @property
    def n_points(self) -> int:
        return len(self.snr_db)


def slope_fit(snr_db, sdr_db, window) -> SlopeFit:
    """Least-squares slope of SDR(dB) vs SNR(dB) inside a window.

    window is (lo, hi) in dB, inclusive.  Needs at least 4 points inside.
    """
    x = np.asarray(snr_db, dtype=np.float64).ravel()
    y = np.asarray(sdr_db, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValueError("snr_db and sdr_db must have matching lengths")
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    mask = (x >= lo) & (x <= hi)
    if int(mask.sum()) < 4:
        raise ValueError("need at least 4 points inside the fit window")
    xs, ys = x[mask], y[mask]
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return SlopeFit(slope=float(slope), intercept=float(intercept),
                    snr_db=tuple(float(v) for v in xs),
                    residuals=tuple(float(v) for v in resid))


@dataclass(frozen=True)
class DimensionEstimate:
    epsilons: tuple
    counts: tuple
    fitted_dimension: float
    fit_residual: float
    saturated: bool


def _box_count(points: np.ndarray, eps: float) -> np.ndarray:
    # Grid anchored at the origin, boxes half-open.
    idx = np.floor(points / eps).astype(np.int64)
    return np.unique(idx, axis=0)


def boxcount_dimension(sampler, epsilons, samples_per_eps: int,
                       rng: np.random.Generator | None = None) -> DimensionEstimate:
    """Box-counting dimension of a sampled point set.

    sampler(count, rng) must return a (count, d) array of points.  For each
    box size the occupied-box count is taken at samples_per_eps and again at
    double that; the estimate is flagged unsaturated if any count still moved
    by 2 percent or more, meaning the sampling was too sparse to trust.
    """
    eps = np.asarray(epsilons, dtype=np.float64).ravel()
    if eps.size < 2:
        raise ValueError("need at least two box sizes")
    if np.any(eps <= 0.0) or np.any(np.diff(eps) >= 0.0):
        raise ValueError("box sizes must be positive and strictly decreasing")
    if samples_per_eps < 1:
        raise ValueError("samples_per_eps must be positive")
    if rng is None:
        rng = np.random.default_rng(0x5EED)
    pts_a = np.asarray(sampler(samples_per_eps, rng), dtype=np.float64)
    pts_b = np.asarray(sampler(samples_per_eps, rng), dtype=np.float64)
    if pts_a.ndim != 2 or pts_b.shape != pts_a.shape:
        raise ValueError("sampler must return (count, d) arrays")
    counts = []
    saturated = True
    for e in eps:
        boxes_a = _box_count(pts_a, e)
        boxes_all = np.unique(np.vstack([boxes_a, _box_count(pts_b, e)]), axis=0)
        m1, m2 = len(boxes_a), len(boxes_all)
        if m2 - m1 >= 0.02 * m1:
            saturated = False
        counts.append(m2)
    x = np.log(1.0 / eps)
    y = np.log(np.asarray(counts, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DimensionEstimate(
        epsilons=tuple(float(e) for e in eps),
        counts=tuple(int(c) for c in counts),
        fitted_dimension=float(slope),
        fit_residual=float(np.sqrt(np.mean(resid ** 2))),
        saturated=saturated,
    )


def constellation_sampler(codec):
    """Adapt a codec into a boxcount_dimension sampler over its own source."""

    def sample(count: int, rng: np.random.Generator) -> np.ndarray:
        x = numrep.draw_source(codec.spec.source_kind, rng, count)
        return codec.encode(x)

    return sample


@dataclass(frozen=True)
class StretchProfile:
    deltas: tuple
    mean_square: tuple
    gamma: float
    fit_residual: float


def stretch_profile(codec, deltas, sample_count: int,
                    rng: np.random.Generator | None = None) -> StretchProfile:
    """Fit the power law of encoder displacement under source perturbation.

    Estimates E||f(x + delta) - f(x)||^2 by Monte Carlo for each delta and
    returns the fitted exponent gamma of its log-log slope.  The perturbed
    source wraps at the interval ends, and displacement is measured per
    dimension on the unit circle: the folded maps here reset coordinates by
    whole units at segment boundaries, and circular distance keeps those
    resets from masking the local stretch.
    """
    d = np.asarray(deltas, dtype=np.float64).ravel()
    if d.size < 2:
        raise ValueError("need at least two perturbation sizes")
    if np.any(d <= 0.0) or np.any(d > 1e-2):
        raise ValueError("perturbations must lie in (0, 1e-2]")
    if np.any(np.diff(d) >= 0.0):
        raise ValueError("perturbations must be strictly decreasing")
    if sample_count < 10 ** 5:
        raise ValueError("sample_count must be at least 1e5")
    if codec.spec.source_kind != "uniform":
        raise ValueError("stretch profile needs a uniform-interval source")
    if rng is None:
        rng = np.random.default_rng(0x5EED)
    x = rng.random(sample_count) - 0.5
    s0 = codec.encode(x)
    vals = []
    for delta in d:
        xp = np.mod(x + delta + 0.5, 1.0) - 0.5
        diff = codec.encode(xp) - s0
        w = np.mod(diff, 1.0)
        torus = np.minimum(w, 1.0 - w)
        vals.append(float(np.mean(np.sum(torus * torus, axis=1))))
    vals = np.asarray(vals)
    if np.any(vals <= 0.0):
        raise ValueError("degenerate encoder: zero displacement measured")
    lx, ly = np.log(d), np.log(vals)
    gamma, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (gamma * lx + intercept)
    return StretchProfile(
        deltas=tuple(float(v) for v in d),
        mean_square=tuple(float(v) for v in vals),
        gamma=float(gamma),
        fit_residual=float(np.sqrt(np.mean(resid ** 2))),
    )

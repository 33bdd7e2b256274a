"""Piecewise-linear expansion codes: repetition, shift map, spherical map."""

import math

import numpy as np

from .base import Codec, CodecSpec, CapacityError, SEGMENT_CAP

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
GOLDEN_ITERS = 48


def optimal_a(sigma: float, n: int) -> tuple[int, bool]:
    """Stretch multiplier that balances segment-jump errors against in-segment
    noise, with its validity flag.

    Valid while sigma * sqrt(-log sigma) <= 1 / (16 sqrt(n)); outside that
    range the noise is too large for the rule and the minimum a = 2 is
    returned with the flag cleared.
    """
    if n < 2:
        raise ValueError("needs n >= 2")
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    if sigma >= 1.0:
        return 2, False
    spread = sigma * math.sqrt(-math.log(sigma))
    if spread > 1.0 / (16.0 * math.sqrt(n)):
        return 2, False
    a = math.floor(1.0 / (8.0 * math.sqrt(n) * spread))
    return max(2, a), True


class RepetitionCodec(Codec):
    def encode(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.repeat(x[:, None], self.spec.n, axis=1)

    def decode(self, y, sigma=0.0):
        return np.clip(np.mean(y, axis=1), -0.5, 0.5)


class ShiftMapCodec(Codec):
    """Chained mod-1 stretching.

    The source is shifted to the unit interval, x' = x + 1/2, then s_1 = x'
    and s_{i+1} = (b_i * s_i) mod 1, so dimension i traces the line
    g_i * x' mod 1 with g_i the product of the first i-1 multipliers.  The
    affine shift keeps the two ends of the source interval at the two far
    ends of the folded curve; wrapping x instead would park them side by
    side mid-curve, where boundary noise swaps them at cost O(1) per event.
    The image is a stack of prod(b) parallel segments; decoding projects the
    received point onto every segment and keeps the closest.
    """

    def __init__(self, spec: CodecSpec):
        super().__init__(spec)
        b = spec.stage_multipliers()
        self.gains = np.ones(spec.n)
        for i, m in enumerate(b):
            self.gains[i + 1] = self.gains[i] * m
        self.segments = int(np.prod(np.asarray(b, dtype=np.int64)))
        if self.segments > SEGMENT_CAP:
            raise CapacityError(
                f"{self.segments} segments exceed the cap {SEGMENT_CAP}")
        self.gain_sq = float(self.gains @ self.gains)
        t = np.arange(self.segments, dtype=np.int64)
        # Integer offsets of each dimension on segment t, exact by construction.
        self.offsets = (self.gains.astype(np.int64)[None, :] * t[:, None]) // self.segments
        self.off_dot_g = (self.offsets * self.gains[None, :]).sum(axis=1)

    def encode(self, x):
        x = np.asarray(x, dtype=np.float64)
        s = np.empty((x.shape[0], self.spec.n))
        # x + 1/2 can round up to 1.0 at the open end; pull it back inside.
        s[:, 0] = np.minimum(x + 0.5, np.nextafter(1.0, 0.0))
        for i, m in enumerate(self.spec.stage_multipliers()):
            s[:, i + 1] = np.mod(m * s[:, i], 1.0)
        return s

    def decode(self, y, sigma=0.0):
        y = np.asarray(y, dtype=np.float64)
        inv_b = 1.0 / self.segments
        y_dot_g = y @ self.gains
        y_sq = (y * y).sum(axis=1)
        best_d = np.full(y.shape[0], np.inf)
        best_x = np.zeros(y.shape[0])
        for t in range(self.segments):
            c = self.offsets[t]
            num = y_dot_g + self.off_dot_g[t]
            proj = np.clip(num / self.gain_sq, t * inv_b, (t + 1) * inv_b)
            r_sq = y_sq + 2.0 * (y @ c) + float(c @ c)
            d = r_sq - 2.0 * proj * num + proj * proj * self.gain_sq
            src = proj - 0.5
            take = (d < best_d) | ((d == best_d) & (src < best_x))
            best_d = np.where(take, d, best_d)
            best_x = np.where(take, src, best_x)
        return best_x


class SphericalCodec(Codec):
    """Shift map wound onto a torus: cos/sin pairs of a^j * x'.

    Output packs the n cosines first, then the n sines, scaled to unit norm.
    Decoding maximizes correlation over a precomputed grid, then refines the
    winning cell with a fixed number of golden-section steps.
    """

    def __init__(self, spec: CodecSpec):
        super().__init__(spec)
        self.freqs = (2.0 * math.pi) * np.array(
            [float(spec.a) ** j for j in range(spec.n)])
        self.scale = 1.0 / math.sqrt(spec.n)
        grid = max(1024, 32 * spec.a ** (spec.n - 1))
        if grid > SEGMENT_CAP:
            raise CapacityError(f"search grid {grid} exceeds the cap {SEGMENT_CAP}")
        self.grid_x = np.arange(grid) / grid
        self.grid_table = self._points(self.grid_x)

    def _points(self, unit_x):
        phases = np.multiply.outer(np.asarray(unit_x, dtype=np.float64), self.freqs)
        return self.scale * np.concatenate([np.cos(phases), np.sin(phases)], axis=-1)

    def encode(self, x):
        x = np.asarray(x, dtype=np.float64)
        return self._points(x + 0.5)

    def _corr(self, unit_x, y):
        phases = np.multiply.outer(unit_x, self.freqs)
        c = (np.cos(phases) * y[:, : self.spec.n]).sum(axis=1)
        s = (np.sin(phases) * y[:, self.spec.n:]).sum(axis=1)
        return self.scale * (c + s)

    def _corr_derivs(self, unit_x, y):
        phases = np.multiply.outer(unit_x, self.freqs)
        yc = y[:, : self.spec.n]
        ys = y[:, self.spec.n:]
        cos, sin = np.cos(phases), np.sin(phases)
        d1 = ((ys * cos - yc * sin) * self.freqs).sum(axis=1)
        d2 = -((yc * cos + ys * sin) * self.freqs ** 2).sum(axis=1)
        return d1, d2

    def decode(self, y, sigma=0.0):
        y = np.asarray(y, dtype=np.float64)
        win = np.argmax(y @ self.grid_table.T, axis=1)
        step = 1.0 / len(self.grid_x)
        lo = self.grid_x[win] - step
        hi = self.grid_x[win] + step
        cell_lo, cell_hi = lo.copy(), hi.copy()
        # Golden-section maximization of the correlation on the winning cell.
        c = hi - (hi - lo) * INV_PHI
        d = lo + (hi - lo) * INV_PHI
        fc = self._corr(c, y)
        fd = self._corr(d, y)
        for _ in range(GOLDEN_ITERS):
            c_wins = fc > fd
            hi = np.where(c_wins, d, hi)
            lo = np.where(c_wins, lo, c)
            c = hi - (hi - lo) * INV_PHI
            d = lo + (hi - lo) * INV_PHI
            fc = self._corr(c, y)
            fd = self._corr(d, y)
        mid = 0.5 * (lo + hi)
        # Value comparisons flatten out near the peak (the correlation is
        # locally quadratic), stalling golden section around sqrt(eps); a few
        # derivative steps push the stationary point to full precision.
        for _ in range(3):
            d1, d2 = self._corr_derivs(mid, y)
            delta = np.where(d2 < 0.0, d1 / d2, 0.0)
            mid = np.clip(mid - delta, cell_lo, cell_hi)
        x_unit = np.mod(mid, 1.0)
        return x_unit - 0.5

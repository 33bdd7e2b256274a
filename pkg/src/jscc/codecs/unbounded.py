"""Wrapper extending a unit-interval codec to sources on the whole real line.

The sample splits into an integer part and a fractional part in [-1/2, 1/2).
The fraction goes through the inner codec, whose outputs all stay inside the
unit interval; after recentering them the integer part is added onto the
first channel dimension, so that coordinate leaks at most half a unit around
the integer.  Decoding enumerates the few integer offsets consistent with the
first received coordinate and keeps the candidate whose re-encoding lands
closest to the full received vector.
"""

import numpy as np

from .base import Codec, CodecSpec
from .. import numrep

INTEGER_SEARCH_SIGMAS = 4.0


def integer_search_radius(sigma: float) -> float:
    """Offsets farther than this from the first coordinate are not tried."""
    return INTEGER_SEARCH_SIGMAS * sigma + 0.75


class UnboundedWrapCodec(Codec):
    def __init__(self, spec: CodecSpec, inner: Codec):
        super().__init__(spec)
        self.inner = inner

    def encode(self, x):
        x = np.asarray(x, dtype=np.float64)
        x1, x2 = numrep.split_integer_array(x)
        s = self.inner.encode(x2)
        s = s - 0.5
        s[:, 0] += x1
        return s

    def decode(self, y, sigma=0.0):
        y = np.asarray(y, dtype=np.float64)
        radius = integer_search_radius(sigma)
        first = y[:, 0]
        lo = np.floor(first - radius).astype(np.int64)
        hi = np.ceil(first + radius).astype(np.int64)
        span = int(np.max(hi - lo)) + 1
        best_x = np.zeros(y.shape[0])
        best_d = np.full(y.shape[0], np.inf)
        for off in range(span):
            cand = lo + off
            live = cand <= hi
            shifted = y.copy()
            shifted[:, 0] = first - cand
            inner_y = shifted + 0.5
            frac = self.inner.decode(inner_y, sigma=sigma)
            total = cand + frac
            re_enc = self.encode(total)
            d = np.einsum("ij,ij->i", y - re_enc, y - re_enc)
            take = live & ((d < best_d) | ((d == best_d) & (total < best_x)))
            best_d = np.where(take, d, best_d)
            best_x = np.where(take, total, best_x)
        return best_x

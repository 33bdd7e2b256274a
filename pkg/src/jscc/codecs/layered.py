"""Layered binary code with growing bit groups and separator digits.

Source bits are split into consecutive groups.  Group l goes to dimension
((l-1) mod n) + 1; within its dimension the group occupies the next size(l)
binary digit slots and is followed by one forced 0 digit.  The separators are
the error protection: a noise hit below a separator's weight cannot corrupt
any digit of the groups above it.

Group sizes grow linearly.  The standard rule gives group l exactly l bits.
The shifted rule gives group l = kn + i exactly i + k(n-1) bits, which trades
a slightly different protection profile at the same asymptotic cost.

Digit streams are evaluated in base 2 (the one place base 2 is legitimate:
separators, not a widened base, create the decoding gaps here).
"""

from dataclasses import dataclass

import numpy as np

from .base import Codec, CodecSpec
from .. import numrep


def group_size(index: int, n: int, variant: str) -> int:
    if variant == "standard":
        return index
    k, i = divmod(index - 1, n)
    return (i + 1) + k * (n - 1)


@dataclass(frozen=True)
class GroupEntry:
    """One group of the layout.

    Bit and slot positions are 1-based.  The group covers source bits
    [first_bit, first_bit + size) and digit slots [slot_start,
    slot_start + size) of its dimension; the separator 0 sits at slot
    slot_start + size.
    """

    index: int
    dim: int
    first_bit: int
    size: int
    slot_start: int


def scheme2_layout(n: int, n_groups: int, variant: str = "standard") -> tuple[GroupEntry, ...]:
    if n < 2:
        raise ValueError("needs n >= 2")
    if variant not in ("standard", "shifted"):
        raise ValueError(f"unknown grouping variant {variant!r}")
    entries = []
    next_bit = 1
    next_slot = [1] * n
    for l in range(1, n_groups + 1):
        dim = (l - 1) % n + 1
        size = group_size(l, n, variant)
        entries.append(GroupEntry(index=l, dim=dim, first_bit=next_bit,
                                  size=size, slot_start=next_slot[dim - 1]))
        next_bit += size
        next_slot[dim - 1] += size + 1
    return tuple(entries)


class DigitStream:
    """Digit slots of one dimension: source-bit index per slot, -1 = separator."""

    def __init__(self, slots: list[int]):
        self.slots = np.asarray(slots, dtype=np.int64)
        slot_numbers = np.arange(1, len(slots) + 1)
        all_weights = np.ldexp(1.0, -slot_numbers)
        data = self.slots >= 0
        self.data_weights = all_weights[data]
        self.data_bits = self.slots[data]
        tails = np.concatenate([np.cumsum(self.data_weights[::-1])[::-1][1:], [0.0]])
        self.thresholds = 0.5 * (self.data_weights + tails)
        self.max_value = float(self.data_weights.sum())


def build_streams(n: int, p: int, variant: str = "standard") -> list[DigitStream]:
    """Digit streams covering source bits 0..p-1 (0-based) of a layout."""
    slots: list[list[int]] = [[] for _ in range(n)]
    bit = 0
    l = 0
    while bit < p:
        l += 1
        dim = (l - 1) % n
        size = group_size(l, n, variant)
        take = min(size, p - bit)
        slots[dim].extend(range(bit, bit + take))
        bit += take
        if take == size:
            slots[dim].append(-1)
    return [DigitStream(s) for s in slots]


def greedy_stream_decode(r: np.ndarray, stream: DigitStream,
                         bits_out: np.ndarray, bit_offset: int = 0) -> None:
    """Exact nearest digit string of one stream, written into bits_out.

    Same subtree-midpoint argument as the wide-base code: every data slot is
    eventually followed by a separator (or the stream ends), so the digit-0
    subtree tops out strictly below the digit-1 subtree.
    """
    r = r.copy()
    for d in range(len(stream.data_weights)):
        # Strict comparison: midpoint ties resolve to the digit-0 subtree,
        # matching the smallest-source-value convention of the other decoders.
        take = r > stream.thresholds[d]
        bits_out[:, bit_offset + stream.data_bits[d]] = take
        r -= np.where(take, stream.data_weights[d], 0.0)


class Scheme2Codec(Codec):
    def __init__(self, spec: CodecSpec):
        super().__init__(spec)
        self.streams = build_streams(spec.n, spec.p, spec.grouping_variant)
        self.weight_matrix = np.zeros((spec.p, spec.n))
        for dim, stream in enumerate(self.streams):
            self.weight_matrix[stream.data_bits, dim] = stream.data_weights

    def encode(self, x):
        x = np.asarray(x, dtype=np.float64)
        bits = numrep.bits_from_ints(numrep.unit_fraction_ints(x, self.spec.p), self.spec.p)
        return bits.astype(np.float64) @ self.weight_matrix

    def decode_bits(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        bits = np.zeros((y.shape[0], self.spec.p), dtype=np.uint8)
        for dim, stream in enumerate(self.streams):
            greedy_stream_decode(y[:, dim], stream, bits)
        return bits

    def decode(self, y, sigma=0.0):
        return numrep.values_from_bit_rows(self.decode_bits(y), midpoint_fill=True)

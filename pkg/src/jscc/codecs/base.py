"""Codec descriptions, parameter validation, and constellation normalization."""

from dataclasses import dataclass

import numpy as np

from .. import numrep

SCHEMES = (
    "repetition",
    "shift_map",
    "spherical",
    "scheme1",
    "scheme2",
    "type1",
    "type2",
    "unbounded_wrap",
)

GROUPING_VARIANTS = ("standard", "shifted")

# Enumerated-decoder guard rails.  Anything past these turns a decode into an
# unbounded search, so the request is refused rather than attempted.
SEGMENT_CAP = 1 << 20
K_CAP = 24

NORMALIZATION_MIN_SAMPLES = 10 ** 6


class CapacityError(RuntimeError):
    """A requested configuration exceeds the enumerated-decoder caps."""


@dataclass(frozen=True)
class CodecSpec:
    """Declarative description of one code.

    a=None on shift_map, or k=None on type1/type2, declares a family whose
    design parameter is chosen per noise level by the sweep harness.
    """

    scheme: str
    n: int
    a: int | None = None
    b: tuple[int, ...] | None = None
    alpha: float | None = None
    k: int | None = None
    p: int = numrep.DEFAULT_PRECISION
    grouping_variant: str = "standard"
    inner: "CodecSpec | None" = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.grouping_variant not in GROUPING_VARIANTS:
            raise ValueError(f"unknown grouping variant {self.grouping_variant!r}")
        if not 1 <= self.p <= numrep.MAX_PRECISION:
            raise ValueError(f"p must be in [1, {numrep.MAX_PRECISION}]")
        if self.scheme == "repetition":
            self._need_n(1)
        elif self.scheme == "shift_map":
            self._need_n(2)
            if self.a is not None and self.b is not None:
                raise ValueError("give either a or per-stage b, not both")
            if self.a is not None:
                self._check_multiplier(self.a)
            if self.b is not None:
                if len(self.b) != self.n - 1:
                    raise ValueError(f"b needs {self.n - 1} entries, got {len(self.b)}")
                for m in self.b:
                    self._check_multiplier(m)
        elif self.scheme == "spherical":
            self._need_n(2)
            if self.a is None:
                raise ValueError("spherical code needs the multiplier a")
            self._check_multiplier(self.a)
        elif self.scheme == "scheme1":
            self._need_n(2)
            if self.alpha is None or not self.alpha > 2.0:
                raise ValueError("scheme1 needs a digit base alpha > 2")
        elif self.scheme == "scheme2":
            self._need_n(2)
        elif self.scheme in ("type1", "type2"):
            self._need_n(2)
            if self.k is not None:
                if self.k < 1:
                    raise ValueError(f"k must be >= 1, got {self.k}")
                if self.k > K_CAP:
                    raise CapacityError(f"k={self.k} exceeds the cap {K_CAP}")
                if self.scheme == "type1" and self.n * self.k - 1 > self.p:
                    raise ValueError(
                        f"type1 needs n*k-1 <= p, got {self.n * self.k - 1} > {self.p}")
                if self.scheme == "type2" and self.n * self.k > self.p:
                    raise ValueError(
                        f"type2 needs n*k <= p, got {self.n * self.k} > {self.p}")
        elif self.scheme == "unbounded_wrap":
            inner = self.inner
            if inner is None:
                inner = CodecSpec(scheme="scheme2", n=self.n, p=self.p,
                                  grouping_variant=self.grouping_variant)
                object.__setattr__(self, "inner", inner)
            if inner.scheme != "scheme2":
                raise ValueError("unbounded wrapper takes a scheme2 inner code")
            if inner.n != self.n:
                raise ValueError("wrapper and inner code disagree on n")

    def _need_n(self, lo: int) -> None:
        if self.n < lo:
            raise ValueError(f"{self.scheme} needs n >= {lo}, got {self.n}")

    @staticmethod
    def _check_multiplier(m) -> None:
        if not isinstance(m, (int, np.integer)) or m < 2:
            raise ValueError(f"stage multiplier must be an integer >= 2, got {m!r}")

    @property
    def dims(self) -> int:
        """Channel uses per source sample."""
        return 2 * self.n if self.scheme == "spherical" else self.n

    @property
    def is_family(self) -> bool:
        if self.scheme == "shift_map":
            return self.a is None and self.b is None
        if self.scheme in ("type1", "type2"):
            return self.k is None
        return False

    @property
    def source_kind(self) -> str:
        return "gaussian" if self.scheme == "unbounded_wrap" else "uniform"

    @property
    def source_variance(self) -> float:
        return 1.0 if self.scheme == "unbounded_wrap" else 1.0 / 12.0

    def stage_multipliers(self) -> tuple[int, ...]:
        """Per-stage multipliers of a concrete shift map."""
        if self.b is not None:
            return self.b
        if self.a is None:
            raise ValueError("family spec has no concrete multipliers yet")
        return (self.a,) * (self.n - 1)

    def describe(self) -> str:
        parts = [self.scheme, f"n={self.n}"]
        if self.scheme in ("shift_map", "spherical"):
            if self.b is not None:
                parts.append("b=" + "x".join(str(m) for m in self.b))
            elif self.a is not None:
                parts.append(f"a={self.a}")
            else:
                parts.append("a=auto")
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.scheme in ("type1", "type2"):
            parts.append(f"k={self.k}" if self.k is not None else "k=auto")
        if self.scheme in ("scheme2", "type2") and self.grouping_variant != "standard":
            parts.append(self.grouping_variant)
        if self.scheme == "unbounded_wrap":
            parts.append(f"inner=({self.inner.describe()})")
        return " ".join(parts)


class Codec:
    """One concrete encoder/decoder pair.

    encode maps a batch of source samples to an (n_samples, dims) array of raw
    channel coordinates.  decode maps received raw coordinates back to source
    estimates; decoders that model the noise level take it as sigma (std per
    raw coordinate).
    """

    def __init__(self, spec: CodecSpec):
        if spec.is_family:
            raise ValueError("family spec must be resolved to a concrete codec")
        self.spec = spec
        self.dims = spec.dims

    def encode(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def decode(self, y: np.ndarray, sigma: float = 0.0) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec.describe()}>"


@dataclass(frozen=True)
class NormalizationRecord:
    """Measured first and second moments of a constellation.

    mean is per raw coordinate; power is the average, across coordinates, of
    the centered second moment.  The harness transmits (s - mean) / sqrt(power)
    so the channel carries unit average power per dimension and the noise stays
    white in the decoder's raw geometry.
    """

    mean: tuple[float, ...]
    power: float
    samples: int


def measure_normalization(codec: Codec, sample_count: int = NORMALIZATION_MIN_SAMPLES,
                          rng: np.random.Generator | None = None) -> NormalizationRecord:
    if sample_count < NORMALIZATION_MIN_SAMPLES:
        raise ValueError(f"need at least {NORMALIZATION_MIN_SAMPLES} samples")
    if rng is None:
        rng = np.random.default_rng(0x5EED)
    chunk = 1 << 16
    done = 0
    dim_sum = np.zeros(codec.dims)
    dim_sq = np.zeros(codec.dims)
    while done < sample_count:
        m = min(chunk, sample_count - done)
        x = numrep.draw_source(codec.spec.source_kind, rng, m)
        s = codec.encode(x)
        dim_sum += s.sum(axis=0)
        dim_sq += (s * s).sum(axis=0)
        done += m
    mean = dim_sum / done
    var = dim_sq / done - mean * mean
    power = float(var.mean())
    if power <= 0.0:
        raise ValueError("constellation has no spread; nothing to normalize")
    return NormalizationRecord(mean=tuple(float(v) for v in mean),
                               power=power, samples=done)

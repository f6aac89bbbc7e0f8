"""Type-based lexical diversity: TTR, MSTTR, corrected indices, frequency spectra and growth curves."""

import math
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.stats import binom

from src.core.constants import GROWTH_CHECKPOINTS
from src.core.types import CurveKind, TypeDefinition
from src.core.validators import ArgumentError, UndefinedMeasureError, require_positive
from src.services.corpus import TokenStream, segment, type_keys


@dataclass(frozen=True)
class FrequencySpectrum:
    """Counts V(m,N) of types occurring exactly m times in N tokens."""

    N: int
    V: int
    spectrum: Mapping[int, int]

    def __post_init__(self):
        classes = {}
        for m, vm in sorted(dict(self.spectrum).items()):
            if int(m) != m or m < 1:
                raise ArgumentError(f"frequency class must be a positive integer (got {m})")
            if int(vm) != vm or vm < 0:
                raise ArgumentError(f"V({m}) must be a non-negative integer (got {vm})")
            if vm:
                classes[int(m)] = int(vm)
        if sum(classes.values()) != self.V:
            raise ArgumentError(f"spectrum sums to {sum(classes.values())} types, expected V={self.V}")
        if sum(m * vm for m, vm in classes.items()) != self.N:
            tokens = sum(m * vm for m, vm in classes.items())
            raise ArgumentError(f"spectrum accounts for {tokens} tokens, expected N={self.N}")
        object.__setattr__(self, "spectrum", MappingProxyType(classes))

    @classmethod
    def from_counts(cls, counts: Mapping[str, int] | Iterable[int]) -> "FrequencySpectrum":
        """Build from per-type frequencies (a mapping type -> count, or the counts alone)."""
        freqs = list(counts.values()) if isinstance(counts, Mapping) else list(counts)
        classes = Counter(freqs)
        return cls(N=sum(freqs), V=len(freqs), spectrum=dict(classes))

    def vm(self, m: int) -> int:
        return self.spectrum.get(m, 0)

    @property
    def max_m(self) -> int:
        return max(self.spectrum, default=0)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(m, V(m)) as integer arrays over the non-empty classes."""
        m = np.fromiter(self.spectrum.keys(), dtype=np.int64, count=len(self.spectrum))
        vm = np.fromiter(self.spectrum.values(), dtype=np.int64, count=len(self.spectrum))
        return m, vm


@dataclass(frozen=True)
class SampleSeries:
    """Per-segment values of one measure, in text order."""

    measure_name: str
    segment_size: int
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not all(math.isfinite(v) for v in self.values):
            raise ArgumentError(f"{self.measure_name} series contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class CorrectedIndices:
    herdan_c: float
    guiraud_r: float
    yule_k: float


@dataclass(frozen=True)
class GrowthPoint:
    N: int
    V: float
    V1: float
    V2: float
    kind: CurveKind = CurveKind.OBSERVED


@dataclass(frozen=True)
class GrowthCurve:
    """Vocabulary growth checkpoints; ``kind`` is ``expected`` when points mix interpolated and extrapolated."""

    checkpoints: tuple[GrowthPoint, ...]
    kind: CurveKind = CurveKind.OBSERVED

    def __post_init__(self):
        object.__setattr__(self, "checkpoints", tuple(self.checkpoints))
        previous = 0
        for p in self.checkpoints:
            if p.N <= previous:
                raise ArgumentError("growth checkpoints must be strictly increasing in N")
            previous = p.N
            slack = 1e-9 * max(1.0, abs(p.V))
            if p.V > p.N + slack or p.V1 + p.V2 > p.V + slack:
                raise ArgumentError(f"inconsistent growth point at N={p.N}: V={p.V}, V1={p.V1}, V2={p.V2}")

    @classmethod
    def of(cls, points: Sequence[GrowthPoint]) -> "GrowthCurve":
        kinds = {p.kind for p in points}
        kind = kinds.pop() if len(kinds) == 1 else CurveKind.EXPECTED
        return cls(tuple(points), kind)

    def part(self, kind: CurveKind) -> "GrowthCurve":
        return GrowthCurve(tuple(p for p in self.checkpoints if p.kind is kind), kind)

    def column(self, name: str) -> list[float]:
        return [getattr(p, name) for p in self.checkpoints]


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------


def ttr(stream: TokenStream, type_definition: TypeDefinition = TypeDefinition.SURFACE) -> float:
    """Distinct types divided by word tokens."""
    keys = type_keys(stream, type_definition)
    if not keys:
        raise UndefinedMeasureError("TTR is undefined for an empty stream")
    return len(set(keys)) / len(keys)


def _keys_by_index(stream: TokenStream, type_definition: TypeDefinition) -> list[Optional[str]]:
    keys = iter(type_keys(stream, type_definition))
    return [next(keys) if t.is_word else None for t in stream.tokens]


def msttr(
    stream: TokenStream,
    segment_size: int,
    type_definition: TypeDefinition = TypeDefinition.SURFACE,
) -> tuple[float, SampleSeries]:
    """Mean TTR over consecutive equal-sized word segments, plus the per-segment series."""
    segments = segment(stream, segment_size)
    if not segments:
        raise UndefinedMeasureError(f"no full segment of {segment_size} word tokens")
    keys = _keys_by_index(stream, type_definition)
    values = []
    for seg in segments:
        types = {keys[i] for i in range(seg.start, seg.end)}
        types.discard(None)
        values.append(len(types) / seg.word_count)
    series = SampleSeries("ttr", segment_size, tuple(values))
    return float(np.mean(series.values)), series


def frequency_spectrum(
    stream: TokenStream, type_definition: TypeDefinition = TypeDefinition.SURFACE
) -> FrequencySpectrum:
    keys = type_keys(stream, type_definition)
    if not keys:
        raise UndefinedMeasureError("frequency spectrum is undefined for an empty stream")
    return FrequencySpectrum.from_counts(Counter(keys))


def corrected_indices(spectrum: FrequencySpectrum) -> CorrectedIndices:
    """Herdan's C, Guiraud's R and Yule's K."""
    if spectrum.N < 2 or spectrum.V < 1:
        raise UndefinedMeasureError(f"corrected indices need N >= 2 (got N={spectrum.N})")
    N, V = spectrum.N, spectrum.V
    s2 = sum(m * m * vm for m, vm in spectrum.spectrum.items())
    return CorrectedIndices(
        herdan_c=math.log(V) / math.log(N),
        guiraud_r=V / math.sqrt(N),
        yule_k=1e4 * (s2 - N) / (N * N),
    )


def growth_rate(spectrum: FrequencySpectrum) -> float:
    """Hapax legomena per token, V(1,N)/N."""
    if spectrum.N < 1:
        raise ArgumentError("growth rate needs N >= 1")
    return spectrum.vm(1) / spectrum.N


def default_growth_step(n_tokens: int) -> int:
    return max(1, math.ceil(n_tokens / GROWTH_CHECKPOINTS))


def observed_growth(
    stream: TokenStream,
    step: Optional[int] = None,
    type_definition: TypeDefinition = TypeDefinition.SURFACE,
) -> GrowthCurve:
    """V, V1 and V2 at N = step, 2*step, ..., N_total in one pass over the word tokens."""
    keys = type_keys(stream, type_definition)
    step = default_growth_step(len(keys)) if step is None else step
    require_positive("step", step)

    counts: Counter = Counter()
    v = v1 = v2 = 0
    points = []
    for n, key in enumerate(keys, 1):
        c = counts[key] = counts[key] + 1
        if c == 1:
            v += 1
            v1 += 1
        elif c == 2:
            v1 -= 1
            v2 += 1
        elif c == 3:
            v2 -= 1
        if n % step == 0 or n == len(keys):
            points.append(GrowthPoint(n, v, v1, v2, CurveKind.OBSERVED))
    return GrowthCurve(tuple(points), CurveKind.OBSERVED)


def binomial_interpolation(spectrum: FrequencySpectrum, N_prime: float) -> float:
    """Expected vocabulary of a random N'-token subsample: sum of V(m,N) * (1 - (1 - N'/N)^m)."""
    if not 0 <= N_prime <= spectrum.N:
        raise ArgumentError(f"N' must lie in [0, {spectrum.N}] (got {N_prime}); extrapolate with an LNRE model")
    if N_prime == spectrum.N:
        return float(spectrum.V)
    m, vm = spectrum.arrays()
    q = 1.0 - N_prime / spectrum.N
    return float(np.sum(vm * -np.expm1(m * np.log(q)))) if q > 0 else float(spectrum.V)


def binomial_spectrum_interpolation(spectrum: FrequencySpectrum, m: int, N_prime: float) -> float:
    """Expected V(m,N') of a random subsample by binomial thinning of every class k >= m."""
    require_positive("m", m)
    if not 0 <= N_prime <= spectrum.N:
        raise ArgumentError(f"N' must lie in [0, {spectrum.N}] (got {N_prime})")
    k, vk = spectrum.arrays()
    return float(np.sum(vk * binom.pmf(m, k, N_prime / spectrum.N)))


def interpolated_growth(spectrum: FrequencySpectrum, checkpoints: Sequence[int]) -> GrowthCurve:
    """Expected V, V1 and V2 at subsample sizes up to N."""
    points = [
        GrowthPoint(
            int(n),
            binomial_interpolation(spectrum, n),
            binomial_spectrum_interpolation(spectrum, 1, n),
            binomial_spectrum_interpolation(spectrum, 2, n),
            CurveKind.INTERPOLATED,
        )
        for n in checkpoints
        if 0 < n <= spectrum.N
    ]
    return GrowthCurve(tuple(points), CurveKind.INTERPOLATED)

"""Randomness quality metrics over byte samples.

All functions are pure.  They accept a :class:`~emn.generators.ByteSample`
or anything convertible to a ``uint8`` array (bytes, bytearray, numpy array,
list of ints).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleError, InsufficientSampleError, NumericFailureError
from .generators import ByteSample

N_BINS = 256
CHI_DOF = N_BINS - 1
MIN_CHI_SAMPLE = N_BINS * 5
MIN_RUNS_BITS = 100

DEFAULT_SAMPLE_BYTES = 100_000
DEFAULT_MAX_LAG = 100
DEFAULT_HEATMAP_K = 10
DEFAULT_N_FFT = 4096

GAMMA_ITMAX = 300
_GAMMA_EPS = 1e-15
_FPMIN = 1e-300


def _as_bytes(sample) -> np.ndarray:
    if isinstance(sample, ByteSample):
        return sample.array
    if isinstance(sample, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(sample), dtype=np.uint8)
    arr = np.asarray(sample)
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValueError("byte values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr.reshape(-1)


def _counts(arr: np.ndarray) -> np.ndarray:
    return np.bincount(arr, minlength=N_BINS)


# ---------------------------------------------------------------------------
# Result records


@dataclass(frozen=True)
class ChiSquaredResult:
    statistic: float
    p_value: float
    dof: int
    bins: tuple[int, ...]


@dataclass(frozen=True)
class EntropyResult:
    bits: float


@dataclass(frozen=True)
class PredictabilityResult:
    r: float


@dataclass(frozen=True)
class RunsResult:
    observed: int
    expected: float
    n0: int
    n1: int
    z_score: float


@dataclass(frozen=True)
class Pmf:
    probabilities: tuple[float, ...]


@dataclass(frozen=True)
class AcfSeries:
    lags: tuple[int, ...]
    values: tuple[float, ...]

    def value_at(self, lag: int) -> float:
        return self.values[self.lags.index(lag)]


@dataclass(frozen=True)
class SpectralSeries:
    frequencies: tuple[float, ...]
    power: tuple[float, ...]
    n_fft: int

    def total_power(self) -> float:
        """Sum of the two-sided periodogram reconstructed from the one-sided bins."""
        p = np.asarray(self.power)
        return float(p[0] + p[-1] + 2.0 * p[1:-1].sum())


@dataclass(frozen=True)
class LagCorrMatrix:
    lags: tuple[int, ...]
    matrix: tuple[tuple[float, ...], ...]


# ---------------------------------------------------------------------------
# Incomplete gamma


def _log_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _gamma_p_series(a: float, x: float) -> float:
    ap = a
    delta = total = 1.0 / a
    for _ in range(GAMMA_ITMAX):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * _GAMMA_EPS:
            return total * math.exp(_log_prefactor(a, x))
    raise NumericFailureError(f"gamma series did not converge for a={a}, x={x}")


def _gamma_q_continued_fraction(a: float, x: float) -> float:
    # modified Lentz
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, GAMMA_ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _GAMMA_EPS:
            return math.exp(_log_prefactor(a, x)) * h
    raise NumericFailureError(f"gamma continued fraction did not converge for a={a}, x={x}")


def gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function ``Q(a, x)``."""
    if not a > 0:
        raise ValueError(f"gamma_q needs a > 0, got {a}")
    if x < 0:
        raise ValueError(f"gamma_q needs x >= 0, got {x}")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        q = 1.0 - _gamma_p_series(a, x)
    else:
        q = _gamma_q_continued_fraction(a, x)
    return min(1.0, max(0.0, q))


def chi_squared_p_value(statistic: float, dof: int = CHI_DOF) -> float:
    """Upper-tail probability of a chi-squared statistic."""
    return gamma_q(dof / 2.0, statistic / 2.0)


# ---------------------------------------------------------------------------
# Scalar metrics


def chi_squared_test(sample) -> ChiSquaredResult:
    """Goodness of fit of the byte histogram against the uniform distribution."""
    arr = _as_bytes(sample)
    n = arr.size
    if n < MIN_CHI_SAMPLE:
        raise InsufficientSampleError(
            f"chi-squared needs at least {MIN_CHI_SAMPLE} bytes (5 per bin), got {n}"
        )
    counts = _counts(arr)
    expected = n / N_BINS
    statistic = float(((counts - expected) ** 2).sum() / expected)
    return ChiSquaredResult(
        statistic=statistic,
        p_value=chi_squared_p_value(statistic, CHI_DOF),
        dof=CHI_DOF,
        bins=tuple(counts.tolist()),
    )


def shannon_entropy(sample) -> EntropyResult:
    """Empirical Shannon entropy of the byte distribution, in bits (0..8)."""
    arr = _as_bytes(sample)
    if arr.size == 0:
        raise InsufficientSampleError("entropy of an empty sample is undefined")
    counts = _counts(arr)
    p = counts[counts > 0] / arr.size
    h = float(-(p * np.log2(p)).sum())
    return EntropyResult(bits=min(8.0, max(0.0, h)))


def _centered(arr: np.ndarray) -> tuple[np.ndarray, float]:
    x = arr.astype(np.float64)
    d = x - x.mean()
    denom = float(np.dot(d, d))
    if denom == 0.0:
        raise DegenerateSampleError("sample has zero variance")
    return d, denom


def _lag_ratio(d: np.ndarray, denom: float, lag: int) -> float:
    # numerator over n - lag pairs, denominator over all n terms
    return float(np.dot(d[:-lag], d[lag:])) / denom


def predictability(sample) -> PredictabilityResult:
    """Correlation between successive outputs.

    Numerator sums the ``n - 1`` lag-1 products, the denominator all ``n``
    squared deviations, so this is exactly lag 1 of :func:`autocorrelation`.
    """
    arr = _as_bytes(sample)
    if arr.size < 2:
        raise InsufficientSampleError("predictability needs at least 2 bytes")
    d, denom = _centered(arr)
    return PredictabilityResult(r=_lag_ratio(d, denom, 1))


def count_runs(bits) -> RunsResult:
    """Wald-Wolfowitz runs statistics for a 0/1 sequence."""
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    n = int(bits.size)
    n1 = int(np.count_nonzero(bits))
    n0 = n - n1
    if n0 == 0 or n1 == 0:
        raise DegenerateSampleError("runs test needs both bit values present")
    observed = 1 + int(np.count_nonzero(bits[1:] != bits[:-1]))
    prod = 2 * n0 * n1
    expected = prod / n + 1.0
    variance = prod * (prod - n) / (n * n * (n - 1))
    z = (observed - expected) / math.sqrt(variance) if variance > 0 else 0.0
    return RunsResult(observed=observed, expected=expected, n0=n0, n1=n1, z_score=z)


def runs_test(sample) -> RunsResult:
    """Runs test on the sample's bit expansion, most significant bit first."""
    arr = _as_bytes(sample)
    if arr.size * 8 < MIN_RUNS_BITS:
        raise InsufficientSampleError(f"runs test needs at least {MIN_RUNS_BITS} bits")
    return count_runs(np.unpackbits(arr, bitorder="big"))


# ---------------------------------------------------------------------------
# Plot series


def pmf(sample) -> Pmf:
    arr = _as_bytes(sample)
    if arr.size == 0:
        raise InsufficientSampleError("PMF of an empty sample is undefined")
    return Pmf(probabilities=tuple((_counts(arr) / arr.size).tolist()))


def autocorrelation(sample, max_lag: int = DEFAULT_MAX_LAG) -> AcfSeries:
    """Biased autocorrelation estimator for lags ``0..max_lag``."""
    arr = _as_bytes(sample)
    if max_lag < 1:
        raise ValueError("max_lag must be a positive integer")
    if max_lag >= arr.size:
        raise InsufficientSampleError(f"max_lag {max_lag} must be below sample length {arr.size}")
    d, denom = _centered(arr)
    values = [1.0] + [_lag_ratio(d, denom, lag) for lag in range(1, max_lag + 1)]
    return AcfSeries(lags=tuple(range(max_lag + 1)), values=tuple(values))


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def fft_radix2(x) -> np.ndarray:
    """Iterative decimation-in-time FFT; ``len(x)`` must be a power of two."""
    a = np.asarray(x, dtype=np.complex128).reshape(-1)
    n = a.size
    if not _is_power_of_two(n):
        raise ValueError(f"FFT length must be a power of two, got {n}")
    levels = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(levels):
        rev |= ((idx >> b) & 1) << (levels - 1 - b)
    a = a[rev]
    size = 2
    while size <= n:
        half = size // 2
        twiddle = np.exp(-2j * np.pi * np.arange(half) / size)
        blocks = a.reshape(-1, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * twiddle
        a = np.concatenate((even + odd, even - odd), axis=1).reshape(-1)
        size *= 2
    return a


def power_spectrum(sample, n_fft: int = DEFAULT_N_FFT) -> SpectralSeries:
    """One-sided periodogram ``|DFT(x - mean)|^2 / n_fft`` of the first ``n_fft`` bytes."""
    arr = _as_bytes(sample)
    if not _is_power_of_two(n_fft):
        raise ValueError(f"n_fft must be a power of two, got {n_fft}")
    if n_fft > arr.size:
        raise ValueError(f"n_fft {n_fft} exceeds sample length {arr.size}")
    x = arr[:n_fft].astype(np.float64)
    spectrum = fft_radix2(x - x.mean())[: n_fft // 2 + 1]
    power = (spectrum.real**2 + spectrum.imag**2) / n_fft
    freqs = np.arange(n_fft // 2 + 1) / n_fft
    return SpectralSeries(frequencies=tuple(freqs.tolist()), power=tuple(power.tolist()), n_fft=n_fft)


def lag_correlation_matrix(sample, max_lag: int = DEFAULT_HEATMAP_K) -> LagCorrMatrix:
    """Pearson correlations among the lagged copies ``x[l : l + n - max_lag]``."""
    arr = _as_bytes(sample)
    if max_lag < 1:
        raise ValueError("max_lag must be a positive integer")
    if 2 * max_lag >= arr.size:
        raise InsufficientSampleError(f"max_lag {max_lag} must be below half the sample length")
    window = arr.size - max_lag
    rows = np.lib.stride_tricks.sliding_window_view(arr.astype(np.float64), window)[: max_lag + 1]
    centered = rows - rows.mean(axis=1, keepdims=True)
    norms = np.sqrt((centered * centered).sum(axis=1))
    if np.any(norms == 0.0):
        raise DegenerateSampleError("a lagged copy has zero variance")
    z = centered / norms[:, None]
    corr = z @ z.T
    corr = np.clip((corr + corr.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(corr, 1.0)
    return LagCorrMatrix(
        lags=tuple(range(max_lag + 1)),
        matrix=tuple(tuple(row) for row in corr.tolist()),
    )

"""
Signal ingestion and preprocessing ahead of symbolization.

Raw series are normalized to zero mean and unit (population) standard
deviation, then decorrelated by decimating at the first minimum of the
sample autocorrelation. The decimated phases are concatenated so that no
samples are thrown away.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import DegenerateSignal, NoAcfMinimumWarning, SymbolicMarkovError


@dataclass(frozen=True)
class Signal:
    """A scalar time series plus light metadata.

    ``samples`` is stored as a read-only float64 array.
    """

    samples: np.ndarray
    sample_rate_hz: float | None = None
    label: str = ""

    def __post_init__(self):
        x = np.array(self.samples, dtype=float).ravel()
        if x.size == 0:
            raise SymbolicMarkovError("signal has no samples")
        if not np.all(np.isfinite(x)):
            raise SymbolicMarkovError("signal contains non-finite values")
        if self.sample_rate_hz is not None and not self.sample_rate_hz > 0:
            raise SymbolicMarkovError("sample_rate_hz must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    def __len__(self):
        return self.samples.size

    def with_samples(self, samples) -> "Signal":
        return replace(self, samples=samples)


def _as_signal(s) -> Signal:
    return s if isinstance(s, Signal) else Signal(s)


def normalize(s) -> Signal:
    """Subtract the mean and divide by the population standard deviation."""
    s = _as_signal(s)
    x = s.samples
    if x.size < 2:
        raise DegenerateSignal("normalization needs at least two samples")
    mu = x.mean()
    sd = x.std()
    if sd == 0 or not np.isfinite(sd):
        raise DegenerateSignal("signal is constant")
    z = (x - mu) / sd
    # one corrective pass removes residual rounding in mean/std
    z = (z - z.mean()) / z.std()
    return s.with_samples(z)


def autocorrelation(x, max_lag: int) -> np.ndarray:
    """Biased sample autocorrelation for lags ``0..max_lag``.

    acf(l) = (1/N) sum_t (x_t - m)(x_{t+l} - m) / var, so acf(0) == 1.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if max_lag >= n:
        raise ValueError("max_lag must be smaller than the series length")
    xc = x - x.mean()
    var = np.dot(xc, xc) / n
    if var == 0:
        raise DegenerateSignal("signal is constant")
    # FFT with zero padding to avoid circular wrap-around
    nfft = 1 << int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[: max_lag + 1] / n
    return acov / var


class AcfMinimum(NamedTuple):
    lag: int
    found: bool


def default_max_lag(n: int) -> int:
    return max(1, min(n // 4, 1000))


def acf_first_minimum(s, max_lag: int | None = None) -> AcfMinimum:
    """First local minimum of the autocorrelation, with a found flag.

    A lag l >= 1 qualifies when acf(l) < acf(l-1) and acf(l) <= acf(l+1);
    on a plateau the smallest lag wins. Falls back to ``max_lag`` with
    ``found=False``.
    """
    x = _as_signal(s).samples
    n = x.size
    if max_lag is None:
        max_lag = default_max_lag(n)
    if max_lag < 1 or max_lag >= n:
        raise ValueError("max_lag must satisfy 1 <= max_lag < len(signal)")
    top = min(max_lag + 1, n - 1)
    acf = autocorrelation(x, top)
    for lag in range(1, max_lag + 1):
        if lag + 1 > top:
            break
        if acf[lag] < acf[lag - 1] and acf[lag] <= acf[lag + 1]:
            return AcfMinimum(lag, True)
    return AcfMinimum(max_lag, False)


def autocorr_first_min_lag(s, max_lag: int | None = None) -> int:
    """Lag of the first autocorrelation minimum.

    Emits :class:`NoAcfMinimumWarning` when the fallback ``max_lag`` is used.
    """
    res = acf_first_minimum(s, max_lag)
    if not res.found:
        warnings.warn(
            f"no autocorrelation minimum within {res.lag} lags",
            NoAcfMinimumWarning,
            stacklevel=2,
        )
    return res.lag


def downsample_concat(s, lag: int) -> Signal:
    """Concatenate the ``lag`` phase-shifted decimations ``s[i::lag]``."""
    s = _as_signal(s)
    if lag < 1:
        raise ValueError("lag must be >= 1")
    x = s.samples
    if lag == 1:
        return s
    return s.with_samples(np.concatenate([x[i::lag] for i in range(lag)]))


@dataclass(frozen=True)
class PreprocessResult:
    signal: Signal
    lag: int
    acf_minimum_found: bool
    max_lag: int
    n_samples: int = field(default=0)

    def diagnostics(self) -> dict:
        return {
            "n_samples": self.n_samples,
            "max_lag": self.max_lag,
            "lag": self.lag,
            "acf_minimum_found": self.acf_minimum_found,
        }


def preprocess(s, max_lag: int | None = None) -> PreprocessResult:
    """Normalize, locate the decorrelation lag and downsample-concatenate."""
    z = normalize(s)
    if max_lag is None:
        max_lag = default_max_lag(len(z))
    res = acf_first_minimum(z, max_lag)
    out = downsample_concat(z, res.lag)
    return PreprocessResult(out, res.lag, res.found, max_lag, len(z))


# --- ingestion -------------------------------------------------------------

def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def parse_signal_text(text: str, label: str = "") -> Signal:
    """Parse one numeric value per line; an optional non-numeric header line
    is skipped. Non-finite or malformed rows raise."""
    lines = text.splitlines()
    values = []
    start = 0
    while start < len(lines) and not lines[start].strip():
        start += 1
    if start < len(lines) and not _is_number(lines[start].strip().split(",")[0]):
        start += 1
    for lineno, raw in enumerate(lines[start:], start=start + 1):
        tok = raw.strip()
        if not tok:
            continue
        if "," in tok:
            raise SymbolicMarkovError(f"line {lineno}: expected a single column")
        try:
            v = float(tok)
        except ValueError:
            raise SymbolicMarkovError(f"line {lineno}: not a number: {tok!r}") from None
        if not np.isfinite(v):
            raise SymbolicMarkovError(f"line {lineno}: non-finite value {tok!r}")
        values.append(v)
    if not values:
        raise SymbolicMarkovError("no samples found")
    return Signal(np.array(values), label=label)


def read_signal(path, label: str = "") -> Signal:
    return parse_signal_text(Path(path).read_text(), label=label)


def format_signal(s, header: str = "value") -> str:
    x = _as_signal(s).samples
    rows = [header] if header else []
    rows.extend(repr(float(v)) for v in x)
    return "\r\n".join(rows) + "\r\n"


def write_signal(s, path, header: str = "value") -> None:
    Path(path).write_bytes(format_signal(s, header).encode())

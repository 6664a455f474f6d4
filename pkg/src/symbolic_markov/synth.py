"""
Synthetic data with known ground truth.

All randomness flows through numpy's PCG64 bit generator, seeded from a
single integer. Batches derive per-task streams with
``SeedSequence(seed).spawn(n)`` via :func:`derived_seeds`.
"""
from __future__ import annotations

import itertools
import json
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import InvalidSpec
from .partition import SYMBOL_CHARS, SymbolSeq
from .sigprep import Signal

PERIOD = 40
UNSTABLE_AMPLITUDE = 1.0
AMPLITUDE_JITTER = 0.05
NOISE_LEVEL = 0.10
STABLE_STD = 0.2
STABLE_POLE = 0.5


def rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derived_seeds(seed: int, count: int) -> list[int]:
    """Independent 64-bit child seeds for parallel batches."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]


@dataclass(frozen=True)
class ChainSpec:
    """A k-th order chain: ``conditionals[context] -> next-symbol row``.

    Contexts are tuples of length ``order``; the table must cover all of
    them.
    """

    order: int
    alphabet_size: int
    conditionals: dict
    seed: int = 0

    def __post_init__(self):
        if self.order < 0:
            raise InvalidSpec("order must be >= 0")
        if self.alphabet_size < 1:
            raise InvalidSpec("alphabet_size must be >= 1")
        table = {}
        for ctx, row in self.conditionals.items():
            ctx = tuple(int(c) for c in ctx)
            row = np.asarray(row, dtype=float)
            if len(ctx) != self.order or any(not 0 <= c < self.alphabet_size for c in ctx):
                raise InvalidSpec(f"bad context {ctx}")
            if row.shape != (self.alphabet_size,) or np.any(row < 0):
                raise InvalidSpec(f"bad row for context {ctx}")
            if abs(row.sum() - 1) > 1e-12:
                raise InvalidSpec(f"row for context {ctx} does not sum to 1")
            table[ctx] = row
        want = set(itertools.product(range(self.alphabet_size), repeat=self.order))
        if set(table) != want:
            raise InvalidSpec("conditionals must cover every context exactly once")
        object.__setattr__(self, "conditionals", table)

    def row(self, context) -> np.ndarray:
        return self.conditionals[tuple(context)]

    def table(self) -> np.ndarray:
        """Rows stacked in lexicographic context order."""
        ctxs = itertools.product(range(self.alphabet_size), repeat=self.order)
        return np.array([self.conditionals[c] for c in ctxs])

    @classmethod
    def from_table(cls, order, alphabet_size, table, seed=0) -> "ChainSpec":
        ctxs = itertools.product(range(alphabet_size), repeat=order)
        return cls(order, alphabet_size, dict(zip(ctxs, np.asarray(table, float))), seed)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "alphabet_size": self.alphabet_size,
            "seed": self.seed,
            "conditionals": {
                "".join(SYMBOL_CHARS[c] for c in ctx): self.conditionals[ctx].tolist()
                for ctx in sorted(self.conditionals)
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChainSpec":
        cond = {tuple(SYMBOL_CHARS.index(ch) for ch in key): row
                for key, row in d["conditionals"].items()}
        return cls(int(d["order"]), int(d["alphabet_size"]), cond, int(d.get("seed", 0)))

    @classmethod
    def from_json(cls, text: str) -> "ChainSpec":
        return cls.from_dict(json.loads(text))


def simulate_chain(spec: ChainSpec, n: int, seed=None) -> SymbolSeq:
    """Draw ``n`` symbols; the first ``order`` symbols are a uniform context."""
    k, a = spec.order, spec.alphabet_size
    if n < k + 1:
        raise InvalidSpec("n must be at least order + 1")
    g = rng(spec.seed if seed is None else seed)
    init = g.integers(0, a, size=k)
    u = g.random(n - k)
    cdf = np.cumsum(spec.table(), axis=1)
    cdf[:, -1] = 1.0
    cdf_rows = [r.tolist() for r in cdf]
    out = np.empty(n, dtype=np.int64)
    out[:k] = init
    n_ctx = a ** k
    ctx = 0
    for v in init:
        ctx = ctx * a + int(v)
    last = a - 1
    for t, ut in enumerate(u.tolist(), start=k):
        sym = min(bisect_right(cdf_rows[ctx], ut), last)
        out[t] = sym
        if k:
            ctx = (ctx * a + sym) % n_ctx
    return SymbolSeq(out, a)


def iid_spec(probs, seed=0) -> ChainSpec:
    probs = np.asarray(probs, dtype=float)
    return ChainSpec(0, probs.size, {(): probs}, seed)


def _slow_envelope(g, n: int, corr_len: float) -> np.ndarray:
    """Zero-mean, unit-variance Gaussian process with correlation length
    ``corr_len`` samples (one-pole low-pass of white noise)."""
    pole = float(np.exp(-1.0 / corr_len))
    w = g.standard_normal(n + 1)
    # w[0] seeds the filter state from the stationary distribution
    y_prev = w[0] / np.sqrt(1 - pole**2)
    z = sps.lfilter([1.0], [1.0, -pole], w[1:], zi=[pole * y_prev])[0]
    return z * np.sqrt(1 - pole**2)


def surrogate_stable(n: int, seed: int = 0, std: float = STABLE_STD,
                     pole: float = STABLE_POLE) -> Signal:
    """First-order low-pass filtered Gaussian noise (unimodal density)."""
    if n < 1000:
        raise InvalidSpec("surrogates need n >= 1000")
    g = rng(seed)
    x = _slow_envelope(g, n, -1.0 / np.log(pole))
    return Signal(std * x, label="stable")


def surrogate_unstable(n: int, seed: int = 0, period: int = PERIOD,
                       amplitude: float = UNSTABLE_AMPLITUDE,
                       jitter: float = AMPLITUDE_JITTER,
                       noise: float = NOISE_LEVEL) -> Signal:
    """Limit-cycle oscillation: a sinusoid with slowly wandering amplitude
    plus white noise (bimodal, arcsine-like density)."""
    if n < 1000:
        raise InvalidSpec("surrogates need n >= 1000")
    g = rng(seed)
    phase0 = g.uniform(0, 2 * np.pi)
    env = amplitude * (1 + jitter * _slow_envelope(g, n, 10.0 * period))
    t = np.arange(n)
    x = env * np.sin(2 * np.pi * t / period + phase0)
    x = x + noise * amplitude * g.standard_normal(n)
    return Signal(x, label="unstable")


def rms(s) -> float:
    x = s.samples if isinstance(s, Signal) else np.asarray(s, dtype=float)
    return float(np.sqrt(np.mean(x**2)))


def histogram_modes(x, bins: int = 32, trough_ratio: float = 0.8,
                    min_height: float = 0.1) -> list[int]:
    """Bin indices of the well-separated modes of a (3-bin smoothed)
    histogram.

    Local maxima lower than ``min_height`` times the tallest bin are tail
    noise and ignored. Two neighbouring maxima count as distinct modes only
    when the lowest bin between them is at most ``trough_ratio`` times the
    smaller of the two; otherwise the lower one is absorbed.
    """
    x = x.samples if isinstance(x, Signal) else np.asarray(x, dtype=float)
    h, _ = np.histogram(x, bins=bins)
    h = np.convolve(np.pad(h.astype(float), 1, mode="edge"), np.ones(3) / 3, mode="valid")
    floor = min_height * h.max()
    peaks = [i for i in range(bins)
             if (i == 0 or h[i] > h[i - 1]) and (i == bins - 1 or h[i] >= h[i + 1])
             and h[i] >= floor]
    modes = []
    for p in peaks:
        if modes:
            q = modes[-1]
            trough = h[q: p + 1].min()
            if trough > trough_ratio * min(h[q], h[p]):
                if h[p] > h[q]:
                    modes[-1] = p
                continue
        modes.append(p)
    return modes


def is_bimodal(x, bins: int = 32) -> bool:
    return len(histogram_modes(x, bins)) >= 2

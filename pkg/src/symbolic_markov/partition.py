"""
Interval partitions of a scalar phase space.

A :class:`PartitionSpec` maps each sample to the index of the cell that
contains it. Cells are half-open on the left: symbol ``i`` covers
``(boundaries[i-1], boundaries[i]]``. Each cell also carries a centroid used
as a pseudo-inverse of the symbol map when measuring reconstruction error.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegeneratePartition,
    DegenerateSignal,
    SymbolicMarkovError,
    TooFewDistinctValues,
)
from .sigprep import Signal

SYMBOL_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


class Method(str, enum.Enum):
    MAX_ENTROPY = "maxentropy"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class PartitionSpec:
    boundaries: tuple
    centroids: tuple
    method: Method = Method.MAX_ENTROPY

    def __post_init__(self):
        b = tuple(float(v) for v in self.boundaries)
        c = tuple(float(v) for v in self.centroids)
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "method", Method(self.method))
        if len(b) < 1:
            raise DegeneratePartition("a partition needs at least two cells")
        if len(c) != len(b) + 1:
            raise DegeneratePartition("need exactly one centroid per cell")
        if any(not np.isfinite(v) for v in b + c):
            raise DegeneratePartition("boundaries and centroids must be finite")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise DegeneratePartition("boundaries must be strictly increasing")
        edges = (-np.inf,) + b + (np.inf,)
        for i, ci in enumerate(c):
            if not edges[i] <= ci <= edges[i + 1]:
                raise DegeneratePartition(f"centroid {i} lies outside its cell")

    @property
    def alphabet_size(self) -> int:
        return len(self.boundaries) + 1

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "alphabet_size": self.alphabet_size,
            "boundaries": list(self.boundaries),
            "centroids": list(self.centroids),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PartitionSpec":
        spec = cls(d["boundaries"], d["centroids"], d.get("method", "maxentropy"))
        if "alphabet_size" in d and d["alphabet_size"] != spec.alphabet_size:
            raise SymbolicMarkovError("alphabet_size disagrees with boundaries")
        return spec

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PartitionSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SymbolSeq:
    """Integer symbols in ``[0, alphabet_size)``, stored read-only."""

    symbols: np.ndarray
    alphabet_size: int

    def __post_init__(self):
        s = np.array(self.symbols, dtype=np.int64).ravel()
        a = int(self.alphabet_size)
        if a < 1:
            raise SymbolicMarkovError("alphabet_size must be positive")
        if s.size and (s.min() < 0 or s.max() >= a):
            raise SymbolicMarkovError("symbol outside alphabet")
        s.setflags(write=False)
        object.__setattr__(self, "symbols", s)
        object.__setattr__(self, "alphabet_size", a)

    def __len__(self):
        return self.symbols.size

    def relabel(self, perm) -> "SymbolSeq":
        """Apply ``symbol -> perm[symbol]``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.alphabet_size)):
            raise SymbolicMarkovError("perm must be a permutation of the alphabet")
        return SymbolSeq(perm[self.symbols], self.alphabet_size)


def _samples(s) -> np.ndarray:
    return s.samples if isinstance(s, Signal) else Signal(s).samples


def _cell_means(x, boundaries, k):
    sym = np.searchsorted(boundaries, x, side="left")
    counts = np.bincount(sym, minlength=k)
    sums = np.bincount(sym, weights=x, minlength=k)
    return counts, sums


def fit_max_entropy(s, alphabet_size: int) -> PartitionSpec:
    """Equal-frequency (maximum entropy) partition fitted to ``s``.

    The cut at level ``j/k`` sits midway between the two order statistics
    that straddle it, so all-distinct data of length ``m*k`` lands exactly
    ``m`` samples in each cell.
    """
    x = _samples(s)
    k = int(alphabet_size)
    if k < 2:
        raise SymbolicMarkovError("alphabet_size must be >= 2")
    n = x.size
    if n < k:
        raise TooFewDistinctValues(f"need at least {k} samples, got {n}")
    xs = np.sort(x)
    if np.unique(xs).size < k:
        raise TooFewDistinctValues(f"fewer than {k} distinct values")
    idx = np.floor(np.arange(1, k) * n / k + 0.5).astype(int)
    idx = np.clip(idx, 1, n - 1)
    bounds = 0.5 * (xs[idx - 1] + xs[idx])
    if np.any(np.diff(bounds) <= 0):
        raise DegeneratePartition("tied samples collapse neighbouring cells")
    counts, sums = _cell_means(xs, bounds, k)
    if np.any(counts == 0):
        raise DegeneratePartition("tied samples leave an empty cell")
    return PartitionSpec(tuple(bounds), tuple(sums / counts), Method.MAX_ENTROPY)


def fit_uniform(s, alphabet_size: int) -> PartitionSpec:
    """Equal-width cells between min and max; centroids at cell midpoints."""
    x = _samples(s)
    k = int(alphabet_size)
    if k < 2:
        raise SymbolicMarkovError("alphabet_size must be >= 2")
    lo, hi = float(x.min()), float(x.max())
    if not hi > lo:
        raise DegenerateSignal("constant data cannot be binned")
    edges = lo + (hi - lo) * np.arange(k + 1) / k
    edges[-1] = hi
    return PartitionSpec(tuple(edges[1:-1]), tuple(0.5 * (edges[:-1] + edges[1:])),
                         Method.UNIFORM)


def fit(s, alphabet_size: int, method="maxentropy") -> PartitionSpec:
    method = Method(method)
    if method is Method.MAX_ENTROPY:
        return fit_max_entropy(s, alphabet_size)
    return fit_uniform(s, alphabet_size)


def symbolize(spec: PartitionSpec, s) -> SymbolSeq:
    x = _samples(s)
    sym = np.searchsorted(np.asarray(spec.boundaries), x, side="left")
    return SymbolSeq(sym, spec.alphabet_size)


def reconstruction_error(spec: PartitionSpec, s) -> float:
    """Mean absolute distance from each sample to its cell centroid."""
    x = _samples(s)
    sym = symbolize(spec, x).symbols
    return float(np.mean(np.abs(np.asarray(spec.centroids)[sym] - x)))


def symbol_entropy(seq: SymbolSeq) -> float:
    """Shannon entropy (nats) of the empirical symbol distribution."""
    p = np.bincount(seq.symbols, minlength=seq.alphabet_size) / len(seq)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


# --- symbol files ----------------------------------------------------------

def format_symbols(seq: SymbolSeq) -> str:
    if seq.alphabet_size > len(SYMBOL_CHARS):
        raise SymbolicMarkovError("alphabet too large for the symbol file format")
    lines = [f"#alphabet={seq.alphabet_size}"]
    lines.extend(SYMBOL_CHARS[v] for v in seq.symbols.tolist())
    return "\n".join(lines) + "\n"


def parse_symbols(text: str) -> SymbolSeq:
    alphabet = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = raw.strip()
        if not tok:
            continue
        if tok.startswith("#"):
            key, _, val = tok[1:].partition("=")
            if key.strip() == "alphabet":
                alphabet = int(val)
            continue
        if len(tok) != 1 or tok not in SYMBOL_CHARS:
            raise SymbolicMarkovError(f"line {lineno}: bad symbol {tok!r}")
        out.append(SYMBOL_CHARS.index(tok))
    if alphabet is None:
        raise SymbolicMarkovError("symbol file lacks '#alphabet=K' header")
    return SymbolSeq(np.array(out, dtype=np.int64), alphabet)


def read_symbols(path) -> SymbolSeq:
    return parse_symbols(Path(path).read_text())


def write_symbols(seq: SymbolSeq, path) -> None:
    Path(path).write_bytes(format_symbols(seq).encode())

"""
Markov order (memory) estimation for symbol sequences.

Two estimators are provided:

* :func:`estimate_order` -- a split-sample consistent estimator. The first
  half of the data selects which words are admissible (they must appear at
  all), the second half supplies both a frequency floor ``n**(1 - gamma)``
  and the empirical conditionals. ``D_n`` is the smallest ``k`` for which
  extending a length-``k`` context never moves a conditional next-symbol
  probability by more than ``n**(-beta)``.
* :func:`spectral_depth` -- the smallest ``D`` for which the second
  eigenvalue modulus of the one-step transition matrix, raised to ``D``,
  drops below ``epsilon``.

Sequences are indexed ``0..n-1`` with halves ``[0, h-1]`` and ``[h, n-1]``,
``h = ceil(n/2)``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigError,
    NonMixingWarning,
    NotStochastic,
    SequenceTooShort,
    SymbolicMarkovError,
)
from .partition import SYMBOL_CHARS, SymbolSeq

MIN_SEQUENCE_LENGTH = 10


@dataclass(frozen=True)
class OrderParams:
    gamma: float = 0.5
    beta: float = 0.2
    k_max: int | None = None
    i_max: int | None = None

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma must lie in (0, 1)")
        if not 0 < self.beta < (1 - self.gamma) / 2:
            raise ConfigError(
                "beta must satisfy 0 < beta < (1 - gamma)/2, i.e. 2*beta + gamma < 1"
            )
        if self.k_max is not None and self.k_max < 0:
            raise ConfigError("k_max must be >= 0")
        if self.i_max is not None and self.i_max < 1:
            raise ConfigError("i_max must be >= 1")

    def resolve(self, n: int, alphabet_size: int) -> tuple[int, int]:
        """Concrete ``(k_max, i_max)`` for a sequence of length ``n``."""
        k_max = self.k_max
        if k_max is None:
            a = max(alphabet_size, 2)
            k_max = max(0, int(math.floor(math.log(n) / math.log(a) + 1e-12)) - 1)
        i_max = self.i_max if self.i_max is not None else k_max + 8
        return k_max, i_max


class _WordIndex:
    """Exact word identities for every window length, keyed by end position.

    ``ids(L)[t]`` identifies the length-``L`` word ``seq[t-L+1 : t+1]``
    (``-1`` where the window does not fit). Words are ranked from the pair
    (id of the length ``L-1`` prefix, last symbol), so ids stay below
    ``n * |A|`` for any length.
    """

    def __init__(self, seq: SymbolSeq):
        self.s = seq.symbols
        self.n = len(seq)
        self.a = seq.alphabet_size
        self._ids = {0: np.zeros(self.n, dtype=np.int64)}
        self._nids = {0: 1}
        self._counts = {}

    def ids(self, length: int) -> np.ndarray:
        if length not in self._ids:
            prev = self.ids(length - 1)
            out = np.full(self.n, -1, dtype=np.int64)
            if length <= self.n:
                t = np.arange(length - 1, self.n)
                if length == 1:
                    key = self.s[t]
                else:
                    key = prev[t - 1] * self.a + self.s[t]
                uniq, inv = np.unique(key, return_inverse=True)
                out[t] = inv
                self._nids[length] = uniq.size
            else:
                self._nids[length] = 0
            self._ids[length] = out
        return self._ids[length]

    def num_ids(self, length: int) -> int:
        self.ids(length)
        return self._nids[length]

    def count(self, length: int, lo: int, hi: int) -> np.ndarray:
        """Occurrence counts per id for words ending at ``t`` in ``[lo, hi]``."""
        key = (length, lo, hi)
        if key not in self._counts:
            ids = self.ids(length)
            lo_ = max(lo, length - 1, 0)
            m = self.num_ids(length)
            if hi < lo_ or m == 0:
                c = np.zeros(m, dtype=np.int64)
            else:
                c = np.bincount(ids[lo_: hi + 1], minlength=m)
            self._counts[key] = c
        return self._counts[key]

    def word_at(self, length: int, t: int) -> tuple:
        return tuple(int(v) for v in self.s[t - length + 1: t + 1])


class _SplitStats:
    """Half-split statistics used by the consistent estimator."""

    def __init__(self, seq: SymbolSeq, gamma: float):
        self.w = _WordIndex(seq)
        n = self.n = len(seq)
        self.h = (n + 1) // 2
        self.floor = n ** (1.0 - gamma)
        self._support = {}
        self._cond = {}

    def full(self, length):
        # words lying entirely inside the second half
        return self.w.count(length, self.h + length - 1, self.n - 1)

    def with_successor(self, length):
        # words in the second half that are followed by one more symbol
        return self.w.count(length, self.h + length - 1, self.n - 2)

    def first_half(self, length):
        return self.w.count(length, length - 1, self.h - 1)

    def support(self, length: int):
        """Ids of ``S1 & S2`` for word length ``length`` plus a representative
        end position (in the second half) for each, and the set sizes."""
        if length not in self._support:
            c2 = self.full(length)
            c1 = self.first_half(length)
            in1 = c1 > 0
            in2 = c2 > self.floor
            both = np.flatnonzero(in1 & in2)
            if both.size:
                ids = self.w.ids(length)
                lo = self.h + length - 1
                uniq, first = np.unique(ids[lo: self.n], return_index=True)
                rep = lo + first[np.searchsorted(uniq, both)]
            else:
                rep = np.empty(0, dtype=np.int64)
            sizes = (int(in1.sum()), int(in2.sum()), int(both.size))
            self._support[length] = (both, rep, sizes)
        return self._support[length]

    def conditional_at(self, ctx_len: int, t: np.ndarray) -> np.ndarray:
        """C(s[t] | context of length ``ctx_len`` ending at t-1) on the second
        half, looked up for each end position in ``t``."""
        num = self.full(ctx_len + 1)[self.w.ids(ctx_len + 1)[t]]
        den = self.with_successor(ctx_len)[self.w.ids(ctx_len)[t - 1]]
        out = np.zeros(t.shape, dtype=float)
        nz = den > 0
        out[nz] = num[nz] / den[nz]
        return out


def _as_seq(seq) -> SymbolSeq:
    if isinstance(seq, SymbolSeq):
        return seq
    arr = np.asarray(seq, dtype=np.int64)
    return SymbolSeq(arr, int(arr.max()) + 1 if arr.size else 1)


def _count_word(s: np.ndarray, word, lo: int, hi: int) -> int:
    """Occurrences of ``word`` ending at positions ``lo..hi`` (inclusive)."""
    m = len(word)
    lo = max(lo, m - 1)
    if hi < lo:
        return 0
    if m == 0:
        return hi - lo + 1
    seg = s[lo - m + 1: hi + 1]
    win = np.lib.stride_tricks.sliding_window_view(seg, m)
    return int(np.all(win == np.asarray(word), axis=1).sum())


def empirical_conditional(seq, context, a: int, n1: int, n2: int) -> float:
    """Empirical P(next = a | context) from samples ``seq[n1..n2]``.

    Numerator counts ``context + a`` ending in ``[n1+k, n2]``; denominator
    counts ``context`` ending in ``[n1+k-1, n2-1]``. 0/0 is taken as 0.
    """
    seq = _as_seq(seq)
    s = seq.symbols
    if not 0 <= n1 <= n2 < len(seq):
        raise SymbolicMarkovError("range must satisfy 0 <= n1 <= n2 < len(seq)")
    ctx = tuple(int(v) for v in context)
    k = len(ctx)
    num = _count_word(s, ctx + (int(a),), n1 + k, n2)
    if k == 0:
        den = n2 - n1 + 1
    else:
        den = _count_word(s, ctx, n1 + k - 1, n2 - 1)
    return num / den if den else 0.0


def support_sets(seq, k: int, gamma: float) -> set:
    """Words of length ``k+1`` seen in the first half and seen strictly more
    than ``n**(1-gamma)`` times in the second half."""
    seq = _as_seq(seq)
    st = _SplitStats(seq, gamma)
    ids, rep, _ = st.support(k + 1)
    return {st.w.word_at(k + 1, int(t)) for t in rep}


def _delta_for_k(st: _SplitStats, k: int, i_max: int):
    best, best_i, exhausted = 0.0, 0, False
    for i in range(1, i_max + 1):
        length = k + i + 1
        if length > st.n:
            exhausted = True
            break
        _, rep, _ = st.support(length)
        if rep.size == 0:
            # longer words cannot be more frequent: later sets are empty too
            exhausted = True
            break
        long_c = st.conditional_at(length - 1, rep)
        short_c = st.conditional_at(k, rep)
        d = float(np.max(np.abs(long_c - short_c)))
        if d > best:
            best, best_i = d, i
    return best, best_i, exhausted


def delta_hat(seq, k: int, params: OrderParams | None = None) -> float:
    """Largest change in a second-half conditional next-symbol probability
    when a length-``k`` context is extended by ``i = 1..i_max`` symbols."""
    seq = _as_seq(seq)
    params = params or OrderParams()
    _, i_max = params.resolve(len(seq), seq.alphabet_size)
    st = _SplitStats(seq, params.gamma)
    return _delta_for_k(st, k, i_max)[0]


@dataclass(frozen=True)
class OrderEstimate:
    order: int | None
    delta_curve: tuple
    threshold: float
    support_sizes: tuple
    n: int
    alphabet_size: int
    gamma: float
    beta: float
    k_max: int
    i_max: int
    argmax_i: tuple = field(default=())
    truncated: tuple = field(default=())

    @property
    def found(self) -> bool:
        return self.order is not None

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "found": self.found,
            "status": "found" if self.found else "not-found-within-k_max",
            "n": self.n,
            "alphabet_size": self.alphabet_size,
            "gamma": self.gamma,
            "beta": self.beta,
            "k_max": self.k_max,
            "i_max": self.i_max,
            "threshold": self.threshold,
            "delta_curve": [{"k": k, "delta_hat": d} for k, d in self.delta_curve],
            "support_sizes": [
                {"k": k, "s1": a, "s2": b, "intersection": c}
                for k, (a, b, c) in enumerate(self.support_sizes)
            ],
            "argmax_i": list(self.argmax_i),
            "i_max_reached": list(self.truncated),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def curve_csv(self) -> str:
        rows = ["k,delta_hat,threshold"]
        rows += [f"{k},{d!r},{self.threshold!r}" for k, d in self.delta_curve]
        return "\r\n".join(rows) + "\r\n"


def estimate_order(seq, params: OrderParams | None = None) -> OrderEstimate:
    """Smallest ``k <= k_max`` with ``delta_hat(k) <= n**(-beta)``.

    The whole curve ``k = 0..k_max`` is always evaluated. ``order`` is None
    when no ``k`` qualifies, which points to long (possibly unbounded)
    memory.
    """
    seq = _as_seq(seq)
    params = params or OrderParams()
    n = len(seq)
    if n < MIN_SEQUENCE_LENGTH:
        raise SequenceTooShort(f"need at least {MIN_SEQUENCE_LENGTH} symbols, got {n}")
    k_max, i_max = params.resolve(n, seq.alphabet_size)
    st = _SplitStats(seq, params.gamma)
    thr = n ** (-params.beta)
    curve, argmax_i, trunc, sizes = [], [], [], []
    order = None
    for k in range(k_max + 1):
        d, bi, exhausted = _delta_for_k(st, k, i_max)
        curve.append((k, d))
        argmax_i.append(bi)
        trunc.append(not exhausted)
        sizes.append(st.support(k + 1)[2] if k + 1 <= n else (0, 0, 0))
        if order is None and d <= thr:
            order = k
    return OrderEstimate(
        order=order,
        delta_curve=tuple(curve),
        threshold=thr,
        support_sizes=tuple(sizes),
        n=n,
        alphabet_size=seq.alphabet_size,
        gamma=params.gamma,
        beta=params.beta,
        k_max=k_max,
        i_max=i_max,
        argmax_i=tuple(argmax_i),
        truncated=tuple(trunc),
    )


# --- spectral depth --------------------------------------------------------

def _check_stochastic(m: np.ndarray, tol: float = 1e-9) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotStochastic("matrix must be square")
    if np.any(m < 0):
        raise NotStochastic("negative entry")
    if np.any(np.abs(m.sum(axis=1) - 1) > tol):
        raise NotStochastic("rows must sum to 1")


def second_eigenvalue_modulus(pi1) -> float:
    m = np.asarray(pi1, dtype=float)
    _check_stochastic(m)
    if m.shape[0] < 2:
        return 0.0
    mods = np.sort(np.abs(np.linalg.eigvals(m)))[::-1]
    return float(mods[1])


@dataclass(frozen=True)
class SpectralDepth:
    depth: int
    lambda2: float
    epsilon: float
    capped: bool

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "lambda2": self.lambda2,
                "depth": self.depth, "capped": self.capped}


def spectral_depth_details(pi1, epsilon: float = 0.05, d_max: int = 8) -> SpectralDepth:
    if not 0 < epsilon < 1:
        raise ConfigError("epsilon must lie in (0, 1)")
    lam = second_eigenvalue_modulus(pi1)
    if lam > 1 - 1e-9:
        return SpectralDepth(d_max, lam, epsilon, True)
    depth = 1
    while lam ** depth > epsilon:
        depth += 1
        if depth > d_max:
            return SpectralDepth(d_max, lam, epsilon, True)
    return SpectralDepth(depth, lam, epsilon, False)


def spectral_depth(pi1, epsilon: float = 0.05, d_max: int = 8) -> int:
    """min D >= 1 with ``|lambda_2|**D <= epsilon``, capped at ``d_max``.

    Warns with :class:`NonMixingWarning` whenever the cap is hit.
    """
    res = spectral_depth_details(pi1, epsilon, d_max)
    if res.capped:
        warnings.warn(
            f"|lambda_2| = {res.lambda2:.6g}; depth capped at {d_max}",
            NonMixingWarning,
            stacklevel=2,
        )
    return res.depth


def word_to_str(word) -> str:
    return "".join(SYMBOL_CHARS[v] for v in word)

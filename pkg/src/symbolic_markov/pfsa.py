"""
D-Markov machines: probabilistic finite state automata whose states are all
words of length D over the alphabet.

Emission rows are MAP estimates under a uniform prior (add-one counts), so
every row is strictly positive and the induced state-transition matrix is
irreducible and aperiodic.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DepthTooLarge, NoConvergence, SequenceTooShort, SymbolicMarkovError
from .order_est import word_to_str
from .partition import SymbolSeq

STATE_CAP = 2**20
FORMAT_VERSION = 1


def _check_depth(depth: int, alphabet_size: int, state_cap: int) -> int:
    if depth < 1:
        raise SymbolicMarkovError("depth must be >= 1")
    n_states = alphabet_size**depth
    if n_states > state_cap:
        raise DepthTooLarge(f"|A|^D = {n_states} exceeds the state cap {state_cap}")
    return n_states


def count_transitions(seq: SymbolSeq, depth: int, state_cap: int = STATE_CAP) -> np.ndarray:
    """``counts[q, a]``: how often symbol ``a`` follows the length-``depth``
    word with lexicographic index ``q``."""
    a = seq.alphabet_size
    n_states = _check_depth(depth, a, state_cap)
    s = seq.symbols
    n = s.size
    if n < depth + 1:
        raise SequenceTooShort(f"need at least depth + 1 = {depth + 1} symbols")
    state = np.zeros(n - depth, dtype=np.int64)
    for j in range(depth):
        state = state * a + s[j: n - depth + j]
    flat = np.bincount(state * a + s[depth:], minlength=n_states * a)
    return flat.reshape(n_states, a)


def map_emission(counts, alphabet_size: int | None = None) -> np.ndarray:
    """(1 + N(a|q)) / (|A| + sum_l N(l|q)), row by row."""
    c = np.asarray(counts, dtype=float)
    if c.ndim == 1:
        c = c[None, :]
    if np.any(c < 0):
        raise SymbolicMarkovError("counts must be nonnegative")
    a = c.shape[1] if alphabet_size is None else int(alphabet_size)
    if c.shape[1] != a:
        raise SymbolicMarkovError("counts width disagrees with alphabet_size")
    return (1.0 + c) / (a + c.sum(axis=1, keepdims=True))


def successors(n_states: int, alphabet_size: int) -> np.ndarray:
    """``succ[q, a]``: state reached from ``q`` after emitting ``a``
    (drop the oldest symbol, append ``a``)."""
    q = np.arange(n_states)[:, None]
    return (q * alphabet_size + np.arange(alphabet_size)[None, :]) % n_states


def transition_matrix(emission: np.ndarray) -> np.ndarray:
    n_states, a = emission.shape
    succ = successors(n_states, a)
    t = np.zeros((n_states, n_states))
    rows = np.repeat(np.arange(n_states), a)
    np.add.at(t, (rows, succ.ravel()), emission.ravel())
    return t


def _apply(p, emission, succ, n_states):
    return np.bincount(succ.ravel(), weights=(p[:, None] * emission).ravel(),
                       minlength=n_states)


def stationary_dist(transition=None, *, emission=None, p0=None,
                    tol: float = 1e-12, max_iter: int = 1_000_000) -> np.ndarray:
    """Left fixed point of the state-transition matrix by power iteration.

    Pass ``transition`` (dense, row-stochastic) or ``emission`` of a D-Markov
    machine; the latter iterates on the successor structure without forming
    the |Q| x |Q| matrix. Starts from uniform unless ``p0`` is given.
    """
    if (transition is None) == (emission is None):
        raise ValueError("pass exactly one of transition or emission")
    if transition is not None:
        t = np.asarray(transition, dtype=float)
        n_states = t.shape[0]
        step = lambda p: p @ t  # noqa: E731
    else:
        e = np.asarray(emission, dtype=float)
        n_states = e.shape[0]
        succ = successors(n_states, e.shape[1])
        step = lambda p: _apply(p, e, succ, n_states)  # noqa: E731
    p = np.full(n_states, 1.0 / n_states) if p0 is None else np.asarray(p0, dtype=float)
    p = p / p.sum()
    for _ in range(max_iter):
        nxt = step(p)
        nxt /= nxt.sum()
        if np.abs(nxt - p).sum() <= tol:
            return nxt
        p = nxt
    raise NoConvergence(f"power iteration did not converge in {max_iter} steps")


@dataclass(frozen=True)
class DMarkovModel:
    depth: int
    alphabet_size: int
    counts: np.ndarray
    emission: np.ndarray
    stationary: np.ndarray

    def __post_init__(self):
        for name in ("counts", "emission", "stationary"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_states(self) -> int:
        return self.alphabet_size**self.depth

    @property
    def states(self) -> list[str]:
        return [word_to_str(w) for w in
                itertools.product(range(self.alphabet_size), repeat=self.depth)]

    @cached_property
    def transition(self) -> np.ndarray:
        t = transition_matrix(self.emission)
        t.setflags(write=False)
        return t

    def stationary_residual(self) -> float:
        """||p Pi - p||_1."""
        succ = successors(self.n_states, self.alphabet_size)
        nxt = _apply(self.stationary, self.emission, succ, self.n_states)
        return float(np.abs(nxt - self.stationary).sum())

    def to_dict(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "depth": self.depth,
            "alphabet_size": self.alphabet_size,
            "states": self.states,
            "counts": self.counts.tolist(),
            "emission": self.emission.tolist(),
            "transition": self.transition.tolist(),
            "stationary": self.stationary.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "DMarkovModel":
        if d.get("format_version") != FORMAT_VERSION:
            raise SymbolicMarkovError("unsupported model format_version")
        m = cls(
            depth=int(d["depth"]),
            alphabet_size=int(d["alphabet_size"]),
            counts=np.array(d["counts"], dtype=np.int64),
            emission=np.array(d["emission"], dtype=float),
            stationary=np.array(d["stationary"], dtype=float),
        )
        if m.emission.shape != (m.n_states, m.alphabet_size):
            raise SymbolicMarkovError("emission shape disagrees with depth/alphabet")
        if "transition" in d:
            t = np.array(d["transition"], dtype=float)
            t.setflags(write=False)
            m.__dict__["transition"] = t
        return m

    @classmethod
    def from_json(cls, text: str) -> "DMarkovModel":
        return cls.from_dict(json.loads(text))


def build_model(seq: SymbolSeq, depth: int, state_cap: int = STATE_CAP) -> DMarkovModel:
    counts = count_transitions(seq, depth, state_cap)
    emission = map_emission(counts, seq.alphabet_size)
    p = stationary_dist(emission=emission)
    return DMarkovModel(depth, seq.alphabet_size, counts, emission, p)


def feature_vector(model: DMarkovModel) -> np.ndarray:
    """Emission rows concatenated in state order."""
    return np.asarray(model.emission).ravel().copy()


"""
Divergence-based metrics on D-Markov machines (natural log, nats).

* ``kl_divergence`` / ``symmetric_kl`` on strictly positive probability vectors.
* ``model_complexity`` -- d_M, the largest symmetric KL distance between the
  emission rows of any two states.
* ``info_gain_discrepancy`` -- the stationary-weighted KL divergence of each
  state's emission row from the marginal symbol distribution, i.e. the
  mutual information between the current state and the next symbol.
"""
from __future__ import annotations

import numpy as np

from .errors import DimensionMismatch, NonPositiveEntry, ShapeMismatch, SymbolicMarkovError
from .pfsa import DMarkovModel, feature_vector

SUM_TOL = 1e-12


def as_prob_vector(p, tol: float = SUM_TOL) -> np.ndarray:
    """Validate a strictly positive vector that sums to one."""
    v = np.asarray(p, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise SymbolicMarkovError("probability vector must be one-dimensional")
    if np.any(~(v > 0)):
        raise NonPositiveEntry("probability vectors must be strictly positive (smoothed)")
    if abs(v.sum() - 1.0) > tol:
        raise SymbolicMarkovError("probability vector must sum to 1")
    return v


def kl_divergence(p, q) -> float:
    p, q = as_prob_vector(p), as_prob_vector(q)
    if p.shape != q.shape:
        raise DimensionMismatch(f"{p.size} vs {q.size}")
    return float(np.sum(p * np.log(p / q)))


def symmetric_kl(p, q) -> float:
    p, q = as_prob_vector(p), as_prob_vector(q)
    if p.shape != q.shape:
        raise DimensionMismatch(f"{p.size} vs {q.size}")
    return float(np.sum((p - q) * (np.log(p) - np.log(q))))


def _rows(model_or_matrix) -> np.ndarray:
    e = model_or_matrix.emission if isinstance(model_or_matrix, DMarkovModel) else model_or_matrix
    e = np.asarray(e, dtype=float)
    if np.any(~(e > 0)):
        raise NonPositiveEntry("emission rows must be strictly positive")
    return e


def model_complexity(model, block: int = 2048) -> float:
    """d_M = max over state pairs of the symmetric KL between emission rows.

    Uses d(i, j) = H_i + H_j - <p_i, log p_j> - <p_j, log p_i> with
    H_i = <p_i, log p_i>, evaluated blockwise over the distinct rows.
    """
    e = np.unique(_rows(model), axis=0)
    if e.shape[0] < 2:
        return 0.0
    lg = np.log(e)
    h = np.sum(e * lg, axis=1)
    best = 0.0
    m = e.shape[0]
    for i0 in range(0, m, block):
        pi, li, hi = e[i0:i0 + block], lg[i0:i0 + block], h[i0:i0 + block]
        d = hi[:, None] + h[None, :] - pi @ lg.T - li @ e.T
        best = max(best, float(d.max()))
    return max(best, 0.0)


def marginal_symbol_dist(model: DMarkovModel) -> np.ndarray:
    return np.asarray(model.stationary) @ np.asarray(model.emission)


def info_gain_discrepancy(model: DMarkovModel) -> float:
    """sum_q p(q) KL(emission[q] || marginal)."""
    e = _rows(model)
    p = np.asarray(model.stationary, dtype=float)
    marg = p @ e
    marg = marg / marg.sum()
    kl_rows = np.sum(e * (np.log(e) - np.log(marg)[None, :]), axis=1)
    return float(max(np.dot(p, kl_rows), 0.0))


def pairwise_model_distance(m1: DMarkovModel, m2: DMarkovModel) -> float:
    """Euclidean distance between emission feature vectors."""
    if (m1.depth, m1.alphabet_size) != (m2.depth, m2.alphabet_size):
        raise ShapeMismatch("models differ in depth or alphabet size")
    return float(np.linalg.norm(feature_vector(m1) - feature_vector(m2)))


def distance_matrix(models) -> np.ndarray:
    models = list(models)
    out = np.zeros((len(models), len(models)))
    for i, a in enumerate(models):
        for j in range(i + 1, len(models)):
            out[i, j] = out[j, i] = pairwise_model_distance(a, models[j])
    return out

"""Symbolic time-series analysis: from continuous signals to D-Markov
machines, with consistent order estimation and divergence metrics."""

from .errors import *  # noqa: F401,F403
from .metrics import (
    info_gain_discrepancy,
    kl_divergence,
    model_complexity,
    pairwise_model_distance,
    symmetric_kl,
)
from .order_est import (
    OrderEstimate,
    OrderParams,
    delta_hat,
    empirical_conditional,
    estimate_order,
    spectral_depth,
    support_sets,
)
from .partition import (
    PartitionSpec,
    SymbolSeq,
    fit_max_entropy,
    fit_uniform,
    reconstruction_error,
    symbolize,
)
from .pfsa import (
    DMarkovModel,
    build_model,
    count_transitions,
    feature_vector,
    map_emission,
    stationary_dist,
)
from .sigprep import Signal, autocorr_first_min_lag, downsample_concat, normalize, preprocess
from .synth import ChainSpec, simulate_chain, surrogate_stable, surrogate_unstable

__version__ = "0.1.0"

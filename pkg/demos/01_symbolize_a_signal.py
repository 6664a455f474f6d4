"""
From a continuous signal to a symbol sequence
=============================================

Normalize, decorrelate at the first autocorrelation minimum, then cut the
value range into equally populated cells.
"""

import numpy as np

from symbolic_markov import partition, sigprep, synth

# a limit-cycle oscillation, 40 samples per cycle
sig = synth.surrogate_unstable(20_000, seed=3)
print("raw mean %.3f, std %.3f" % (sig.samples.mean(), sig.samples.std()))

# the first acf minimum sits near half a period
pre = sigprep.preprocess(sig)
print("decorrelation lag:", pre.lag, "found:", pre.acf_minimum_found)
print("samples after downsample-concatenate:", pre.n_samples)

# maximum entropy partition: every cell gets the same share of the data
spec = partition.fit_max_entropy(pre.signal, 3)
print("boundaries:", np.round(spec.boundaries, 3))
print("centroids: ", np.round(spec.centroids, 3))

seq = partition.symbolize(spec, pre.signal)
print("cell counts:", np.bincount(seq.symbols))
print("symbol entropy %.6f (ln 3 = %.6f)" % (partition.symbol_entropy(seq), np.log(3)))
print("reconstruction error %.4f" % partition.reconstruction_error(spec, pre.signal))

# a uniform partition on the same data is far from equi-frequency
uni = partition.fit_uniform(pre.signal, 3)
print("uniform cell counts:", np.bincount(partition.symbolize(uni, pre.signal).symbols))

# the first symbols as they appear in a symbol file
print(partition.format_symbols(seq).splitlines()[:6])

"""
How much memory does a symbol sequence have?
============================================

The consistent estimator grows the context until extending it no longer
changes the next-symbol probabilities by more than n**-beta.
"""

import numpy as np

from symbolic_markov import order_est, pfsa, synth

# a second-order binary chain; the rows are the contexts 00, 01, 10, 11
spec = synth.ChainSpec.from_table(2, 2, [[0.1, 0.9], [0.8, 0.2], [0.3, 0.7], [0.6, 0.4]])
params = order_est.OrderParams(gamma=0.5, beta=0.2)

for n in (1_000, 10_000, 100_000):
    hits = [order_est.estimate_order(synth.simulate_chain(spec, n, seed=s), params).order
            for s in range(10)]
    print(f"n={n:>6}: estimates {hits}")

# the statistic itself, against the threshold
est = order_est.estimate_order(synth.simulate_chain(spec, 100_000, seed=0), params)
print("\nthreshold n**-beta = %.4f" % est.threshold)
for k, d in est.delta_curve:
    print(f"  k={k}: delta_hat={d:.4f}", "<- first below" if k == est.order else "")

# plot-ready form
print(est.curve_csv())

# the spectral heuristic looks only at the one-step matrix
one_step = pfsa.build_model(synth.simulate_chain(spec, 100_000, seed=0), 1)
sd = order_est.spectral_depth_details(one_step.transition, epsilon=0.05)
print("|lambda_2| = %.3f, spectral depth %d" % (sd.lambda2, sd.depth))

# noise without memory
iid = synth.simulate_chain(synth.iid_spec([0.5, 0.5]), 100_000, seed=1)
print("iid estimate:", order_est.estimate_order(iid, params).order)

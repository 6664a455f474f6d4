"""
D-Markov machines and their summary statistics
==============================================

States are the words of length D. Emission rows are MAP estimates, so an
unseen state still gets a uniform row.
"""

import numpy as np

from symbolic_markov import metrics, pfsa, synth

spec = synth.ChainSpec.from_table(1, 3, [[0.7, 0.2, 0.1], [0.1, 0.8, 0.1], [0.2, 0.2, 0.6]])
seq = synth.simulate_chain(spec, 50_000, seed=4)

model = pfsa.build_model(seq, depth=1)
print("states:", model.states)
print("emission:\n", np.round(model.emission, 3))
print("stationary:", np.round(model.stationary, 4))
print("residual ||p P - p||_1 = %.1e" % model.stationary_residual())

# smoothing on a tiny count table
print("\nMAP rows for counts [[0,0,0],[4,0,1]]:\n", pfsa.map_emission([[0, 0, 0], [4, 0, 1]]))

# two-state hand case: the fixed point is (5/6, 1/6)
print("stationary of [[0.9,0.1],[0.5,0.5]]:", pfsa.stationary_dist(np.array([[0.9, 0.1], [0.5, 0.5]])))

# model complexity: the widest symmetric KL gap between two states
print("\nd_M = %.4f" % metrics.model_complexity(model))
# discrepancy: what knowing the state tells you about the next symbol
print("discrepancy = %.4f" % metrics.info_gain_discrepancy(model))

# a deeper machine on the same data adds states but no information
deep = pfsa.build_model(seq, depth=2)
print("depth 2: %d states, discrepancy %.4f" % (deep.n_states, metrics.info_gain_discrepancy(deep)))

# models serialize losslessly
again = pfsa.DMarkovModel.from_json(model.to_json())
print("round trip exact:", np.array_equal(again.emission, model.emission))

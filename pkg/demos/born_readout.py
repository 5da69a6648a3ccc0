# %% [markdown]
# # Born weights from a trace-preserving readout
#
# Project the object on `|j>`, let the apparatus evolve under any
# trace-preserving map and follow with any trace-preserving map on the whole.
# The probability of the pattern is the object's diagonal entry, whatever the
# apparatus state.

# %%
import numpy as np

from beable import measurement_demo as md

rng = np.random.default_rng(1)
rho_o = md.random_density(3, rng)
A, G = md.random_channel(2, rng), md.random_channel(6, rng)
for _ in range(3):
    rho_a = md.random_density(2, rng)
    s = md.compose(rho_o, rho_a)
    p = [md.outcome_probability(s, md.OutcomePattern(j, 3, A, G)) for j in range(3)]
    print(np.round(p, 12), "diagonal", np.round(np.diag(rho_o).real, 12))

# %%
print(md.born_rule_report(3, 3, trials=20, seed=0))

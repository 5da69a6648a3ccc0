# %% [markdown]
# # Time-sliced path integrals as oracles
#
# The composed sliced propagator of the oscillator converges to the closed
# form at first order in the slice width.  With three slices the sliced
# characteristic functional is a six-dimensional Gaussian integral, small
# enough to sum over a tensor grid.

# %%
import numpy as np

from beable import path_oracle as po
from beable.discrete_kernel import GridSpec

exact = po.feynman_exact(0.0, 1.0, 1.0, 1.0).value
for N in (32, 64, 128):
    v = po.feynman_discrete(0.0, 1.0, GridSpec.from_T(N, 1.0, 1.0)).value
    print(N, abs(v - exact) / abs(exact))

# %%
grid = GridSpec.from_T(3, 1.0, 1.0)
state = po.GaussianEndpointState(0.4, 0.3, 0.7)
xi = np.array([0.3, -0.8, 0.5])
closed = po.cfo_discrete(state, xi, grid, 0.5, 0.2, -0.4, mass=1j)
brute = po.cfo_bruteforce(state, xi, grid, 0.5, 0.2, -0.4, mass=1j, points=13, span=6.0)
print("closed form:", closed)
print("grid sum:   ", brute.value)

# %% [markdown]
# Low-frequency content of interpolated world lines: white-noise lines lose
# their components below `omega` as the grid refines, Brownian-bridge lines
# keep them.

# %%
for name, fam in (("white", po.white_noise_family), ("bridge", po.brownian_bridge_family)):
    scan = po.lowfreq_scan(fam(1.0, 1.0), 1.0, (64, 256), seeds=20)
    print(name, scan.residual, "slope", round(scan.slope, 3))

# %% [markdown]
# # Energy audit of two master equations
#
# Continuous monitoring of position with the plain double-commutator generator
# heats the oscillator at a constant rate `alpha/4`.  The signed generator built
# from `Q` and `P` keeps the mean energy fixed and still drives `<Q>` along the
# classical orbit.

# %%
import numpy as np

from beable import fock_algebra as fa
from beable import superoperators as so

n_max, omega = 40, 1.0
Q, P = fa.build_canonical(n_max, omega)
H = fa.build_hamiltonian(Q, P, omega)
rho0 = fa.coherent_state(1.0, n_max)

# %%
res = so.propagate(so.lindblad_original(Q, 0.8), rho0, 5.0, 100, H=H)
print("heating slope:", so.fit_slope(res.times, res.energy_series), "expected 0.2")
print("smallest eigenvalue kept >= 0:", res.min_eigenvalue_series.min())

# %% [markdown]
# The signed generator is not completely positive, so Schrodinger-picture
# propagation on a truncated Fock space blows up at the top levels.  The
# quadratic moments close on themselves, and evolving them directly is exact.

# %%
L = so.lindblad_modified(Q, P, omega, 0.5)
ev = so.evolve_moments(L, Q, P, rho0, 5.0, 100, omega, H=H)
print("energy spread:", np.ptp(ev.energy_series))

tr = so.mean_trajectory_heisenberg(L, Q, P, rho0, 4 * np.pi, 200, omega, H=H)
fit = so.fit_cosine(tr.t, tr.q, omega)
print(f"<Q>(t) = {fit.amplitude:.6f} cos(t + {fit.phase:.3f}), residual {fit.residual:.1e}")

# %% [markdown]
# The price is positivity: a short step `rho + eps L(rho)` leaves the cone of
# states already at first order in `eps`.

# %%
Qs, Ps = fa.build_canonical(12, omega)
scan = so.positivity_witness_scan(so.lindblad_modified(Qs, Ps, omega, 0.5), 0.01, n_random=145)
print("most negative eigenvalue found:", scan.min_eigenvalue)
